#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "uavad/errors.hpp"

namespace uavad {

// Axis-aligned box, integer pixel coordinates, top-left origin.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool valid() const { return w >= 1 && h >= 1; }

    bool intersects(int img_w, int img_h) const {
        return x < img_w && y < img_h && x + w > 0 && y + h > 0;
    }

    // Intersection with the image rectangle; caller must check intersects().
    BoundingBox clipped(int img_w, int img_h) const {
        const int x0 = std::max(x, 0);
        const int y0 = std::max(y, 0);
        const int x1 = std::min(x + w, img_w);
        const int y1 = std::min(y + h, img_h);
        return BoundingBox{x0, y0, x1 - x0, y1 - y0};
    }

    bool operator==(const BoundingBox&) const = default;
};

enum class ObjectClass : uint8_t { vehicle = 0, human = 1 };

std::string to_string(ObjectClass c);
ObjectClass object_class_from_string(const std::string& s);

struct DetectionRecord {
    std::string video_id;
    int frame_index = 0;
    int object_id = 0;
    ObjectClass object_class = ObjectClass::vehicle;
    BoundingBox bbox;

    bool operator==(const DetectionRecord&) const = default;
};

// Background class indices, fixed order.
enum : uint8_t {
    kClassGreenery = 0,
    kClassRoad = 1,
    kClassConstruction = 2,
    kClassWater = 3,
};

struct ClassMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> labels; // row-major, values in {0,1,2,3}

    uint8_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
};

struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> u; // row-major, pixels/frame
    std::vector<float> v;

    float u_at(int x, int y) const { return u[static_cast<size_t>(y) * width + x]; }
    float v_at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
    float& u_at(int x, int y) { return u[static_cast<size_t>(y) * width + x]; }
    float& v_at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
};

// Interleaved HWC raster, intensities normalized to [0,1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c) : width(w), height(h), channels(c) {
        data.assign(static_cast<size_t>(w) * h * c, 0.0f);
    }

    float at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float& at(int x, int y, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

struct FrameAnnotation {
    int frame_index = 0;
    int label = 0; // 0 normal, 1 anomalous

    bool operator==(const FrameAnnotation&) const = default;
};

// The 22-value object descriptor: contextual histogram, temporal block,
// appearance block. Each 9-value block is (E_r, E_g, E_b, S1..S6).
struct FeatureDescriptor {
    std::array<double, 4> contextual{};
    std::array<double, 9> temporal{};
    std::array<double, 9> appearance{};

    static constexpr int kDim = 22;

    std::array<double, kDim> flat() const {
        std::array<double, kDim> out{};
        size_t i = 0;
        for (double v : contextual) out[i++] = v;
        for (double v : temporal) out[i++] = v;
        for (double v : appearance) out[i++] = v;
        return out;
    }

    std::vector<double> flat_vec() const {
        const auto a = flat();
        return std::vector<double>(a.begin(), a.end());
    }
};

// Converts an RGB image to luminance values, 0.299 R + 0.587 G + 0.114 B.
std::vector<double> luminance(const Image& img);

// Bilinear resize with clamp-to-edge sampling; output clipped to [0,1].
Image resize_bilinear(const Image& src, int out_w, int out_h);

// Sub-image over the clipped box; throws ValidationError on empty intersection.
Image crop_image(const Image& src, const BoundingBox& bbox);

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace uavad
