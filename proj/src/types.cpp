#include "uavad/types.hpp"

#include <algorithm>

namespace uavad {

std::string to_string(ObjectClass c) {
    return c == ObjectClass::vehicle ? "vehicle" : "human";
}

ObjectClass object_class_from_string(const std::string& s) {
    if (s == "vehicle") return ObjectClass::vehicle;
    if (s == "human") return ObjectClass::human;
    throw ValidationError("unknown object class '" + s + "'");
}

std::vector<double> luminance(const Image& img) {
    std::vector<double> out(static_cast<size_t>(img.width) * img.height);
    if (img.channels == 1) {
        for (size_t i = 0; i < out.size(); ++i) out[i] = img.data[i];
        return out;
    }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out[static_cast<size_t>(y) * img.width + x] =
                0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
    return out;
}

Image resize_bilinear(const Image& src, int out_w, int out_h) {
    Image dst(out_w, out_h, src.channels);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        // Pixel-center alignment.
        const double fy = std::max(0.0, (y + 0.5) * sy - 0.5);
        const int y0 = std::min(static_cast<int>(fy), src.height - 1);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            const double fx = std::max(0.0, (x + 0.5) * sx - 0.5);
            const int x0 = std::min(static_cast<int>(fx), src.width - 1);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < src.channels; ++c) {
                const double top = (1.0 - wx) * src.at(x0, y0, c) + wx * src.at(x1, y0, c);
                const double bot = (1.0 - wx) * src.at(x0, y1, c) + wx * src.at(x1, y1, c);
                const double val = (1.0 - wy) * top + wy * bot;
                dst.at(x, y, c) = static_cast<float>(std::clamp(val, 0.0, 1.0));
            }
        }
    }
    return dst;
}

Image crop_image(const Image& src, const BoundingBox& bbox) {
    if (!bbox.intersects(src.width, src.height))
        throw ValidationError("crop box does not intersect the image");
    const BoundingBox c = bbox.clipped(src.width, src.height);
    Image out(c.w, c.h, src.channels);
    for (int y = 0; y < c.h; ++y)
        for (int x = 0; x < c.w; ++x)
            for (int ch = 0; ch < src.channels; ++ch)
                out.at(x, y, ch) = src.at(c.x + x, c.y + y, ch);
    return out;
}

} // namespace uavad
