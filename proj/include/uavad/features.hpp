#pragma once

#include <array>
#include <vector>

#include "uavad/autoencoder.hpp"
#include "uavad/flow.hpp"
#include "uavad/types.hpp"

namespace uavad {

// Distribution-only statistics of a single-channel intensity grid.
struct FirstOrderStats {
    double mean = 0.0;     // S1
    double variance = 0.0; // S2, population variance
    double kurtosis = 0.0; // S3, non-excess; 0 when variance is 0
    double energy = 0.0;   // S4, mean of squared intensities
    double skewness = 0.0; // S5; 0 when variance is 0
    double entropy = 0.0;  // S6, Shannon entropy in bits over a 256-bin histogram

    std::array<double, 6> as_array() const {
        return {mean, variance, kurtosis, energy, skewness, entropy};
    }
};

FirstOrderStats first_order_stats(const std::vector<double>& values);

// Luminance reduction followed by first_order_stats.
FirstOrderStats stats_of_reconstruction(const Image& reconstruction);

// Band of pixels 4 px inside and 4 px outside the box border
// (dilate(bbox, w) minus erode(bbox, w)), clipped to the image rectangle.
struct ContextRegion {
    std::vector<std::pair<int, int>> pixels;
};

ContextRegion contextual_region(const BoundingBox& bbox, int half_width, int img_w, int img_h);

// Normalized class-label counts (greenery, road, construction, water).
std::array<double, 4> contextual_histogram(const ContextRegion& region, const ClassMask& mask);

FeatureDescriptor assemble_descriptor(const std::array<double, 4>& contextual,
                                      const std::array<double, 9>& temporal,
                                      const std::array<double, 9>& appearance);

struct ExtractorConfig {
    int patch_size = 32;      // autoencoder input resolution
    int context_width = 4;    // ring half-width
    FlowColorConfig flow_color;
};

// Full per-object descriptor: flow patch through the temporal autoencoder,
// image patch through the appearance autoencoder, class histogram around the
// box. The caller resolves the flow source (computed, ingested or ground
// truth) and passes the field for the detection's frame.
FeatureDescriptor extract_object_descriptor(const DetectionRecord& det, const Image& frame,
                                            const FlowField& flow, const ClassMask& mask,
                                            const AutoencoderState& ae_appearance,
                                            const AutoencoderState& ae_temporal,
                                            const ExtractorConfig& cfg);

} // namespace uavad
