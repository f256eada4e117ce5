#pragma once

#include "uavad/types.hpp"

namespace uavad {

struct HornSchunckParams {
    double smoothness = 0.1; // weight of the smoothness term in the update denominator
    int iterations = 200;
};

// Fixed color wheel: hue from flow angle, saturation 1, value from magnitude
// capped at v_max. Zero flow renders black.
struct FlowColorConfig {
    double v_max = 4.0;
};

// Horn-Schunck fixed-point iteration on two grayscale frames of equal size.
// Inputs are single-channel images; multi-channel inputs are reduced to
// luminance first.
FlowField compute_dense_flow(const Image& frame_a, const Image& frame_b,
                             const HornSchunckParams& params = {});

Image flow_to_rgb(const FlowField& flow, const FlowColorConfig& cfg);

// Sub-grid of the flow field clipped to bounds; empty intersection is an error.
FlowField crop_flow_patch(const FlowField& flow, const BoundingBox& bbox);

} // namespace uavad
