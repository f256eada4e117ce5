#include "uavad/features.hpp"

#include <algorithm>
#include <cmath>

namespace uavad {

FirstOrderStats first_order_stats(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("statistics require at least one pixel");
    const double n = static_cast<double>(values.size());

    FirstOrderStats s;
    for (double v : values) {
        s.mean += v;
        s.energy += v * v;
    }
    s.mean /= n;
    s.energy /= n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.variance = m2;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    } // degenerate convention: both stay 0 for constant input

    // Shannon entropy (bits) of the 256-bin intensity histogram.
    std::array<double, 256> hist{};
    for (double v : values) {
        int bin = static_cast<int>(v * 256.0);
        bin = std::clamp(bin, 0, 255);
        hist[bin] += 1.0;
    }
    for (double count : hist) {
        if (count == 0.0) continue;
        const double p = count / n;
        s.entropy -= p * std::log2(p);
    }
    return s;
}

FirstOrderStats stats_of_reconstruction(const Image& reconstruction) {
    return first_order_stats(luminance(reconstruction));
}

ContextRegion contextual_region(const BoundingBox& bbox, int half_width, int img_w, int img_h) {
    if (!bbox.valid()) throw ValidationError("context region requires a valid box");
    if (!bbox.intersects(img_w, img_h))
        throw ValidationError("context box does not intersect the image");
    const int w = half_width;
    // dilate(bbox, w) minus erode(bbox, w); erosion bottoms out at the empty set.
    const int dx0 = bbox.x - w, dy0 = bbox.y - w;
    const int dx1 = bbox.x + bbox.w + w, dy1 = bbox.y + bbox.h + w; // exclusive
    const bool erode_empty = bbox.w <= 2 * w || bbox.h <= 2 * w;
    const int ex0 = bbox.x + w, ey0 = bbox.y + w;
    const int ex1 = bbox.x + bbox.w - w, ey1 = bbox.y + bbox.h - w; // exclusive

    ContextRegion region;
    for (int y = std::max(dy0, 0); y < std::min(dy1, img_h); ++y)
        for (int x = std::max(dx0, 0); x < std::min(dx1, img_w); ++x) {
            if (!erode_empty && x >= ex0 && x < ex1 && y >= ey0 && y < ey1) continue;
            region.pixels.emplace_back(x, y);
        }
    if (region.pixels.empty())
        throw ValidationError("context region is empty after clipping");
    return region;
}

std::array<double, 4> contextual_histogram(const ContextRegion& region, const ClassMask& mask) {
    if (region.pixels.empty()) throw ValidationError("context region is empty");
    std::array<double, 4> hist{};
    for (const auto& [x, y] : region.pixels) {
        if (x < 0 || x >= mask.width || y < 0 || y >= mask.height)
            throw ValidationError("context region pixel outside the mask");
        hist[mask.at(x, y)] += 1.0;
    }
    const double total = static_cast<double>(region.pixels.size());
    for (double& h : hist) h /= total;
    return hist;
}

FeatureDescriptor assemble_descriptor(const std::array<double, 4>& contextual,
                                      const std::array<double, 9>& temporal,
                                      const std::array<double, 9>& appearance) {
    for (double v : contextual)
        if (!std::isfinite(v)) throw ValidationError("non-finite contextual feature");
    for (double v : temporal)
        if (!std::isfinite(v)) throw ValidationError("non-finite temporal feature");
    for (double v : appearance)
        if (!std::isfinite(v)) throw ValidationError("non-finite appearance feature");
    FeatureDescriptor d;
    d.contextual = contextual;
    d.temporal = temporal;
    d.appearance = appearance;
    return d;
}

namespace {

std::array<double, 9> block_from(const ReconstructionResult& recon) {
    const FirstOrderStats st = stats_of_reconstruction(recon.reconstruction);
    const auto s = st.as_array();
    return {recon.error_r, recon.error_g, recon.error_b, s[0], s[1], s[2], s[3], s[4], s[5]};
}

} // namespace

FeatureDescriptor extract_object_descriptor(const DetectionRecord& det, const Image& frame,
                                            const FlowField& flow, const ClassMask& mask,
                                            const AutoencoderState& ae_appearance,
                                            const AutoencoderState& ae_temporal,
                                            const ExtractorConfig& cfg) {
    if (frame.width != mask.width || frame.height != mask.height)
        throw ValidationError("frame and mask dimensions differ");
    if (frame.width != flow.width || frame.height != flow.height)
        throw ValidationError("frame and flow dimensions differ");

    const FlowField flow_patch = crop_flow_patch(flow, det.bbox);
    const Image flow_rgb = flow_to_rgb(flow_patch, cfg.flow_color);
    const auto temporal = block_from(reconstruction_errors(ae_temporal, flow_rgb));

    const Image patch = crop_image(frame, det.bbox);
    const auto appearance = block_from(reconstruction_errors(ae_appearance, patch));

    const ContextRegion region =
        contextual_region(det.bbox, cfg.context_width, mask.width, mask.height);
    const auto contextual = contextual_histogram(region, mask);

    return assemble_descriptor(contextual, temporal, appearance);
}

} // namespace uavad
