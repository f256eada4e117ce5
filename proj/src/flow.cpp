#include "uavad/flow.hpp"

#include <algorithm>
#include <cmath>

namespace uavad {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

struct Grid {
    int w, h;
    std::vector<double> v;
    double at(int x, int y) const {
        return v[static_cast<size_t>(clampi(y, 0, h - 1)) * w + clampi(x, 0, w - 1)];
    }
};

Grid to_gray(const Image& img) {
    Grid g{img.width, img.height, luminance(img)};
    return g;
}

} // namespace

FlowField compute_dense_flow(const Image& frame_a, const Image& frame_b,
                             const HornSchunckParams& params) {
    if (frame_a.width != frame_b.width || frame_a.height != frame_b.height)
        throw ValidationError("flow input frames must have identical dimensions");
    if (params.smoothness <= 0.0) throw ValidationError("smoothness weight must be > 0");
    if (params.iterations < 1) throw ValidationError("iteration count must be >= 1");

    const Grid a = to_gray(frame_a);
    const Grid b = to_gray(frame_b);
    const int w = a.w, h = a.h;
    const size_t n = static_cast<size_t>(w) * h;

    // Derivative estimates averaged over the 2x2x2 cube of the frame pair
    // (the original Horn-Schunck scheme).
    std::vector<double> ix(n), iy(n), it(n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            ix[i] = 0.25 * (a.at(x + 1, y) - a.at(x, y) + a.at(x + 1, y + 1) - a.at(x, y + 1) +
                            b.at(x + 1, y) - b.at(x, y) + b.at(x + 1, y + 1) - b.at(x, y + 1));
            iy[i] = 0.25 * (a.at(x, y + 1) - a.at(x, y) + a.at(x + 1, y + 1) - a.at(x + 1, y) +
                            b.at(x, y + 1) - b.at(x, y) + b.at(x + 1, y + 1) - b.at(x + 1, y));
            it[i] = 0.25 * (b.at(x, y) - a.at(x, y) + b.at(x + 1, y) - a.at(x + 1, y) +
                            b.at(x, y + 1) - a.at(x, y + 1) + b.at(x + 1, y + 1) -
                            a.at(x + 1, y + 1));
        }
    }

    std::vector<double> u(n, 0.0), v(n, 0.0), ubar(n), vbar(n);
    const auto neighbor_avg = [&](const std::vector<double>& f, std::vector<double>& out) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto g = [&](int xx, int yy) {
                    return f[static_cast<size_t>(clampi(yy, 0, h - 1)) * w + clampi(xx, 0, w - 1)];
                };
                // 1/6 edge neighbors, 1/12 diagonal neighbors.
                out[static_cast<size_t>(y) * w + x] =
                    (g(x - 1, y) + g(x + 1, y) + g(x, y - 1) + g(x, y + 1)) / 6.0 +
                    (g(x - 1, y - 1) + g(x + 1, y - 1) + g(x - 1, y + 1) + g(x + 1, y + 1)) / 12.0;
            }
        }
    };

    for (int iter = 0; iter < params.iterations; ++iter) {
        neighbor_avg(u, ubar);
        neighbor_avg(v, vbar);
        for (size_t i = 0; i < n; ++i) {
            const double denom = params.smoothness + ix[i] * ix[i] + iy[i] * iy[i];
            const double t = (ix[i] * ubar[i] + iy[i] * vbar[i] + it[i]) / denom;
            u[i] = ubar[i] - ix[i] * t;
            v[i] = vbar[i] - iy[i] * t;
        }
    }

    FlowField flow;
    flow.width = w;
    flow.height = h;
    flow.u.resize(n);
    flow.v.resize(n);
    for (size_t i = 0; i < n; ++i) {
        flow.u[i] = static_cast<float>(u[i]);
        flow.v[i] = static_cast<float>(v[i]);
        if (!std::isfinite(flow.u[i]) || !std::isfinite(flow.v[i]))
            throw ValidationError("flow solver produced non-finite values");
    }
    return flow;
}

Image flow_to_rgb(const FlowField& flow, const FlowColorConfig& cfg) {
    if (cfg.v_max <= 0.0) throw ValidationError("v_max must be > 0");
    Image img(flow.width, flow.height, 3);
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const double fu = flow.u_at(x, y);
            const double fv = flow.v_at(x, y);
            const double mag = std::sqrt(fu * fu + fv * fv);
            const double value = std::min(mag, cfg.v_max) / cfg.v_max;
            double angle = std::atan2(fv, fu); // [-pi, pi]
            if (angle < 0.0) angle += 2.0 * 3.14159265358979323846;
            const double hue = angle * (180.0 / 3.14159265358979323846); // [0, 360)
            // HSV -> RGB with S = 1: chroma equals value.
            const double hp = hue / 60.0;
            const double f = hp - std::floor(hp);
            const int sector = static_cast<int>(hp) % 6;
            const double p = 0.0;
            const double q = value * (1.0 - f);
            const double t = value * f;
            double r = 0, g = 0, b = 0;
            switch (sector) {
                case 0: r = value; g = t; b = p; break;
                case 1: r = q; g = value; b = p; break;
                case 2: r = p; g = value; b = t; break;
                case 3: r = p; g = q; b = value; break;
                case 4: r = t; g = p; b = value; break;
                default: r = value; g = p; b = q; break;
            }
            img.at(x, y, 0) = static_cast<float>(r);
            img.at(x, y, 1) = static_cast<float>(g);
            img.at(x, y, 2) = static_cast<float>(b);
        }
    }
    return img;
}

FlowField crop_flow_patch(const FlowField& flow, const BoundingBox& bbox) {
    if (!bbox.intersects(flow.width, flow.height))
        throw ValidationError("flow crop box does not intersect the field");
    const BoundingBox c = bbox.clipped(flow.width, flow.height);
    FlowField out;
    out.width = c.w;
    out.height = c.h;
    out.u.resize(static_cast<size_t>(c.w) * c.h);
    out.v.resize(out.u.size());
    for (int y = 0; y < c.h; ++y)
        for (int x = 0; x < c.w; ++x) {
            out.u_at(x, y) = flow.u_at(c.x + x, c.y + y);
            out.v_at(x, y) = flow.v_at(c.x + x, c.y + y);
        }
    return out;
}

} // namespace uavad
