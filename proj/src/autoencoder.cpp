#include "uavad/autoencoder.hpp"

#include <algorithm>
#include <cmath>

#include "uavad/errors.hpp"

namespace uavad {

namespace {

int conv_out_dim(int in, int stride) { return (in + 2 - 3) / stride + 1; }

Batch conv_forward(const Batch& x, const ConvLayer& layer) {
    const int oh = conv_out_dim(x.h, layer.stride);
    const int ow = conv_out_dim(x.w, layer.stride);
    Batch y(x.n, layer.out_c, oh, ow);
    const auto& wv = layer.weight.value;
    for (int i = 0; i < x.n; ++i)
        for (int oc = 0; oc < layer.out_c; ++oc)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    double acc = layer.has_bias ? layer.bias.value[oc] : 0.0;
                    for (int ic = 0; ic < layer.in_c; ++ic)
                        for (int ky = 0; ky < 3; ++ky) {
                            const int iy = oy * layer.stride - 1 + ky;
                            if (iy < 0 || iy >= x.h) continue;
                            const size_t wbase =
                                ((static_cast<size_t>(oc) * layer.in_c + ic) * 3 + ky) * 3;
                            const size_t xbase = x.idx(i, ic, iy, 0);
                            for (int kx = 0; kx < 3; ++kx) {
                                const int ix = ox * layer.stride - 1 + kx;
                                if (ix < 0 || ix >= x.w) continue;
                                acc += wv[wbase + kx] * x.v[xbase + ix];
                            }
                        }
                    y.at(i, oc, oy, ox) = acc;
                }
    return y;
}

// Accumulates weight/bias gradients and returns the input gradient.
Batch conv_backward(const Batch& x, const Batch& dy, ConvLayer& layer) {
    Batch dx(x.n, x.c, x.h, x.w);
    auto& dw = layer.weight.grad;
    auto& db = layer.bias.grad;
    const auto& wv = layer.weight.value;
    for (int i = 0; i < dy.n; ++i)
        for (int oc = 0; oc < layer.out_c; ++oc)
            for (int oy = 0; oy < dy.h; ++oy)
                for (int ox = 0; ox < dy.w; ++ox) {
                    const double g = dy.at(i, oc, oy, ox);
                    if (g == 0.0) continue;
                    if (layer.has_bias) db[oc] += g;
                    for (int ic = 0; ic < layer.in_c; ++ic)
                        for (int ky = 0; ky < 3; ++ky) {
                            const int iy = oy * layer.stride - 1 + ky;
                            if (iy < 0 || iy >= x.h) continue;
                            const size_t wbase =
                                ((static_cast<size_t>(oc) * layer.in_c + ic) * 3 + ky) * 3;
                            const size_t xbase = x.idx(i, ic, iy, 0);
                            for (int kx = 0; kx < 3; ++kx) {
                                const int ix = ox * layer.stride - 1 + kx;
                                if (ix < 0 || ix >= x.w) continue;
                                dw[wbase + kx] += g * x.v[xbase + ix];
                                dx.v[xbase + ix] += g * wv[wbase + kx];
                            }
                        }
                }
    return dx;
}

struct BnCache {
    std::vector<double> inv_std;
    Batch xhat;
};

Batch bn_forward_train(const Batch& x, BatchNormLayer& bn, BnCache& cache, bool update_running) {
    const size_t per_c = static_cast<size_t>(x.n) * x.h * x.w;
    cache.inv_std.assign(x.c, 0.0);
    cache.xhat = Batch(x.n, x.c, x.h, x.w);
    Batch y(x.n, x.c, x.h, x.w);
    for (int ch = 0; ch < x.c; ++ch) {
        double mean = 0.0;
        for (int i = 0; i < x.n; ++i)
            for (int yy = 0; yy < x.h; ++yy)
                for (int xx = 0; xx < x.w; ++xx) mean += x.at(i, ch, yy, xx);
        mean /= static_cast<double>(per_c);
        double var = 0.0;
        for (int i = 0; i < x.n; ++i)
            for (int yy = 0; yy < x.h; ++yy)
                for (int xx = 0; xx < x.w; ++xx) {
                    const double d = x.at(i, ch, yy, xx) - mean;
                    var += d * d;
                }
        var /= static_cast<double>(per_c);
        const double inv_std = 1.0 / std::sqrt(var + bn.eps);
        cache.inv_std[ch] = inv_std;
        const double g = bn.gamma.value[ch];
        const double b = bn.beta.value[ch];
        for (int i = 0; i < x.n; ++i)
            for (int yy = 0; yy < x.h; ++yy)
                for (int xx = 0; xx < x.w; ++xx) {
                    const double xh = (x.at(i, ch, yy, xx) - mean) * inv_std;
                    cache.xhat.at(i, ch, yy, xx) = xh;
                    y.at(i, ch, yy, xx) = g * xh + b;
                }
        if (update_running) {
            bn.running_mean[ch] = bn.momentum * bn.running_mean[ch] + (1.0 - bn.momentum) * mean;
            bn.running_var[ch] = bn.momentum * bn.running_var[ch] + (1.0 - bn.momentum) * var;
        }
    }
    return y;
}

Batch bn_forward_eval(const Batch& x, const BatchNormLayer& bn) {
    Batch y(x.n, x.c, x.h, x.w);
    for (int ch = 0; ch < x.c; ++ch) {
        const double inv_std = 1.0 / std::sqrt(bn.running_var[ch] + bn.eps);
        const double g = bn.gamma.value[ch];
        const double b = bn.beta.value[ch];
        const double m = bn.running_mean[ch];
        for (int i = 0; i < x.n; ++i)
            for (int yy = 0; yy < x.h; ++yy)
                for (int xx = 0; xx < x.w; ++xx)
                    y.at(i, ch, yy, xx) = g * (x.at(i, ch, yy, xx) - m) * inv_std + b;
    }
    return y;
}

Batch bn_backward(const Batch& dy, BatchNormLayer& bn, const BnCache& cache) {
    const size_t per_c = static_cast<size_t>(dy.n) * dy.h * dy.w;
    Batch dx(dy.n, dy.c, dy.h, dy.w);
    for (int ch = 0; ch < dy.c; ++ch) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int i = 0; i < dy.n; ++i)
            for (int yy = 0; yy < dy.h; ++yy)
                for (int xx = 0; xx < dy.w; ++xx) {
                    const double g = dy.at(i, ch, yy, xx);
                    sum_dy += g;
                    sum_dy_xhat += g * cache.xhat.at(i, ch, yy, xx);
                }
        bn.beta.grad[ch] += sum_dy;
        bn.gamma.grad[ch] += sum_dy_xhat;
        const double mean_dy = sum_dy / static_cast<double>(per_c);
        const double mean_dy_xhat = sum_dy_xhat / static_cast<double>(per_c);
        const double scale = bn.gamma.value[ch] * cache.inv_std[ch];
        for (int i = 0; i < dy.n; ++i)
            for (int yy = 0; yy < dy.h; ++yy)
                for (int xx = 0; xx < dy.w; ++xx)
                    dx.at(i, ch, yy, xx) =
                        scale * (dy.at(i, ch, yy, xx) - mean_dy -
                                 cache.xhat.at(i, ch, yy, xx) * mean_dy_xhat);
    }
    return dx;
}

Batch relu_forward(const Batch& x) {
    Batch y = x;
    for (double& v : y.v) v = v > 0.0 ? v : 0.0;
    return y;
}

Batch relu_backward(const Batch& dy, const Batch& y) {
    Batch dx = dy;
    for (size_t i = 0; i < dx.v.size(); ++i)
        if (y.v[i] <= 0.0) dx.v[i] = 0.0;
    return dx;
}

Batch upsample2_forward(const Batch& x) {
    Batch y(x.n, x.c, x.h * 2, x.w * 2);
    for (int i = 0; i < x.n; ++i)
        for (int ch = 0; ch < x.c; ++ch)
            for (int yy = 0; yy < y.h; ++yy)
                for (int xx = 0; xx < y.w; ++xx)
                    y.at(i, ch, yy, xx) = x.at(i, ch, yy / 2, xx / 2);
    return y;
}

Batch upsample2_backward(const Batch& dy) {
    Batch dx(dy.n, dy.c, dy.h / 2, dy.w / 2);
    for (int i = 0; i < dy.n; ++i)
        for (int ch = 0; ch < dy.c; ++ch)
            for (int yy = 0; yy < dy.h; ++yy)
                for (int xx = 0; xx < dy.w; ++xx)
                    dx.at(i, ch, yy / 2, xx / 2) += dy.at(i, ch, yy, xx);
    return dx;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Numerically stable BCE with logits: max(z,0) - z t + log(1 + exp(-|z|)).
double bce_with_logits(double z, double t) {
    return std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
}

ConvLayer make_conv(int in_c, int out_c, int stride, bool with_bias, const std::string& name,
                    Rng& rng) {
    ConvLayer layer;
    layer.in_c = in_c;
    layer.out_c = out_c;
    layer.stride = stride;
    layer.has_bias = with_bias;
    layer.weight.name = name + ".weight";
    layer.weight.resize(static_cast<size_t>(out_c) * in_c * 9);
    layer.bias.name = name + ".bias";
    if (with_bias) layer.bias.resize(static_cast<size_t>(out_c));
    const double bound = std::sqrt(1.0 / (static_cast<double>(in_c) * 9.0));
    for (double& w : layer.weight.value) w = rng.uniform(-bound, bound);
    return layer;
}

BatchNormLayer make_bn(int channels, const std::string& name) {
    BatchNormLayer bn;
    bn.channels = channels;
    bn.gamma.name = name + ".gamma";
    bn.gamma.resize(static_cast<size_t>(channels));
    std::fill(bn.gamma.value.begin(), bn.gamma.value.end(), 1.0);
    bn.beta.name = name + ".beta";
    bn.beta.resize(static_cast<size_t>(channels));
    bn.running_mean.assign(static_cast<size_t>(channels), 0.0);
    bn.running_var.assign(static_cast<size_t>(channels), 1.0);
    return bn;
}

} // namespace

AutoencoderState::AutoencoderState(const AutoencoderSpec& spec, uint64_t seed) : spec_(spec) {
    if (spec.encoder_widths.size() != 4 || spec.decoder_widths.size() != 3)
        throw ConfigError("autoencoder requires 4 encoder widths and 3 decoder widths");
    if (spec.input_size < 8 || spec.input_size % 8 != 0)
        throw ConfigError("autoencoder input size must be a positive multiple of 8");
    Rng rng(mix_seed(seed, 0xae5eed));
    int in_c = 3;
    for (size_t i = 0; i < spec.encoder_widths.size(); ++i) {
        const int stride = i == 0 ? 1 : 2;
        enc_conv.push_back(make_conv(in_c, spec.encoder_widths[i], stride, false,
                                     "enc" + std::to_string(i), rng));
        enc_bn.push_back(make_bn(spec.encoder_widths[i], "enc" + std::to_string(i)));
        in_c = spec.encoder_widths[i];
    }
    for (size_t i = 0; i < spec.decoder_widths.size(); ++i) {
        dec_conv.push_back(make_conv(in_c, spec.decoder_widths[i], 1, false,
                                     "dec" + std::to_string(i), rng));
        dec_bn.push_back(make_bn(spec.decoder_widths[i], "dec" + std::to_string(i)));
        in_c = spec.decoder_widths[i];
    }
    final_conv = make_conv(in_c, 3, 1, true, "final", rng);
}

AutoencoderState ae_init(const AutoencoderSpec& spec, uint64_t seed) {
    return AutoencoderState(spec, seed);
}

std::vector<Param*> AutoencoderState::parameters() {
    std::vector<Param*> out;
    for (size_t i = 0; i < enc_conv.size(); ++i) {
        out.push_back(&enc_conv[i].weight);
        out.push_back(&enc_bn[i].gamma);
        out.push_back(&enc_bn[i].beta);
    }
    for (size_t i = 0; i < dec_conv.size(); ++i) {
        out.push_back(&dec_conv[i].weight);
        out.push_back(&dec_bn[i].gamma);
        out.push_back(&dec_bn[i].beta);
    }
    out.push_back(&final_conv.weight);
    out.push_back(&final_conv.bias);
    return out;
}

std::vector<const Param*> AutoencoderState::parameters() const {
    auto mut = const_cast<AutoencoderState*>(this)->parameters();
    return std::vector<const Param*>(mut.begin(), mut.end());
}

Image AutoencoderState::forward(const Image& patch) const {
    Image resized = patch;
    if (patch.width != spec_.input_size || patch.height != spec_.input_size)
        resized = resize_bilinear(patch, spec_.input_size, spec_.input_size);
    if (resized.channels != 3) throw ValidationError("autoencoder input must be 3-channel");

    Batch x = images_to_batch({resized});
    for (size_t i = 0; i < enc_conv.size(); ++i) {
        x = conv_forward(x, enc_conv[i]);
        x = bn_forward_eval(x, enc_bn[i]);
        x = relu_forward(x);
    }
    for (size_t i = 0; i < dec_conv.size(); ++i) {
        x = upsample2_forward(x);
        x = conv_forward(x, dec_conv[i]);
        x = bn_forward_eval(x, dec_bn[i]);
        x = relu_forward(x);
    }
    x = conv_forward(x, final_conv);

    Image out(spec_.input_size, spec_.input_size, 3);
    for (int ch = 0; ch < 3; ++ch)
        for (int yy = 0; yy < out.height; ++yy)
            for (int xx = 0; xx < out.width; ++xx) {
                const double y = sigmoid(x.at(0, ch, yy, xx));
                if (!std::isfinite(y))
                    throw ValidationError("autoencoder forward produced non-finite output");
                out.at(xx, yy, ch) = static_cast<float>(y);
            }
    return out;
}

double AutoencoderState::loss_only(const Batch& inputs) const {
    // Shares the training-mode path; running statistics stay untouched and
    // gradients are discarded by operating on a scratch copy.
    AutoencoderState scratch = *this;
    return scratch.loss_and_grad(inputs, false);
}

double AutoencoderState::loss_and_grad(const Batch& inputs, bool update_running) {
    for (Param* p : parameters()) std::fill(p->grad.begin(), p->grad.end(), 0.0);

    // Forward with caches.
    std::vector<Batch> conv_in;   // input of each conv, encoder then decoder then final
    std::vector<Batch> relu_out;  // output of each ReLU
    std::vector<BnCache> bn_caches(enc_bn.size() + dec_bn.size());

    Batch x = inputs;
    size_t bn_i = 0;
    for (size_t i = 0; i < enc_conv.size(); ++i) {
        conv_in.push_back(x);
        x = conv_forward(x, enc_conv[i]);
        x = bn_forward_train(x, enc_bn[i], bn_caches[bn_i++], update_running);
        x = relu_forward(x);
        relu_out.push_back(x);
    }
    for (size_t i = 0; i < dec_conv.size(); ++i) {
        x = upsample2_forward(x);
        conv_in.push_back(x);
        x = conv_forward(x, dec_conv[i]);
        x = bn_forward_train(x, dec_bn[i], bn_caches[bn_i++], update_running);
        x = relu_forward(x);
        relu_out.push_back(x);
    }
    conv_in.push_back(x);
    Batch logits = conv_forward(x, final_conv);

    // BCE against the inputs; dL/dz = (sigmoid(z) - t) / count.
    const double count = static_cast<double>(logits.v.size());
    double loss = 0.0;
    Batch dz(logits.n, logits.c, logits.h, logits.w);
    for (size_t i = 0; i < logits.v.size(); ++i) {
        const double z = logits.v[i];
        const double t = inputs.v[i];
        loss += bce_with_logits(z, t);
        dz.v[i] = (sigmoid(z) - t) / count;
    }
    loss /= count;
    if (!std::isfinite(loss)) throw TrainError("autoencoder loss is not finite");

    // Backward.
    Batch dx = conv_backward(conv_in.back(), dz, final_conv);
    bn_i = enc_bn.size() + dec_bn.size();
    for (size_t ri = dec_conv.size(); ri-- > 0;) {
        --bn_i;
        dx = relu_backward(dx, relu_out[enc_conv.size() + ri]);
        dx = bn_backward(dx, dec_bn[ri], bn_caches[bn_i]);
        dx = conv_backward(conv_in[enc_conv.size() + ri], dx, dec_conv[ri]);
        dx = upsample2_backward(dx);
    }
    for (size_t ri = enc_conv.size(); ri-- > 0;) {
        --bn_i;
        dx = relu_backward(dx, relu_out[ri]);
        dx = bn_backward(dx, enc_bn[ri], bn_caches[bn_i]);
        dx = conv_backward(conv_in[ri], dx, enc_conv[ri]);
    }
    return loss;
}

void AutoencoderState::adam_step(const TrainConfig& cfg) {
    ++adam_t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t));
    for (Param* p : parameters()) {
        for (size_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad[i];
            p->adam_m[i] = cfg.beta1 * p->adam_m[i] + (1.0 - cfg.beta1) * g;
            p->adam_v[i] = cfg.beta2 * p->adam_v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = p->adam_m[i] / bc1;
            const double vhat = p->adam_v[i] / bc2;
            p->value[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
    }
}

void AutoencoderState::quantize_to_f32() {
    // Volatile keeps the rounding from being folded away at high optimization.
    const auto snap = [](double& v) {
        volatile float f = static_cast<float>(v);
        v = static_cast<double>(f);
    };
    for (Param* p : parameters())
        for (double& v : p->value) snap(v);
    for (auto* bns : {&enc_bn, &dec_bn})
        for (auto& bn : *bns) {
            for (double& v : bn.running_mean) snap(v);
            for (double& v : bn.running_var) snap(v);
        }
}

std::vector<std::pair<std::string, std::vector<double>>> AutoencoderState::named_tensors() const {
    std::vector<std::pair<std::string, std::vector<double>>> out;
    for (const Param* p : parameters()) out.emplace_back(p->name, p->value);
    for (const auto* bns : {&enc_bn, &dec_bn})
        for (const auto& bn : *bns) {
            out.emplace_back(bn.gamma.name + ".running_mean", bn.running_mean);
            out.emplace_back(bn.gamma.name + ".running_var", bn.running_var);
        }
    return out;
}

void AutoencoderState::load_named_tensors(
    const std::vector<std::pair<std::string, std::vector<double>>>& tensors) {
    auto find = [&](const std::string& name) -> const std::vector<double>& {
        for (const auto& [n, v] : tensors)
            if (n == name) return v;
        throw FormatError("bundle is missing tensor '" + name + "'");
    };
    for (Param* p : parameters()) {
        const auto& v = find(p->name);
        if (v.size() != p->value.size())
            throw FormatError("bundle tensor '" + p->name + "' has wrong size");
        p->value = v;
    }
    for (auto* bns : {&enc_bn, &dec_bn})
        for (auto& bn : *bns) {
            bn.running_mean = find(bn.gamma.name + ".running_mean");
            bn.running_var = find(bn.gamma.name + ".running_var");
            if (bn.running_mean.size() != static_cast<size_t>(bn.channels) ||
                bn.running_var.size() != static_cast<size_t>(bn.channels))
                throw FormatError("bundle running statistics have wrong size");
        }
}

Batch images_to_batch(const std::vector<Image>& imgs) {
    if (imgs.empty()) throw ValidationError("empty batch");
    const int h = imgs[0].height, w = imgs[0].width, c = imgs[0].channels;
    Batch b(static_cast<int>(imgs.size()), c, h, w);
    for (size_t i = 0; i < imgs.size(); ++i) {
        const Image& img = imgs[i];
        if (img.width != w || img.height != h || img.channels != c)
            throw ValidationError("batch images must share dimensions");
        for (int ch = 0; ch < c; ++ch)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    b.at(static_cast<int>(i), ch, y, x) = img.at(x, y, ch);
    }
    return b;
}

TrainReport ae_train(AutoencoderState& state, const std::vector<Image>& patches,
                     const TrainConfig& cfg) {
    if (patches.empty()) throw ValidationError("training requires at least one patch");
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (cfg.learning_rate <= 0.0) throw ConfigError("learning rate must be > 0");
    if (cfg.batch_size < 1) throw ConfigError("batch size must be >= 1");

    const int side = state.spec().input_size;
    std::vector<Image> dataset;
    for (size_t i = 0; i < patches.size(); ++i) {
        Image p = patches[i];
        if (p.width != side || p.height != side) p = resize_bilinear(p, side, side);
        if (cfg.augment) {
            for (auto& aug : augment_patch(p, mix_seed(cfg.seed, 0xa06 + i), cfg.augmentation))
                dataset.push_back(std::move(aug));
        } else {
            dataset.push_back(std::move(p));
        }
    }

    Rng rng(mix_seed(cfg.seed, 0x7a14));
    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainReport report;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        size_t seen = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::vector<Image> batch_imgs;
            batch_imgs.reserve(stop - start);
            for (size_t i = start; i < stop; ++i) batch_imgs.push_back(dataset[order[i]]);
            const Batch batch = images_to_batch(batch_imgs);
            const double loss = state.loss_and_grad(batch, true);
            state.adam_step(cfg);
            epoch_loss += loss * static_cast<double>(stop - start);
            seen += stop - start;
        }
        report.epoch_loss.push_back(epoch_loss / static_cast<double>(seen));
    }
    state.quantize_to_f32();
    return report;
}

namespace {

float sample_clamped(const Image& img, double fx, double fy, int c) {
    fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wx = fx - x0, wy = fy - y0;
    const double top = (1.0 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
    const double bot = (1.0 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
    return static_cast<float>(std::clamp((1.0 - wy) * top + wy * bot, 0.0, 1.0));
}

// Output pixel (x,y) samples the input at the inverse-transformed position.
Image warp_affine(const Image& img, double a, double b, double c, double d) {
    const double cx = (img.width - 1) / 2.0;
    const double cy = (img.height - 1) / 2.0;
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double sx = a * dx + b * dy + cx;
            const double sy = c * dx + d * dy + cy;
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(x, y, ch) = sample_clamped(img, sx, sy, ch);
        }
    return out;
}

Image rotate90(const Image& img, int quarter_turns) {
    Image out = img;
    for (int t = 0; t < quarter_turns; ++t) {
        Image next(out.height, out.width, out.channels);
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x)
                for (int ch = 0; ch < out.channels; ++ch)
                    next.at(out.height - 1 - y, x, ch) = out.at(x, y, ch);
        out = std::move(next);
    }
    return out;
}

Image translate(const Image& img, int dx, int dy) {
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int sx = std::clamp(x - dx, 0, img.width - 1);
            const int sy = std::clamp(y - dy, 0, img.height - 1);
            for (int ch = 0; ch < img.channels; ++ch) out.at(x, y, ch) = img.at(sx, sy, ch);
        }
    return out;
}

} // namespace

std::vector<Image> augment_patch(const Image& patch, uint64_t seed, const AugmentConfig& cfg) {
    Rng rng(mix_seed(seed, 0xa06));
    std::vector<Image> out;
    out.push_back(patch);
    if (cfg.flips) {
        Image hflip(patch.width, patch.height, patch.channels);
        Image vflip(patch.width, patch.height, patch.channels);
        for (int y = 0; y < patch.height; ++y)
            for (int x = 0; x < patch.width; ++x)
                for (int ch = 0; ch < patch.channels; ++ch) {
                    hflip.at(patch.width - 1 - x, y, ch) = patch.at(x, y, ch);
                    vflip.at(x, patch.height - 1 - y, ch) = patch.at(x, y, ch);
                }
        out.push_back(std::move(hflip));
        out.push_back(std::move(vflip));
    }
    if (cfg.rotations) {
        out.push_back(rotate90(patch, 1));
        out.push_back(rotate90(patch, 2));
        out.push_back(rotate90(patch, 3));
        const double deg = rng.uniform(-cfg.max_rotation_deg, cfg.max_rotation_deg);
        const double rad = deg * 3.14159265358979323846 / 180.0;
        // Inverse rotation matrix.
        out.push_back(warp_affine(patch, std::cos(rad), std::sin(rad), -std::sin(rad),
                                  std::cos(rad)));
    }
    if (cfg.translations && cfg.max_translation > 0) {
        const int dx = rng.below_int(2 * cfg.max_translation + 1) - cfg.max_translation;
        const int dy = rng.below_int(2 * cfg.max_translation + 1) - cfg.max_translation;
        out.push_back(translate(patch, dx, dy));
    }
    if (cfg.shear && cfg.shear_factor != 0.0) {
        const double s = rng.uniform(-cfg.shear_factor, cfg.shear_factor);
        out.push_back(warp_affine(patch, 1.0, s, 0.0, 1.0));
    }
    return out;
}

ReconstructionResult reconstruction_errors(const AutoencoderState& state, const Image& patch) {
    const int side = state.spec().input_size;
    Image input = patch;
    if (patch.width != side || patch.height != side) input = resize_bilinear(patch, side, side);
    ReconstructionResult res;
    res.reconstruction = state.forward(input);
    double err[3] = {0.0, 0.0, 0.0};
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x)
                err[c] += std::abs(static_cast<double>(input.at(x, y, c)) -
                                   static_cast<double>(res.reconstruction.at(x, y, c)));
        err[c] /= static_cast<double>(side) * side;
    }
    res.error_r = err[0];
    res.error_g = err[1];
    res.error_b = err[2];
    return res;
}

} // namespace uavad
