#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavad/rng.hpp"
#include "uavad/types.hpp"

namespace uavad {

// Convolutional autoencoder: 4 encoder layers (3x3 conv + batch norm + ReLU,
// spatial downsampling x2 on layers 2-4) and 3 decoder layers (x2 nearest
// upsampling + 3x3 conv + batch norm + ReLU), then a final 3x3 conv to 3
// channels with per-pixel sigmoid. Output dimensions equal input dimensions.
struct AutoencoderSpec {
    int input_size = 32;
    std::vector<int> encoder_widths{16, 32, 64, 128};
    std::vector<int> decoder_widths{64, 32, 16};
};

struct AugmentConfig {
    bool flips = true;
    bool rotations = true;
    bool translations = true;
    bool shear = true;
    double max_rotation_deg = 15.0;
    int max_translation = 3;
    double shear_factor = 0.15;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 32;
    int epochs = 1;
    uint64_t seed = 0;
    bool augment = true;
    AugmentConfig augmentation;
};

// One learnable tensor plus its gradient and Adam moments.
struct Param {
    std::string name;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<double> adam_m;
    std::vector<double> adam_v;

    void resize(size_t n) {
        value.assign(n, 0.0);
        grad.assign(n, 0.0);
        adam_m.assign(n, 0.0);
        adam_v.assign(n, 0.0);
    }
};

// NCHW activation tensor in double precision.
struct Batch {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> v;

    Batch() = default;
    Batch(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
        v.assign(static_cast<size_t>(n_) * c_ * h_ * w_, 0.0);
    }
    size_t idx(int i, int ch, int y, int x) const {
        return ((static_cast<size_t>(i) * c + ch) * h + y) * w + x;
    }
    double at(int i, int ch, int y, int x) const { return v[idx(i, ch, y, x)]; }
    double& at(int i, int ch, int y, int x) { return v[idx(i, ch, y, x)]; }
};

struct ConvLayer {
    int in_c = 0, out_c = 0, stride = 1;
    bool has_bias = true; // convs feeding batch norm drop it (mean-cancelled)
    Param weight;         // out_c x in_c x 3 x 3
    Param bias;           // out_c, empty when has_bias is false
};

struct BatchNormLayer {
    int channels = 0;
    Param gamma;
    Param beta;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double momentum = 0.9;
    double eps = 1e-5;
};

struct TrainReport {
    std::vector<double> epoch_loss; // mean BCE per epoch, natural log
};

class AutoencoderState {
public:
    AutoencoderState() = default;
    AutoencoderState(const AutoencoderSpec& spec, uint64_t seed);

    const AutoencoderSpec& spec() const { return spec_; }

    // Inference-mode forward over a single patch (running batch statistics).
    Image forward(const Image& patch) const;

    // Training-mode loss (batch statistics); fills parameter gradients.
    double loss_and_grad(const Batch& inputs, bool update_running);

    // Training-mode loss without touching gradients or running statistics.
    double loss_only(const Batch& inputs) const;

    void adam_step(const TrainConfig& cfg);

    // All learnable parameters, in a fixed order.
    std::vector<Param*> parameters();
    std::vector<const Param*> parameters() const;

    // Snaps every parameter and running statistic to the nearest float32,
    // the precision the bundle format stores.
    void quantize_to_f32();

    // Serialization hooks for the bundle format.
    std::vector<std::pair<std::string, std::vector<double>>> named_tensors() const;
    void load_named_tensors(const std::vector<std::pair<std::string, std::vector<double>>>& t);

    std::vector<ConvLayer> enc_conv;
    std::vector<BatchNormLayer> enc_bn;
    std::vector<ConvLayer> dec_conv;
    std::vector<BatchNormLayer> dec_bn;
    ConvLayer final_conv;
    int64_t adam_t = 0;

private:
    AutoencoderSpec spec_;
};

AutoencoderState ae_init(const AutoencoderSpec& spec, uint64_t seed);

// Trains in place and reports the per-epoch loss curve. Patches are resized
// to the spec input size; augmentation multiplies the training set.
TrainReport ae_train(AutoencoderState& state, const std::vector<Image>& patches,
                     const TrainConfig& cfg);

// Original plus flipped, rotated, translated and sheared copies.
std::vector<Image> augment_patch(const Image& patch, uint64_t seed,
                                 const AugmentConfig& cfg = {});

struct ReconstructionResult {
    double error_r = 0.0;
    double error_g = 0.0;
    double error_b = 0.0;
    Image reconstruction;
};

// Per-channel mean absolute difference between the (resized) input and its
// reconstruction.
ReconstructionResult reconstruction_errors(const AutoencoderState& state, const Image& patch);

Batch images_to_batch(const std::vector<Image>& imgs);

} // namespace uavad
