#include <doctest.h>

#include <cmath>

#include "uavad/autoencoder.hpp"
#include "uavad/rng.hpp"

using namespace uavad;

namespace {

const AutoencoderSpec kTinySpec{8, {2, 2, 2, 2}, {2, 2, 2}};

Image random_patch(int side, uint64_t seed) {
    Image img(side, side, 3);
    Rng rng(seed);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform(0.05, 0.95));
    return img;
}

} // namespace

TEST_CASE("ae_init: seeding and architecture contract") {
    SUBCASE("same seed twice gives identical weights") {
        const AutoencoderState a = ae_init(kTinySpec, 42);
        const AutoencoderState b = ae_init(kTinySpec, 42);
        const auto pa = a.parameters();
        const auto pb = b.parameters();
        REQUIRE(pa.size() == pb.size());
        for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value == pb[i]->value);
    }
    SUBCASE("different seeds differ somewhere") {
        const AutoencoderState a = ae_init(kTinySpec, 1);
        const AutoencoderState b = ae_init(kTinySpec, 2);
        bool any_diff = false;
        const auto pa = a.parameters();
        const auto pb = b.parameters();
        for (size_t i = 0; i < pa.size(); ++i)
            if (pa[i]->value != pb[i]->value) any_diff = true;
        CHECK(any_diff);
    }
    SUBCASE("32x32 spec reconstructs at input shape") {
        const AutoencoderState ae = ae_init(AutoencoderSpec{}, 7);
        const Image out = ae.forward(random_patch(32, 3));
        CHECK(out.width == 32);
        CHECK(out.height == 32);
        CHECK(out.channels == 3);
    }
}

TEST_CASE("ae_forward") {
    AutoencoderState ae = ae_init(kTinySpec, 5);

    SUBCASE("zero final layer gives sigmoid(0) = 0.5 everywhere") {
        std::fill(ae.final_conv.weight.value.begin(), ae.final_conv.weight.value.end(), 0.0);
        std::fill(ae.final_conv.bias.value.begin(), ae.final_conv.bias.value.end(), 0.0);
        const Image out = ae.forward(random_patch(8, 1));
        for (float v : out.data) CHECK(v == doctest::Approx(0.5));
    }
    SUBCASE("outputs lie strictly inside (0,1)") {
        const Image out = ae.forward(random_patch(8, 2));
        for (float v : out.data) {
            CHECK(v > 0.0f);
            CHECK(v < 1.0f);
        }
    }
    SUBCASE("identical inputs give identical outputs") {
        const Image patch = random_patch(8, 3);
        CHECK(ae.forward(patch).data == ae.forward(patch).data);
    }
    SUBCASE("input of another size is resized to the spec") {
        const Image out = ae.forward(random_patch(13, 4));
        CHECK(out.width == 8);
        CHECK(out.height == 8);
    }
}

TEST_CASE("gradient check: analytic vs central differences on the reduced spec") {
    AutoencoderState ae = ae_init(kTinySpec, 77);
    const Batch batch = images_to_batch({random_patch(8, 10), random_patch(8, 11),
                                         random_patch(8, 12)});

    // Analytic gradients at the current parameters.
    ae.loss_and_grad(batch, false);
    std::vector<std::vector<double>> analytic;
    for (const Param* p : ae.parameters()) analytic.push_back(p->grad);

    const double eps = 1e-5;
    double max_rel = 0.0;
    const auto params = ae.parameters();
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Param* p = params[pi];
        for (size_t i = 0; i < p->value.size(); ++i) {
            const double saved = p->value[i];
            p->value[i] = saved + eps;
            const double lp = ae.loss_only(batch);
            p->value[i] = saved - eps;
            const double lm = ae.loss_only(batch);
            p->value[i] = saved;
            const double numeric = (lp - lm) / (2.0 * eps);
            const double a = analytic[pi][i];
            // 1e-6 floor: central differences at eps=1e-5 resolve the
            // loss only to ~1e-11, so smaller gradients are pure FD noise.
            const double rel =
                std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
            max_rel = std::max(max_rel, rel);
        }
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("ae_train") {
    SUBCASE("constant patch converges to the analytic BCE floor") {
        const double t = 0.3;
        Image patch(8, 8, 3);
        for (auto& v : patch.data) v = static_cast<float>(t);
        AutoencoderState ae = ae_init(kTinySpec, 9);
        TrainConfig cfg;
        cfg.epochs = 200;
        cfg.learning_rate = 0.02;
        cfg.augment = false;
        cfg.seed = 1;
        const TrainReport report = ae_train(ae, {patch}, cfg);
        const double floor = -(t * std::log(t) + (1.0 - t) * std::log(1.0 - t));
        CHECK(std::abs(report.epoch_loss.back() - floor) < 1e-2);
    }
    SUBCASE("zero epochs rejected") {
        AutoencoderState ae = ae_init(kTinySpec, 9);
        TrainConfig cfg;
        cfg.epochs = 0;
        CHECK_THROWS_AS(ae_train(ae, {random_patch(8, 1)}, cfg), ConfigError);
    }
    SUBCASE("empty training set rejected") {
        AutoencoderState ae = ae_init(kTinySpec, 9);
        CHECK_THROWS_AS(ae_train(ae, {}, TrainConfig{}), ValidationError);
    }
    SUBCASE("same data and seed reproduce identical weights") {
        const std::vector<Image> data{random_patch(8, 1), random_patch(8, 2),
                                      random_patch(8, 3)};
        TrainConfig cfg;
        cfg.epochs = 5;
        cfg.seed = 33;
        AutoencoderState a = ae_init(kTinySpec, 4);
        AutoencoderState b = ae_init(kTinySpec, 4);
        ae_train(a, data, cfg);
        ae_train(b, data, cfg);
        const auto pa = a.parameters();
        const auto pb = b.parameters();
        for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value == pb[i]->value);
    }
    SUBCASE("loss is non-increasing within a 5% transient band") {
        std::vector<Image> data;
        for (int i = 0; i < 6; ++i) data.push_back(random_patch(8, 100 + i));
        AutoencoderState ae = ae_init(kTinySpec, 8);
        TrainConfig cfg;
        cfg.epochs = 30;
        cfg.learning_rate = 5e-3;
        cfg.augment = false;
        cfg.seed = 2;
        const TrainReport report = ae_train(ae, data, cfg);
        double best = report.epoch_loss.front();
        for (double loss : report.epoch_loss) {
            CHECK(loss <= best * 1.05);
            best = std::min(best, loss);
        }
        CHECK(report.epoch_loss.back() < report.epoch_loss.front());
    }
}

TEST_CASE("augment_patch") {
    // Left half white, right half black.
    Image patch(8, 8, 3);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 4; ++x)
            for (int c = 0; c < 3; ++c) patch.at(x, y, c) = 1.0f;

    SUBCASE("emits original plus transforms") {
        const auto out = augment_patch(patch, 1);
        CHECK(out.size() >= 8);
        CHECK(out[0].data == patch.data);
    }
    SUBCASE("horizontal flip swaps the halves") {
        AugmentConfig cfg;
        cfg.rotations = cfg.translations = cfg.shear = false;
        const auto out = augment_patch(patch, 1, cfg);
        REQUIRE(out.size() == 3); // original, hflip, vflip
        const Image& h = out[1];
        CHECK(h.at(0, 0, 0) == 0.0f);
        CHECK(h.at(7, 0, 0) == 1.0f);
    }
    SUBCASE("180 degree rotation twice returns the original") {
        AugmentConfig cfg;
        cfg.flips = cfg.translations = cfg.shear = false;
        const auto once = augment_patch(patch, 1, cfg);
        // once[2] is the 180-degree rotation
        const auto twice = augment_patch(once[2], 1, cfg);
        CHECK(twice[2].data == patch.data);
    }
    SUBCASE("augmented outputs stay in [0,1]") {
        const auto out = augment_patch(patch, 3);
        for (const auto& img : out)
            for (float v : img.data) {
                CHECK(v >= 0.0f);
                CHECK(v <= 1.0f);
            }
    }
    SUBCASE("same seed reproduces the randomized transforms") {
        const auto a = augment_patch(patch, 5);
        const auto b = augment_patch(patch, 5);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].data == b[i].data);
    }
}

TEST_CASE("reconstruction_errors basics") {
    AutoencoderState ae = ae_init(kTinySpec, 5);

    SUBCASE("all-one input with 0.5 output gives 0.5 per channel") {
        // Zero final layer forces output 0.5.
        std::fill(ae.final_conv.weight.value.begin(), ae.final_conv.weight.value.end(), 0.0);
        std::fill(ae.final_conv.bias.value.begin(), ae.final_conv.bias.value.end(), 0.0);
        Image ones(8, 8, 3);
        for (auto& v : ones.data) v = 1.0f;
        const ReconstructionResult res = reconstruction_errors(ae, ones);
        CHECK(res.error_r == doctest::Approx(0.5));
        CHECK(res.error_g == doctest::Approx(0.5));
        CHECK(res.error_b == doctest::Approx(0.5));
    }
    SUBCASE("errors are non-negative") {
        const ReconstructionResult res = reconstruction_errors(ae, random_patch(8, 6));
        CHECK(res.error_r >= 0.0);
        CHECK(res.error_g >= 0.0);
        CHECK(res.error_b >= 0.0);
    }
}

TEST_CASE("anomaly signal: trained autoencoder reconstructs familiar patches better") {
    // Train on green-ish textured patches; novel patches are red.
    std::vector<Image> train;
    Rng rng(50);
    for (int i = 0; i < 12; ++i) {
        Image p(8, 8, 3);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                p.at(x, y, 0) = static_cast<float>(rng.uniform(0.0, 0.15));
                p.at(x, y, 1) = static_cast<float>(rng.uniform(0.5, 0.8));
                p.at(x, y, 2) = static_cast<float>(rng.uniform(0.0, 0.15));
            }
        train.push_back(std::move(p));
    }
    AutoencoderState ae = ae_init(kTinySpec, 60);
    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.learning_rate = 0.01;
    cfg.augment = false;
    cfg.seed = 3;
    ae_train(ae, train, cfg);

    double err_known = 0.0, err_novel = 0.0;
    for (int i = 0; i < 6; ++i) {
        Image known(8, 8, 3), novel(8, 8, 3);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                known.at(x, y, 0) = static_cast<float>(rng.uniform(0.0, 0.15));
                known.at(x, y, 1) = static_cast<float>(rng.uniform(0.5, 0.8));
                known.at(x, y, 2) = static_cast<float>(rng.uniform(0.0, 0.15));
                novel.at(x, y, 0) = static_cast<float>(rng.uniform(0.7, 1.0));
                novel.at(x, y, 1) = static_cast<float>(rng.uniform(0.0, 0.2));
                novel.at(x, y, 2) = static_cast<float>(rng.uniform(0.0, 0.2));
            }
        const auto rk = reconstruction_errors(ae, known);
        const auto rn = reconstruction_errors(ae, novel);
        err_known += rk.error_r + rk.error_g + rk.error_b;
        err_novel += rn.error_r + rn.error_g + rn.error_b;
    }
    CHECK(err_known < err_novel);
}
