// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its runtime so the whole gate is auditable from the ctest log.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "uavad/autoencoder.hpp"
#include "uavad/bundle.hpp"
#include "uavad/eval.hpp"
#include "uavad/features.hpp"
#include "uavad/io.hpp"
#include "uavad/pipeline.hpp"
#include "uavad/rng.hpp"
#include "uavad/synth.hpp"

using namespace uavad;
namespace fs = std::filesystem;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, const char* name, bool pass, double seconds) {
    std::printf("[acceptance %02d] %-4s %-34s (%.2fs)\n", criterion, pass ? "PASS" : "FAIL", name,
                seconds);
    std::fflush(stdout);
    CHECK_MESSAGE(pass, name);
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("uavad_accept_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("criterion 1: AUC matches the pairwise oracle") {
    Timer timer;
    Rng rng(101);
    bool pass = true;
    for (int trial = 0; trial < 200 && pass; ++trial) {
        const int n = 2 + rng.below_int(199);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) {
            // Mix continuous and quantized scores so ties occur.
            scores.push_back(trial % 2 == 0 ? rng.uniform01() : rng.below(10) / 9.0);
            labels.push_back(rng.below_int(2));
        }
        labels[0] = 0;
        labels[1 % n] = 1;
        const double fast = roc_auc(scores, labels).auc;
        const double oracle = auc_pairwise_oracle(scores, labels);
        if (std::abs(fast - oracle) >= 1e-9) pass = false;
    }
    const double secs = timer.seconds();
    report(1, "auc-oracle-equivalence", pass && secs < 5.0, secs);
}

TEST_CASE("criterion 2: SMO matches a dense QP solve and satisfies KKT") {
    Timer timer;
    Rng rng(202);
    bool pass = true;

    for (int trial = 0; trial < 50 && pass; ++trial) {
        const int n_pos = 3 + rng.below_int(8);
        const int n_neg = 3 + rng.below_int(8);
        std::vector<std::vector<double>> pos, neg;
        const double spread = rng.uniform(0.5, 3.0);
        for (int i = 0; i < n_pos; ++i)
            pos.push_back({rng.normal() * spread + 1.0, rng.normal() * spread});
        for (int i = 0; i < n_neg; ++i)
            neg.push_back({rng.normal() * spread - 1.0, rng.normal() * spread});

        SvmParams params;
        params.kernel = trial % 2 == 0 ? KernelType::rbf : KernelType::linear;
        params.gamma = rng.uniform(0.2, 2.0);
        params.c = trial % 3 == 0 ? 5.0 : 1.0;

        const SvmSolution sol = svm_solve_dual(pos, neg, params);
        if (sol.max_kkt_violation >= 1e-3) {
            pass = false;
            break;
        }

        // Dense QP oracle on the same problem data.
        const size_t n = pos.size() + neg.size();
        std::vector<std::vector<double>> x(pos.begin(), pos.end());
        x.insert(x.end(), neg.begin(), neg.end());
        std::vector<double> y(n, -1.0);
        for (size_t i = 0; i < pos.size(); ++i) y[i] = 1.0;
        const double c_pos = params.c * n / (2.0 * pos.size());
        const double c_neg = params.c * n / (2.0 * neg.size());
        std::vector<double> box(n);
        for (size_t i = 0; i < n; ++i) box[i] = y[i] > 0 ? c_pos : c_neg;
        std::vector<std::vector<double>> q(n, std::vector<double>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                double k;
                if (params.kernel == KernelType::linear) {
                    k = x[i][0] * x[j][0] + x[i][1] * x[j][1];
                } else {
                    const double d2 = (x[i][0] - x[j][0]) * (x[i][0] - x[j][0]) +
                                      (x[i][1] - x[j][1]) * (x[i][1] - x[j][1]);
                    k = std::exp(-params.gamma * d2);
                }
                q[i][j] = y[i] * y[j] * k;
            }
        const auto oracle = oracles::solve_svm_dual_qp(q, y, box);
        if (std::abs(sol.dual_objective - oracle.objective) >= 1e-3) pass = false;
    }

    // XOR with the rbf kernel must reach training accuracy 1.
    {
        SvmParams params;
        params.kernel = KernelType::rbf;
        params.gamma = 1.0;
        params.c = 10.0;
        const CalibratedSvm svm =
            svm_train({{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 0.0}}, params);
        for (const auto& p : {std::vector<double>{0, 0}, {1, 1}})
            if (svm.decision(p) <= 0.0) pass = false;
        for (const auto& q2 : {std::vector<double>{0, 1}, {1, 0}})
            if (svm.decision(q2) >= 0.0) pass = false;
    }

    const double secs = timer.seconds();
    report(2, "svm-qp-oracle-and-kkt", pass && secs < 30.0, secs);
}

TEST_CASE("criterion 3: k-means reaches the exhaustive-partition optimum") {
    Timer timer;
    Rng rng(303);
    bool pass = true;
    for (int trial = 0; trial < 30 && pass; ++trial) {
        const int n = 3 + rng.below_int(6); // 3..8
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
        KMeansOptions opts;
        opts.restarts = 50;
        const KMeansModel model = kmeans_fit(pts, 2, 3000 + trial, opts);
        const double best = oracles::best_two_partition_objective(pts);
        if (std::abs(model.objective - best) > 1e-9 * std::max(1.0, best)) pass = false;
    }
    const double secs = timer.seconds();
    report(3, "kmeans-exhaustive-optimum", pass && secs < 10.0, secs);
}

TEST_CASE("criterion 4: autoencoder gradients match central differences") {
    Timer timer;
    AutoencoderState ae = ae_init(AutoencoderSpec{8, {2, 2, 2, 2}, {2, 2, 2}}, 404);
    std::vector<Image> patches;
    for (int i = 0; i < 3; ++i) {
        Image p(8, 8, 3);
        Rng rng(900 + i);
        for (auto& v : p.data) v = static_cast<float>(rng.uniform(0.05, 0.95));
        patches.push_back(std::move(p));
    }
    const Batch batch = images_to_batch(patches);

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
    const double secs = timer.seconds();
    std::printf("[acceptance 04] max relative gradient error %.3e\n", max_rel);
    report(4, "autoencoder-gradient-check", max_rel < 1e-4 && secs < 60.0, secs);
}

TEST_CASE("criterion 5: first-order statistics match the scalar-loop oracle") {
    Timer timer;
    Rng rng(505);
    bool pass = true;
    for (int trial = 0; trial < 100 && pass; ++trial) {
        const int n = 1 + rng.below_int(400);
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform01();
        if (trial % 10 == 0) std::fill(v.begin(), v.end(), rng.uniform01()); // degenerate case

        const FirstOrderStats s = first_order_stats(v);

        // Independent scalar loop.
        const double count = static_cast<double>(n);
        double mean = 0.0, energy = 0.0;
        for (double x : v) {
            mean += x;
            energy += x * x;
        }
        mean /= count;
        energy /= count;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double x : v) {
            m2 += (x - mean) * (x - mean);
            m3 += (x - mean) * (x - mean) * (x - mean);
            m4 += (x - mean) * (x - mean) * (x - mean) * (x - mean);
        }
        m2 /= count;
        m3 /= count;
        m4 /= count;
        const double skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
        const double kurt = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
        double hist[256] = {0};
        for (double x : v) {
            int bin = static_cast<int>(x * 256.0);
            if (bin > 255) bin = 255;
            hist[bin] += 1.0;
        }
        double entropy = 0.0;
        for (double c : hist)
            if (c > 0.0) entropy -= (c / count) * std::log2(c / count);

        const auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
        if (!close(s.mean, mean) || !close(s.variance, m2) || !close(s.kurtosis, kurt) ||
            !close(s.energy, energy) || !close(s.skewness, skew) || !close(s.entropy, entropy))
            pass = false;
    }
    report(5, "first-order-stats-oracle", pass, timer.seconds());
}

TEST_CASE("criterion 6: context ablation ordering on contextual anomalies") {
    Timer timer;
    ExperimentOptions opts;
    opts.seeds = 5;
    opts.base_seed = 606;
    const ExperimentResult result =
        run_experiment("context-ablation", fresh_dir("ctx"), opts);
    const double with_ctx = result.mean("with-context");
    const double without_ctx = result.mean("without-context");
    const double secs = timer.seconds();
    std::printf("[acceptance 06] mean auc with context %.4f, without %.4f\n", with_ctx,
                without_ctx);
    report(6, "context-ablation-ordering", with_ctx - without_ctx >= 0.05 && secs < 600.0, secs);
}

TEST_CASE("criterion 7: few-shot ordering on local anomalies") {
    Timer timer;
    ExperimentOptions opts;
    opts.seeds = 5;
    opts.base_seed = 707;
    const ExperimentResult result =
        run_experiment("fewshot-ablation", fresh_dir("fewshot"), opts);
    const double n60 = result.mean("n60");
    const double n0 = result.mean("n0");
    const double secs = timer.seconds();
    std::printf("[acceptance 07] mean auc at n=60 %.4f, at n=0 %.4f\n", n60, n0);
    report(7, "fewshot-ordering", n60 - n0 >= 0.02 && secs < 600.0, secs);
}

TEST_CASE("criterion 8: decision rule over the 101x101 grid") {
    Timer timer;
    bool pass = true;
    const double mu = 0.5, eta = 0.5;
    for (int ai = 0; ai <= 100; ++ai) {
        for (int bi = 0; bi <= 100; ++bi) {
            const double alpha = ai / 100.0;
            const double beta = bi / 100.0;
            const ObjectVerdict v = classify_object(alpha, beta, mu, eta);

            // Trichotomy: exactly one label, matching the stated conditions.
            const bool is_normal = alpha > beta && alpha > mu;
            const bool is_anom = alpha < beta && beta > eta;
            if (is_normal && v.label != VerdictLabel::normal) pass = false;
            if (is_anom && v.label != VerdictLabel::anomalous) pass = false;
            if (!is_normal && !is_anom && v.label != VerdictLabel::unknown) pass = false;
            if (is_normal && is_anom) pass = false; // conditions must be exclusive

            // Alarm on unknown: only the normal label avoids the alarm.
            const ScoredFrame frame = frame_anomaly_score(0, {v});
            if ((v.label != VerdictLabel::normal) != frame.anomalous) pass = false;

            // Score definition and bounds.
            if (std::abs(v.score - (1.0 + beta - alpha) / 2.0) > 1e-15) pass = false;
            if (v.score < 0.0 || v.score > 1.0) pass = false;

            // Strict monotonicity against the neighboring grid cells.
            if (ai > 0) {
                const ObjectVerdict left = classify_object((ai - 1) / 100.0, beta, mu, eta);
                if (!(v.score < left.score)) pass = false;
            }
            if (bi > 0) {
                const ObjectVerdict down = classify_object(alpha, (bi - 1) / 100.0, mu, eta);
                if (!(v.score > down.score)) pass = false;
            }
        }
    }
    report(8, "decision-rule-grid", pass, timer.seconds());
}

TEST_CASE("criterion 9: pipeline determinism and round-trip regression") {
    Timer timer;
    const auto make_cfg = [](const fs::path& out) {
        PipelineConfig cfg;
        cfg.seed = 909;
        cfg.out_dir = out;
        cfg.train_scenario = preset_scenario("local", true, 80, 909);
        cfg.test_scenario = preset_scenario("local", true, 60, mix_seed(909, 2));
        cfg.ae_spec = AutoencoderSpec{8, {2, 4, 4, 8}, {4, 4, 2}};
        cfg.ae_train.epochs = 2;
        cfg.ae_train.augment = false;
        cfg.ae_train.seed = mix_seed(909, 0xae);
        cfg.extraction.extractor.patch_size = 8;
        cfg.max_train_patches = 50;
        cfg.inference.k1 = 3;
        cfg.inference.k2 = 2;
        cfg.inference.seed = mix_seed(909, 0x1f);
        cfg.n_anomalous = 24;
        cfg.max_normal_samples = 150;
        return cfg;
    };

    const fs::path out_a = fresh_dir("det_a");
    const fs::path out_b = fresh_dir("det_b");
    run_pipeline(make_cfg(out_a), {});
    run_pipeline(make_cfg(out_b), {});

    bool pass = true;
    for (const char* artifact : {"scores.csv", "bundle/appearance.bin", "bundle/temporal.bin",
                                 "bundle/inference.bin"})
        if (read_file(out_a / artifact) != read_file(out_b / artifact)) pass = false;

    // Save/load round trip: rescoring with the reloaded bundle reproduces
    // scores.csv byte for byte.
    const ModelBundle reloaded = load_bundle(out_a / "bundle");
    const auto rows = load_feature_table(out_a / "features_test.csv");
    std::vector<int> frames;
    for (const auto& a : load_frame_annotations(out_a / "test_ds" / "annotations.csv"))
        frames.push_back(a.frame_index);
    const auto rescored = score_feature_table(*reloaded.inference, rows, frames);
    save_scores(rescored, out_a / "scores_rescored.csv");
    if (read_file(out_a / "scores.csv") != read_file(out_a / "scores_rescored.csv")) pass = false;

    // And a second save of the reloaded bundle is byte-identical.
    const fs::path resaved = fresh_dir("det_resave");
    save_bundle(reloaded, resaved);
    for (const char* artifact : {"appearance.bin", "temporal.bin", "inference.bin"})
        if (read_file(out_a / "bundle" / artifact) != read_file(resaved / artifact)) pass = false;

    report(9, "pipeline-determinism", pass, timer.seconds());
}

TEST_CASE("criterion 10: format conformance on corrupted and valid fixtures") {
    Timer timer;
    const fs::path dir = fresh_dir("fmt");
    bool pass = true;
    const auto expect_throw = [&](auto&& fn, const char* what) {
        try {
            fn();
            std::printf("[acceptance 10] missing rejection: %s\n", what);
            pass = false;
        } catch (const Error&) {
        }
    };
    const auto write_bytes = [](const fs::path& p, const std::string& bytes) {
        atomic_write_file(p, bytes);
    };

    // Corrupted magic tags.
    write_bytes(dir / "bad.flo", "XXXXrest");
    expect_throw([&] { load_flow_field(dir / "bad.flo"); }, "flo magic");
    write_bytes(dir / "bad.pgm", std::string("P6\n1 1\n255\n") + '\x00');
    expect_throw([&] { load_class_mask(dir / "bad.pgm"); }, "pgm magic");
    write_bytes(dir / "bad.ppm", std::string("P5\n1 1\n255\n") + '\x00');
    expect_throw([&] { load_image_ppm(dir / "bad.ppm"); }, "ppm magic");

    // Corrupted size fields.
    {
        FlowField f;
        f.width = 2;
        f.height = 2;
        f.u.assign(4, 1.0f);
        f.v.assign(4, 2.0f);
        save_flow_field(f, dir / "short.flo");
        std::string bytes = read_file(dir / "short.flo");
        bytes.resize(bytes.size() - 8);
        write_bytes(dir / "short.flo", bytes);
        expect_throw([&] { load_flow_field(dir / "short.flo"); }, "flo truncation");
    }
    write_bytes(dir / "short.pgm", std::string("P5\n4 4\n255\n") + "abc");
    expect_throw([&] { load_class_mask(dir / "short.pgm"); }, "pgm truncation");
    write_bytes(dir / "bad.jsonl",
                R"({"video":"v","frame":0,"id":0,"class":"vehicle","bbox":[0,0,0,4]})"
                "\n");
    expect_throw([&] { load_detections(dir / "bad.jsonl"); }, "jsonl invariant");
    write_bytes(dir / "bad.csv", "frame,label\n0,7\n");
    expect_throw([&] { load_frame_annotations(dir / "bad.csv"); }, "label range");

    // Valid fixtures round trip losslessly.
    {
        Rng rng(1010);
        FlowField f;
        f.width = 5;
        f.height = 4;
        f.u.resize(20);
        f.v.resize(20);
        for (size_t i = 0; i < 20; ++i) {
            f.u[i] = static_cast<float>(rng.uniform(-9, 9));
            f.v[i] = static_cast<float>(rng.uniform(-9, 9));
        }
        save_flow_field(f, dir / "good.flo");
        const FlowField back = load_flow_field(dir / "good.flo");
        if (back.u != f.u || back.v != f.v) pass = false;

        ClassMask m;
        m.width = 6;
        m.height = 3;
        m.labels.resize(18);
        for (auto& l : m.labels) l = static_cast<uint8_t>(rng.below(4));
        save_class_mask(m, dir / "good.pgm");
        if (load_class_mask(dir / "good.pgm").labels != m.labels) pass = false;

        Image img(4, 3, 3);
        for (auto& v : img.data) v = static_cast<float>(rng.below(256)) / 255.0f;
        save_image_ppm(img, dir / "good.ppm");
        const Image img_back = load_image_ppm(dir / "good.ppm");
        if (img_back.data != img.data) pass = false; // exact: multiples of 1/255

        std::vector<DetectionRecord> dets{{"v", 0, 1, ObjectClass::human, {3, 4, 5, 6}}};
        save_detections(dets, dir / "good.jsonl");
        if (load_detections(dir / "good.jsonl") != dets) pass = false;
    }

    report(10, "format-conformance", pass, timer.seconds());
}
