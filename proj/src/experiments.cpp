#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "uavad/bundle.hpp"
#include "uavad/dataset.hpp"
#include "uavad/eval.hpp"
#include "uavad/io.hpp"
#include "uavad/pipeline.hpp"
#include "uavad/rng.hpp"
#include "uavad/synth.hpp"

namespace uavad {

namespace fs = std::filesystem;

namespace {

// Desk-scale settings shared by the experiment harness. The autoencoder is a
// reduced instance of the same architecture so five seeded repetitions stay
// inside the runtime budget.
struct ExperimentScale {
    int train_frames = 240;
    int test_frames = 200;
    int ae_input = 16;
    std::vector<int> enc_widths{8, 16, 32, 64};
    std::vector<int> dec_widths{32, 16, 8};
    int ae_epochs = 12;
    double ae_lr = 2e-3;
    size_t max_patches = 240;
    size_t max_normals = 300;
    size_t max_anomalies = 100;
};

ExperimentScale scale_for(const ExperimentOptions& opts) {
    ExperimentScale s;
    if (opts.quick) {
        s.train_frames = 100;
        s.test_frames = 80;
        s.ae_epochs = 3;
        s.max_patches = 80;
        s.max_normals = 120;
        s.max_anomalies = 40;
    }
    return s;
}

std::vector<double> project_dims(const std::vector<double>& x, int begin, int end) {
    return std::vector<double>(x.begin() + begin, x.begin() + end);
}

// Per-seed prepared data: extracted train/test descriptors plus labels.
struct Prepared {
    std::vector<std::vector<double>> normals;   // train pool
    std::vector<std::vector<double>> anomalies; // train pool
    EvalDataset eval;                           // 22-dim test view
    std::vector<std::vector<double>> test_objects; // flat per-detection view
    std::vector<int> test_object_labels;           // manifest-derived
};

Prepared prepare_family(const std::string& family, uint64_t seed, const ExperimentScale& scale) {
    const ScenarioConfig train_sc =
        preset_scenario(family, true, scale.train_frames, mix_seed(seed, 0x51));
    const ScenarioConfig test_sc =
        preset_scenario(family, true, scale.test_frames, mix_seed(seed, 0x52));
    const LoadedDataset train_ds =
        dataset_from_synth(render_dataset(generate_scenario(train_sc), train_sc), "train");
    const LoadedDataset test_ds =
        dataset_from_synth(render_dataset(generate_scenario(test_sc), test_sc), "test");

    ExtractionConfig extraction;
    extraction.extractor.patch_size = scale.ae_input;
    extraction.flow_source = FlowSource::ground_truth;

    AutoencoderSpec spec;
    spec.input_size = scale.ae_input;
    spec.encoder_widths = scale.enc_widths;
    spec.decoder_widths = scale.dec_widths;

    TrainConfig tc;
    tc.epochs = scale.ae_epochs;
    tc.learning_rate = scale.ae_lr;
    tc.augment = false; // the synthetic patch distribution is already dense

    const PatchSets patches =
        gather_training_patches(train_ds, extraction, scale.max_patches, mix_seed(seed, 0x53));
    AutoencoderState ae_app = ae_init(spec, mix_seed(seed, 0x54));
    tc.seed = mix_seed(seed, 0x55);
    ae_train(ae_app, patches.appearance, tc);
    AutoencoderState ae_tmp = ae_init(spec, mix_seed(seed, 0x56));
    tc.seed = mix_seed(seed, 0x57);
    ae_train(ae_tmp, patches.temporal, tc);

    const auto train_rows = extract_dataset_features(train_ds, ae_app, ae_tmp, extraction);
    const auto test_rows = extract_dataset_features(test_ds, ae_app, ae_tmp, extraction);

    Prepared prep;
    LabeledPools pools = split_pools(train_rows, train_ds.annotations, train_ds.anomalies);
    Rng rng(mix_seed(seed, 0x58));
    rng.shuffle(pools.normals);
    rng.shuffle(pools.anomalies);
    if (pools.normals.size() > scale.max_normals) pools.normals.resize(scale.max_normals);
    if (pools.anomalies.size() > scale.max_anomalies) pools.anomalies.resize(scale.max_anomalies);
    prep.normals = std::move(pools.normals);
    prep.anomalies = std::move(pools.anomalies);

    for (const auto& row : test_rows) {
        prep.test_objects.push_back(row.descriptor.flat_vec());
        prep.test_object_labels.push_back(
            object_label(test_ds.anomalies, row.frame_index, row.object_id));
    }

    std::map<int, std::vector<std::vector<double>>> groups;
    for (const auto& a : test_ds.annotations) groups[a.frame_index];
    for (const auto& row : test_rows)
        groups[row.frame_index].push_back(row.descriptor.flat_vec());
    for (const auto& a : test_ds.annotations) {
        prep.eval.test_frames.push_back(a.frame_index);
        prep.eval.test_labels.push_back(a.label);
        prep.eval.test_descriptors.push_back(groups[a.frame_index]);
    }
    prep.eval.train_normals = prep.normals;
    prep.eval.train_anomalies = prep.anomalies;
    return prep;
}

// Restricts a prepared dataset to a contiguous descriptor slice.
Prepared slice_dims(const Prepared& full, int begin, int end) {
    Prepared out;
    for (const auto& x : full.normals) out.normals.push_back(project_dims(x, begin, end));
    for (const auto& x : full.anomalies) out.anomalies.push_back(project_dims(x, begin, end));
    out.eval.train_normals = out.normals;
    out.eval.train_anomalies = out.anomalies;
    out.eval.test_frames = full.eval.test_frames;
    out.eval.test_labels = full.eval.test_labels;
    for (const auto& group : full.eval.test_descriptors) {
        std::vector<std::vector<double>> g;
        for (const auto& x : group) g.push_back(project_dims(x, begin, end));
        out.eval.test_descriptors.push_back(std::move(g));
    }
    return out;
}

int distinct_count(std::vector<std::vector<double>> pool) {
    std::sort(pool.begin(), pool.end());
    return static_cast<int>(std::unique(pool.begin(), pool.end()) - pool.begin());
}

double fit_and_auc(const Prepared& prep, int n_anomalous, int k1, int k2, uint64_t seed) {
    InferenceConfig cfg;
    cfg.seed = seed;
    std::vector<std::vector<double>> anoms;
    // Feature subsets (contextual-only in particular) can hold fewer distinct
    // points than requested clusters; cap so every cluster stays non-empty.
    cfg.k1 = std::max(1, std::min(k1, distinct_count(prep.normals)));
    if (n_anomalous > 0 && !prep.anomalies.empty()) {
        anoms = prep.anomalies;
        Rng rng(mix_seed(seed, 0x59));
        rng.shuffle(anoms);
        if (anoms.size() > static_cast<size_t>(n_anomalous)) anoms.resize(n_anomalous);
        cfg.k2 = std::max(1, std::min(k2, distinct_count(anoms)));
    } else {
        cfg.k2 = 0;
    }
    const InferenceModel model = ensemble_fit(prep.normals, anoms, cfg);
    const auto [scores, labels] = score_eval_dataset(model, prep.eval);
    return roc_auc(scores, labels).auc;
}

struct Collector {
    std::vector<std::string> lines{"variant,seed,auc"};
    std::map<std::string, std::vector<double>> by_variant;
    std::vector<std::string> variant_order;

    void add(const std::string& variant, uint64_t seed, double auc) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%llu,%.6f", variant.c_str(),
                      static_cast<unsigned long long>(seed), auc);
        lines.emplace_back(buf);
        if (!by_variant.count(variant)) variant_order.push_back(variant);
        by_variant[variant].push_back(auc);
    }

    void finish(ExperimentResult& result) {
        for (const auto& variant : variant_order) {
            const auto& v = by_variant[variant];
            const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,mean,%.6f", variant.c_str(), mean);
            lines.emplace_back(buf);
            result.mean_auc.emplace_back(variant, mean);
        }
        result.report_lines = lines;
    }
};

void write_report(const fs::path& out_dir, const ExperimentResult& result) {
    std::string csv;
    for (const auto& line : result.report_lines) csv += line + "\n";
    atomic_write_file(out_dir / "report.csv", csv);
}

} // namespace

ExperimentResult run_experiment(const std::string& name, const fs::path& out_dir,
                                const ExperimentOptions& opts) {
    const ExperimentScale scale = scale_for(opts);
    ExperimentResult result;
    result.name = name;
    Collector collect;
    fs::create_directories(out_dir);

    if (name == "context-ablation") {
        std::string curves = "seed,frame,score_with,score_without\n";
        for (int s = 0; s < opts.seeds; ++s) {
            const uint64_t seed = mix_seed(opts.base_seed, 0xc0 + s);
            const Prepared full = prepare_family("context", seed, scale);
            const Prepared no_ctx = slice_dims(full, 4, 22);
            collect.add("with-context", seed, fit_and_auc(full, 60, 4, 3, seed));
            collect.add("without-context", seed, fit_and_auc(no_ctx, 60, 4, 3, seed));
            if (s == 0) {
                // Frame-score timelines of the first repetition.
                InferenceConfig cfg;
                cfg.seed = seed;
                const auto model_with = ensemble_fit(full.normals, full.anomalies, cfg);
                const auto model_without = ensemble_fit(no_ctx.normals, no_ctx.anomalies, cfg);
                const auto [sw, lw] = score_eval_dataset(model_with, full.eval);
                const auto [so, lo] = score_eval_dataset(model_without, no_ctx.eval);
                std::vector<std::pair<double, double>> pw, po;
                for (size_t f = 0; f < sw.size(); ++f) {
                    char buf[160];
                    std::snprintf(buf, sizeof(buf), "%llu,%d,%.6f,%.6f\n",
                                  static_cast<unsigned long long>(seed), full.eval.test_frames[f],
                                  sw[f], so[f]);
                    curves += buf;
                    pw.emplace_back(full.eval.test_frames[f], sw[f]);
                    po.emplace_back(full.eval.test_frames[f], so[f]);
                }
                write_svg_chart(out_dir / "frame_scores.svg", "Frame anomaly score",
                                {{"with context", pw}, {"without context", po}});

                // 2-D PCA view of the test descriptors with and without the
                // contextual block, normal vs anomalous objects.
                std::string pca_csv = "variant,label,x,y\n";
                for (const auto& [variant, begin, end] :
                     {std::tuple{"with", 0, 22}, {"without", 4, 22}}) {
                    std::vector<std::vector<double>> pts;
                    for (const auto& x : full.test_objects)
                        pts.push_back(project_dims(x, begin, end));
                    const PcaProjection proj = pca_project_2d(pts);
                    std::vector<std::pair<double, double>> normal_pts, anom_pts;
                    for (size_t i = 0; i < pts.size(); ++i) {
                        char buf[160];
                        std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f\n", variant,
                                      full.test_object_labels[i], proj.points[i][0],
                                      proj.points[i][1]);
                        pca_csv += buf;
                        (full.test_object_labels[i] ? anom_pts : normal_pts)
                            .emplace_back(proj.points[i][0], proj.points[i][1]);
                    }
                    write_svg_scatter(out_dir / (std::string("pca_") + variant + "_context.svg"),
                                      std::string("PCA of descriptors (") + variant +
                                          " context)",
                                      {{"normal", normal_pts}, {"anomalous", anom_pts}});
                }
                atomic_write_file(out_dir / "pca.csv", pca_csv);
            }
        }
        collect.finish(result);
        atomic_write_file(out_dir / "curves.csv", curves);
    } else if (name == "fewshot-ablation") {
        const std::vector<int> n_values{0, 20, 40, 60};
        for (int s = 0; s < opts.seeds; ++s) {
            const uint64_t seed = mix_seed(opts.base_seed, 0xf0 + s);
            const Prepared prep = prepare_family("local", seed, scale);
            for (int n : n_values) {
                // n = 0 is the normal-only configuration with 5 clusters.
                const double auc = n == 0 ? fit_and_auc(prep, 0, 5, 0, seed)
                                          : fit_and_auc(prep, n, 4, 3, seed);
                collect.add("n" + std::to_string(n), seed, auc);
            }
        }
        collect.finish(result);
        std::string curves = "n,mean_auc\n";
        std::vector<std::pair<double, double>> pts;
        for (int n : n_values) {
            const double mean = result.mean("n" + std::to_string(n));
            curves += std::to_string(n) + "," + format_double(mean) + "\n";
            pts.emplace_back(n, mean);
        }
        atomic_write_file(out_dir / "curves.csv", curves);
        write_svg_chart(out_dir / "auc_vs_n.svg", "AUC vs anomalous training samples",
                        {{"ensemble", pts}});
    } else if (name == "baseline-comparison") {
        const std::vector<std::tuple<std::string, int, int>> subsets = {
            {"contextual", 0, 4}, {"temporal", 4, 13}, {"appearance", 13, 22}, {"full", 0, 22}};
        for (int s = 0; s < opts.seeds; ++s) {
            const uint64_t seed = mix_seed(opts.base_seed, 0xb0 + s);
            const Prepared full = prepare_family("context", seed, scale);
            for (const auto& [label, begin, end] : subsets) {
                const Prepared sub = begin == 0 && end == 22 ? full : slice_dims(full, begin, end);
                collect.add("baseline-" + label, seed, fit_and_auc(sub, 0, 5, 0, seed));
                collect.add("ours-" + label, seed, fit_and_auc(sub, 60, 4, 3, seed));
            }
        }
        collect.finish(result);
        std::string curves = "variant,mean_auc\n";
        for (const auto& [variant, mean] : result.mean_auc)
            curves += variant + "," + format_double(mean) + "\n";
        atomic_write_file(out_dir / "curves.csv", curves);
    } else {
        throw ConfigError("unknown experiment '" + name + "'");
    }

    write_report(out_dir, result);
    return result;
}

} // namespace uavad
