#include "uavad/pipeline.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <json.hpp>

#include "uavad/bundle.hpp"
#include "uavad/errors.hpp"
#include "uavad/rng.hpp"

namespace uavad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json extraction_to_json(const ExtractionConfig& e) {
    json j;
    j["patch_size"] = e.extractor.patch_size;
    j["context_width"] = e.extractor.context_width;
    j["flow_vmax"] = e.extractor.flow_color.v_max;
    j["flow_source"] = e.flow_source == FlowSource::ground_truth ? "gt" : "computed";
    j["hs_smoothness"] = e.hs_params.smoothness;
    j["hs_iterations"] = e.hs_params.iterations;
    return j;
}

void extraction_from_json(const json& j, ExtractionConfig& e) {
    if (j.contains("patch_size")) e.extractor.patch_size = j["patch_size"].get<int>();
    if (j.contains("context_width")) e.extractor.context_width = j["context_width"].get<int>();
    if (j.contains("flow_vmax")) e.extractor.flow_color.v_max = j["flow_vmax"].get<double>();
    if (j.contains("flow_source")) {
        const std::string s = j["flow_source"].get<std::string>();
        if (s == "gt")
            e.flow_source = FlowSource::ground_truth;
        else if (s == "computed")
            e.flow_source = FlowSource::computed;
        else
            throw ConfigError("flow_source must be 'gt' or 'computed'");
    }
    if (j.contains("hs_smoothness")) e.hs_params.smoothness = j["hs_smoothness"].get<double>();
    if (j.contains("hs_iterations")) e.hs_params.iterations = j["hs_iterations"].get<int>();
}

} // namespace

PipelineConfig pipeline_config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("pipeline config: ") + e.what());
    }
    PipelineConfig cfg;
    try {
        if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
        if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
        if (j.contains("synth")) {
            const auto& s = j["synth"];
            if (s.contains("train"))
                cfg.train_scenario = scenario_from_json_text(s["train"].dump());
            if (s.contains("test")) cfg.test_scenario = scenario_from_json_text(s["test"].dump());
            if (s.contains("train_preset"))
                cfg.train_scenario =
                    preset_scenario(s["train_preset"].get<std::string>(), true,
                                    s.value("train_frames", 200), cfg.seed);
            if (s.contains("test_preset"))
                cfg.test_scenario =
                    preset_scenario(s["test_preset"].get<std::string>(), true,
                                    s.value("test_frames", 160), mix_seed(cfg.seed, 0x7e57));
        }
        if (j.contains("data")) {
            if (j["data"].contains("train_dir"))
                cfg.train_dir = fs::path(j["data"]["train_dir"].get<std::string>());
            if (j["data"].contains("test_dir"))
                cfg.test_dir = fs::path(j["data"]["test_dir"].get<std::string>());
        }
        if (j.contains("autoencoder")) {
            const auto& a = j["autoencoder"];
            if (a.contains("input_size")) cfg.ae_spec.input_size = a["input_size"].get<int>();
            if (a.contains("encoder_widths"))
                cfg.ae_spec.encoder_widths = a["encoder_widths"].get<std::vector<int>>();
            if (a.contains("decoder_widths"))
                cfg.ae_spec.decoder_widths = a["decoder_widths"].get<std::vector<int>>();
            if (a.contains("epochs")) cfg.ae_train.epochs = a["epochs"].get<int>();
            if (a.contains("batch_size")) cfg.ae_train.batch_size = a["batch_size"].get<int>();
            if (a.contains("learning_rate"))
                cfg.ae_train.learning_rate = a["learning_rate"].get<double>();
            if (a.contains("augment")) cfg.ae_train.augment = a["augment"].get<bool>();
            if (a.contains("max_patches")) cfg.max_train_patches = a["max_patches"].get<size_t>();
        }
        if (j.contains("extraction")) extraction_from_json(j["extraction"], cfg.extraction);
        if (j.contains("inference")) {
            const auto& i = j["inference"];
            if (i.contains("k1")) cfg.inference.k1 = i["k1"].get<int>();
            if (i.contains("k2")) cfg.inference.k2 = i["k2"].get<int>();
            if (i.contains("mu")) cfg.inference.mu = i["mu"].get<double>();
            if (i.contains("eta")) cfg.inference.eta = i["eta"].get<double>();
            if (i.contains("kernel"))
                cfg.inference.kernel = i["kernel"].get<std::string>() == "linear"
                                           ? KernelType::linear
                                           : KernelType::rbf;
            if (i.contains("c")) cfg.inference.c = i["c"].get<double>();
            if (i.contains("gamma")) cfg.inference.gamma = i["gamma"].get<double>();
            if (i.contains("n")) cfg.n_anomalous = i["n"].get<int>();
            if (i.contains("max_normal")) cfg.max_normal_samples = i["max_normal"].get<size_t>();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("pipeline config: ") + e.what());
    }
    cfg.ae_train.seed = mix_seed(cfg.seed, 0xae);
    cfg.inference.seed = mix_seed(cfg.seed, 0x1f);
    return cfg;
}

PipelineConfig pipeline_config_from_json_file(const fs::path& path) {
    return pipeline_config_from_json_text(read_file(path));
}

std::string pipeline_config_to_json_text(const PipelineConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir.string();
    if (cfg.train_scenario)
        j["synth"]["train"] = json::parse(scenario_to_json_text(*cfg.train_scenario));
    if (cfg.test_scenario)
        j["synth"]["test"] = json::parse(scenario_to_json_text(*cfg.test_scenario));
    if (cfg.train_dir) j["data"]["train_dir"] = cfg.train_dir->string();
    if (cfg.test_dir) j["data"]["test_dir"] = cfg.test_dir->string();
    j["autoencoder"] = {{"input_size", cfg.ae_spec.input_size},
                        {"encoder_widths", cfg.ae_spec.encoder_widths},
                        {"decoder_widths", cfg.ae_spec.decoder_widths},
                        {"epochs", cfg.ae_train.epochs},
                        {"batch_size", cfg.ae_train.batch_size},
                        {"learning_rate", cfg.ae_train.learning_rate},
                        {"augment", cfg.ae_train.augment},
                        {"max_patches", cfg.max_train_patches}};
    j["extraction"] = extraction_to_json(cfg.extraction);
    j["inference"] = {{"k1", cfg.inference.k1},
                      {"k2", cfg.inference.k2},
                      {"mu", cfg.inference.mu},
                      {"eta", cfg.inference.eta},
                      {"kernel", cfg.inference.kernel == KernelType::rbf ? "rbf" : "linear"},
                      {"c", cfg.inference.c},
                      {"gamma", cfg.inference.gamma},
                      {"n", cfg.n_anomalous},
                      {"max_normal", cfg.max_normal_samples}};
    return j.dump(2) + "\n";
}

namespace {

fs::path train_data_dir(const PipelineConfig& cfg) {
    if (cfg.train_dir) return *cfg.train_dir;
    return cfg.out_dir / "train_ds";
}

fs::path test_data_dir(const PipelineConfig& cfg) {
    if (cfg.test_dir) return *cfg.test_dir;
    return cfg.out_dir / "test_ds";
}

void require_artifact(const fs::path& p, const std::string& producer) {
    if (!fs::exists(p))
        throw ConfigError("missing input artifact " + p.string() + " (produced by the " +
                          producer + " stage)");
}

} // namespace

void stage_synth(const PipelineConfig& cfg) {
    if (!cfg.train_scenario && !cfg.test_scenario)
        throw ConfigError("synth stage requested but no scenario configured");
    if (cfg.train_scenario) {
        ScenarioConfig sc = *cfg.train_scenario;
        const SynthDataset ds = render_dataset(generate_scenario(sc), sc);
        write_synth_dataset(ds, cfg.out_dir / "train_ds", "train");
    }
    if (cfg.test_scenario) {
        ScenarioConfig sc = *cfg.test_scenario;
        const SynthDataset ds = render_dataset(generate_scenario(sc), sc);
        write_synth_dataset(ds, cfg.out_dir / "test_ds", "test");
    }
}

void stage_train_ae(const PipelineConfig& cfg) {
    const fs::path data = train_data_dir(cfg);
    require_artifact(data / "annotations.csv", "synth");
    const LoadedDataset ds = load_dataset_dir(data);
    const PatchSets patches =
        gather_training_patches(ds, cfg.extraction, cfg.max_train_patches, cfg.seed);

    ModelBundle bundle;
    bundle.ae_appearance = ae_init(cfg.ae_spec, mix_seed(cfg.seed, 0x0a));
    TrainConfig app_cfg = cfg.ae_train;
    app_cfg.seed = mix_seed(cfg.seed, 0x0b);
    ae_train(*bundle.ae_appearance, patches.appearance, app_cfg);

    bundle.ae_temporal = ae_init(cfg.ae_spec, mix_seed(cfg.seed, 0x0c));
    TrainConfig tmp_cfg = cfg.ae_train;
    tmp_cfg.seed = mix_seed(cfg.seed, 0x0d);
    ae_train(*bundle.ae_temporal, patches.temporal, tmp_cfg);

    save_bundle(bundle, cfg.out_dir / "bundle");
}

void stage_extract(const PipelineConfig& cfg) {
    const fs::path bundle_dir = cfg.out_dir / "bundle";
    require_artifact(bundle_dir / "appearance.json", "train-ae");
    require_artifact(bundle_dir / "temporal.json", "train-ae");
    const ModelBundle bundle = load_bundle(bundle_dir);

    for (const auto& [dir, out_name] :
         {std::pair{train_data_dir(cfg), "features_train.csv"},
          std::pair{test_data_dir(cfg), "features_test.csv"}}) {
        require_artifact(dir / "annotations.csv", "synth");
        const LoadedDataset ds = load_dataset_dir(dir);
        const auto rows =
            extract_dataset_features(ds, *bundle.ae_appearance, *bundle.ae_temporal,
                                     cfg.extraction);
        save_feature_table(rows, cfg.out_dir / out_name);
    }
}

LabeledPools split_pools(const std::vector<FeatureRow>& rows,
                         const std::vector<FrameAnnotation>& frame_labels,
                         const std::vector<AnomalyInjection>& anomalies) {
    std::map<int, int> frame_map;
    for (const auto& a : frame_labels) frame_map[a.frame_index] = a.label;
    LabeledPools pools;
    for (const auto& row : rows) {
        int label;
        if (!anomalies.empty()) {
            label = object_label(anomalies, row.frame_index, row.object_id);
        } else {
            const auto it = frame_map.find(row.frame_index);
            label = it == frame_map.end() ? 0 : it->second;
        }
        (label == 1 ? pools.anomalies : pools.normals).push_back(row.descriptor.flat_vec());
    }
    return pools;
}

namespace {

std::vector<std::vector<double>> subsample_pool(std::vector<std::vector<double>> pool,
                                                size_t limit, uint64_t seed) {
    if (pool.size() <= limit) return pool;
    std::vector<size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(limit);
    std::sort(idx.begin(), idx.end());
    std::vector<std::vector<double>> out;
    for (size_t i : idx) out.push_back(std::move(pool[i]));
    return out;
}

} // namespace

void stage_train_infer(const PipelineConfig& cfg) {
    const fs::path features_path = cfg.out_dir / "features_train.csv";
    require_artifact(features_path, "extract");
    const auto rows = load_feature_table(features_path);

    const fs::path data = train_data_dir(cfg);
    require_artifact(data / "annotations.csv", "synth");
    const auto frame_labels = load_frame_annotations(data / "annotations.csv");
    std::vector<AnomalyInjection> anomalies;
    if (fs::exists(data / "manifest.json")) anomalies = load_dataset_dir(data).anomalies;

    LabeledPools pools = split_pools(rows, frame_labels, anomalies);
    pools.normals = subsample_pool(std::move(pools.normals), cfg.max_normal_samples,
                                   mix_seed(cfg.seed, 0x90));
    pools.anomalies = subsample_pool(std::move(pools.anomalies),
                                     static_cast<size_t>(std::max(0, cfg.n_anomalous)),
                                     mix_seed(cfg.seed, 0x91));

    InferenceConfig icfg = cfg.inference;
    if (cfg.n_anomalous == 0 || pools.anomalies.empty()) {
        icfg.k2 = 0;
        pools.anomalies.clear();
    }
    const InferenceModel model = ensemble_fit(pools.normals, pools.anomalies, icfg);

    ModelBundle bundle;
    bundle.inference = model;
    save_bundle(bundle, cfg.out_dir / "bundle");
}

std::vector<ScoreRow> score_feature_table(const InferenceModel& model,
                                          const std::vector<FeatureRow>& rows,
                                          const std::vector<int>& frames) {
    std::map<int, std::vector<ObjectVerdict>> by_frame;
    for (int f : frames) by_frame[f];
    for (const auto& row : rows)
        by_frame[row.frame_index].push_back(score_descriptor(model, row.descriptor.flat_vec()));
    std::vector<ScoreRow> out;
    for (const auto& [frame, verdicts] : by_frame) {
        const ScoredFrame sf = frame_anomaly_score(frame, verdicts);
        out.push_back(ScoreRow{frame, sf.score, sf.anomalous ? "anomalous" : "normal"});
    }
    return out;
}

void stage_score(const PipelineConfig& cfg) {
    const fs::path bundle_dir = cfg.out_dir / "bundle";
    require_artifact(bundle_dir / "inference.json", "train-infer");
    const fs::path features_path = cfg.out_dir / "features_test.csv";
    require_artifact(features_path, "extract");

    const ModelBundle bundle = load_bundle(bundle_dir);
    const auto rows = load_feature_table(features_path);

    std::vector<int> frames;
    const fs::path ann_path = test_data_dir(cfg) / "annotations.csv";
    if (fs::exists(ann_path))
        for (const auto& a : load_frame_annotations(ann_path)) frames.push_back(a.frame_index);

    const auto scores = score_feature_table(*bundle.inference, rows, frames);
    save_scores(scores, cfg.out_dir / "scores.csv");
}

void stage_evaluate(const PipelineConfig& cfg) {
    const fs::path scores_path = cfg.out_dir / "scores.csv";
    require_artifact(scores_path, "score");
    const fs::path ann_path = test_data_dir(cfg) / "annotations.csv";
    require_artifact(ann_path, "synth");

    const auto score_rows = load_scores(scores_path);
    const auto annotations = load_frame_annotations(ann_path);
    std::map<int, double> score_map;
    for (const auto& r : score_rows) score_map[r.frame_index] = r.score;

    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& a : annotations) {
        const auto it = score_map.find(a.frame_index);
        scores.push_back(it == score_map.end() ? 0.0 : it->second);
        labels.push_back(a.label);
    }
    const RocCurve curve = roc_auc(scores, labels);

    std::string roc_csv = "fpr,tpr\n";
    for (const auto& [fpr, tpr] : curve.points)
        roc_csv += format_double(fpr) + "," + format_double(tpr) + "\n";
    atomic_write_file(cfg.out_dir / "roc_curve.csv", roc_csv);

    char buf[128];
    std::snprintf(buf, sizeof(buf), "frames,%zu\npositives,%d\nauc,%.6f\n", labels.size(),
                  static_cast<int>(std::accumulate(labels.begin(), labels.end(), 0)), curve.auc);
    atomic_write_file(cfg.out_dir / "report.txt", buf);
}

void run_pipeline(const PipelineConfig& cfg, const std::vector<std::string>& stages) {
    if (cfg.out_dir.empty()) throw ConfigError("pipeline requires an output directory");
    std::vector<std::string> selected = stages.empty() ? kPipelineStages : stages;
    for (const auto& s : selected)
        if (std::find(kPipelineStages.begin(), kPipelineStages.end(), s) == kPipelineStages.end())
            throw ConfigError("unknown pipeline stage '" + s + "'");

    // Run in canonical order regardless of the order given.
    for (const auto& stage : kPipelineStages) {
        if (std::find(selected.begin(), selected.end(), stage) == selected.end()) continue;
        try {
            if (stage == "synth")
                stage_synth(cfg);
            else if (stage == "train-ae")
                stage_train_ae(cfg);
            else if (stage == "extract")
                stage_extract(cfg);
            else if (stage == "train-infer")
                stage_train_infer(cfg);
            else if (stage == "score")
                stage_score(cfg);
            else if (stage == "evaluate")
                stage_evaluate(cfg);
        } catch (const Error& e) {
            throw ConfigError("stage '" + stage + "' failed: " + e.what());
        }
    }

    const std::string echo = pipeline_config_to_json_text(cfg);
    json manifest;
    manifest["config"] = json::parse(echo);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(echo.data(), echo.size())));
    manifest["config_hash"] = hash;
    manifest["stages"] = selected;
    manifest["format_version"] = kBundleFormatVersion;
    atomic_write_file(cfg.out_dir / "run_manifest.json", manifest.dump(2) + "\n");
}

} // namespace uavad
