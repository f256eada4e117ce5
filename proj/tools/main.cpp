#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavad/bundle.hpp"
#include "uavad/dataset.hpp"
#include "uavad/eval.hpp"
#include "uavad/io.hpp"
#include "uavad/pipeline.hpp"
#include "uavad/rng.hpp"
#include "uavad/synth.hpp"

namespace fs = std::filesystem;
using namespace uavad;

namespace {

int verbosity() {
    const char* env = std::getenv("UAVAD_LOG");
    return env ? std::atoi(env) : 1;
}

void log_line(const std::string& msg) {
    if (verbosity() > 0) std::cout << msg << "\n";
}

struct GridSearchConfig {
    fs::path train_features, test_features, train_labels, test_labels;
    fs::path train_manifest; // optional, enables object-level labels
    ParameterGrids grids;
    InferenceConfig base;
    size_t max_normals = 300;
    uint64_t seed = 1;
};

GridSearchConfig grid_config_from_file(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("gridsearch config: ") + e.what());
    }
    GridSearchConfig cfg;
    cfg.train_features = j.at("train_features").get<std::string>();
    cfg.test_features = j.at("test_features").get<std::string>();
    cfg.train_labels = j.at("train_labels").get<std::string>();
    cfg.test_labels = j.at("test_labels").get<std::string>();
    if (j.contains("train_manifest")) cfg.train_manifest = j["train_manifest"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("max_normals")) cfg.max_normals = j["max_normals"].get<size_t>();
    if (j.contains("grids")) {
        const auto& g = j["grids"];
        if (g.contains("k1")) cfg.grids.k1 = g["k1"].get<std::vector<int>>();
        if (g.contains("k2")) cfg.grids.k2 = g["k2"].get<std::vector<int>>();
        if (g.contains("n")) cfg.grids.n = g["n"].get<std::vector<int>>();
        if (g.contains("mu")) cfg.grids.mu = g["mu"].get<std::vector<double>>();
        if (g.contains("eta")) cfg.grids.eta = g["eta"].get<std::vector<double>>();
    }
    return cfg;
}

std::vector<AnomalyInjection> manifest_anomalies(const fs::path& path) {
    std::vector<AnomalyInjection> out;
    nlohmann::json manifest = nlohmann::json::parse(read_file(path));
    for (const auto& a : manifest.value("anomalies", nlohmann::json::array())) {
        AnomalyInjection inj;
        inj.type = anomaly_type_from_string(a.at("type").get<std::string>());
        inj.start_frame = a.at("start").get<int>();
        inj.end_frame = a.at("end").get<int>();
        inj.agents = a.at("agents").get<std::vector<int>>();
        out.push_back(std::move(inj));
    }
    return out;
}

EvalDataset build_eval_dataset(const GridSearchConfig& cfg) {
    const auto train_rows = load_feature_table(cfg.train_features);
    const auto test_rows = load_feature_table(cfg.test_features);
    const auto train_ann = load_frame_annotations(cfg.train_labels);
    const auto test_ann = load_frame_annotations(cfg.test_labels);
    std::vector<AnomalyInjection> anomalies;
    if (!cfg.train_manifest.empty()) anomalies = manifest_anomalies(cfg.train_manifest);

    LabeledPools pools = split_pools(train_rows, train_ann, anomalies);
    if (pools.normals.size() > cfg.max_normals) {
        Rng rng(mix_seed(cfg.seed, 0x6d));
        rng.shuffle(pools.normals);
        pools.normals.resize(cfg.max_normals);
    }

    EvalDataset ds;
    ds.train_normals = std::move(pools.normals);
    ds.train_anomalies = std::move(pools.anomalies);
    std::map<int, std::vector<std::vector<double>>> groups;
    for (const auto& a : test_ann) groups[a.frame_index];
    for (const auto& row : test_rows)
        groups[row.frame_index].push_back(row.descriptor.flat_vec());
    for (const auto& a : test_ann) {
        ds.test_frames.push_back(a.frame_index);
        ds.test_labels.push_back(a.label);
        ds.test_descriptors.push_back(groups[a.frame_index]);
    }
    return ds;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Object-centric video anomaly detection pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    std::string synth_config, synth_out;
    uint64_t synth_seed = 0;
    bool synth_seed_set = false;
    synth_cmd->add_option("--config", synth_config, "Scenario JSON")->required();
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--seed", synth_seed, "Override the scenario seed")
        ->each([&](const std::string&) { synth_seed_set = true; });

    // train-ae
    auto* trainae_cmd = app.add_subcommand("train-ae", "Train one autoencoder");
    std::string ae_role, ae_data, ae_out, ae_config;
    uint64_t ae_seed = 1;
    trainae_cmd->add_option("--role", ae_role, "appearance|temporal")->required();
    trainae_cmd->add_option("--data", ae_data, "Dataset directory")->required();
    trainae_cmd->add_option("--out", ae_out, "Bundle directory")->required();
    trainae_cmd->add_option("--config", ae_config, "Pipeline config JSON (optional)");
    trainae_cmd->add_option("--seed", ae_seed, "Seed");

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "Extract object descriptors");
    std::string ex_bundle, ex_data, ex_out, ex_flow = "gt";
    extract_cmd->add_option("--bundle", ex_bundle, "Bundle directory")->required();
    extract_cmd->add_option("--data", ex_data, "Dataset directory")->required();
    extract_cmd->add_option("--out", ex_out, "Output features CSV")->required();
    extract_cmd->add_option("--flow", ex_flow, "gt|computed");

    // train-infer
    auto* ti_cmd = app.add_subcommand("train-infer", "Fit the inference ensemble");
    std::string ti_features, ti_labels, ti_manifest, ti_out;
    InferenceConfig ti_cfg;
    int ti_n = 60;
    uint64_t ti_seed = 1;
    size_t ti_max_normals = 300;
    ti_cmd->add_option("--features", ti_features, "Training features CSV")->required();
    ti_cmd->add_option("--labels", ti_labels, "Frame annotations CSV")->required();
    ti_cmd->add_option("--manifest", ti_manifest, "Dataset manifest for object-level labels");
    ti_cmd->add_option("--out", ti_out, "Bundle directory")->required();
    ti_cmd->add_option("--k1", ti_cfg.k1, "Normal clusters");
    ti_cmd->add_option("--k2", ti_cfg.k2, "Anomalous clusters");
    ti_cmd->add_option("--mu", ti_cfg.mu, "Normal-acceptance threshold");
    ti_cmd->add_option("--eta", ti_cfg.eta, "Anomaly-acceptance threshold");
    ti_cmd->add_option("--c", ti_cfg.c, "SVM C");
    ti_cmd->add_option("--gamma", ti_cfg.gamma, "rbf gamma (<=0 selects automatic)");
    ti_cmd->add_option("--n", ti_n, "Anomalous training samples");
    ti_cmd->add_option("--max-normal", ti_max_normals, "Normal sample cap");
    ti_cmd->add_option("--seed", ti_seed, "Seed");
    std::string ti_kernel = "rbf";
    ti_cmd->add_option("--kernel", ti_kernel, "rbf|linear");

    // score
    auto* score_cmd = app.add_subcommand("score", "Score a feature table");
    std::string sc_bundle, sc_features, sc_out, sc_labels;
    score_cmd->add_option("--bundle", sc_bundle, "Bundle directory")->required();
    score_cmd->add_option("--features", sc_features, "Features CSV")->required();
    score_cmd->add_option("--out", sc_out, "Output scores CSV")->required();
    score_cmd->add_option("--labels", sc_labels, "Annotations CSV naming the frames to score");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Frame-level ROC/AUC");
    std::string ev_scores, ev_labels, ev_roc;
    eval_cmd->add_option("--scores", ev_scores, "Scores CSV")->required();
    eval_cmd->add_option("--labels", ev_labels, "Annotations CSV")->required();
    eval_cmd->add_option("--roc", ev_roc, "Write the ROC curve CSV here");

    // gridsearch
    auto* grid_cmd = app.add_subcommand("gridsearch", "Parameter grid search");
    std::string gs_config, gs_out;
    grid_cmd->add_option("--config", gs_config, "Grid search config JSON")->required();
    grid_cmd->add_option("--out", gs_out, "Report CSV path")->required();

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Scripted synthetic studies");
    std::string exp_name, exp_out;
    int exp_seeds = 5;
    uint64_t exp_seed = 1;
    bool exp_quick = false;
    exp_cmd->add_option("--name", exp_name,
                        "context-ablation|fewshot-ablation|baseline-comparison")
        ->required();
    exp_cmd->add_option("--out", exp_out, "Output directory")->required();
    exp_cmd->add_option("--seeds", exp_seeds, "Number of repetitions");
    exp_cmd->add_option("--seed", exp_seed, "Base seed");
    exp_cmd->add_flag("--quick", exp_quick, "Reduced scale for smoke runs");

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "Run pipeline stages from one config");
    std::string pipe_config, pipe_out, pipe_stages;
    pipe_cmd->add_option("--config", pipe_config, "Pipeline config JSON")->required();
    pipe_cmd->add_option("--out", pipe_out, "Override the output directory");
    pipe_cmd->add_option("--stages", pipe_stages, "Comma-separated stage subset");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth_cmd) {
            ScenarioConfig cfg = scenario_from_json_file(synth_config);
            if (synth_seed_set) cfg.seed = synth_seed;
            const SynthDataset ds = render_dataset(generate_scenario(cfg), cfg);
            write_synth_dataset(ds, synth_out);
            log_line("wrote dataset to " + synth_out);
        } else if (*trainae_cmd) {
            if (ae_role != "appearance" && ae_role != "temporal")
                throw ConfigError("--role must be appearance or temporal");
            PipelineConfig pcfg;
            if (!ae_config.empty()) pcfg = pipeline_config_from_json_file(ae_config);
            const LoadedDataset ds = load_dataset_dir(ae_data);
            const PatchSets patches =
                gather_training_patches(ds, pcfg.extraction, pcfg.max_train_patches, ae_seed);
            ModelBundle bundle;
            AutoencoderState state = ae_init(pcfg.ae_spec, mix_seed(ae_seed, 0x0a));
            TrainConfig tc = pcfg.ae_train;
            tc.seed = mix_seed(ae_seed, 0x0b);
            const TrainReport report =
                ae_train(state, ae_role == "appearance" ? patches.appearance : patches.temporal,
                         tc);
            if (ae_role == "appearance")
                bundle.ae_appearance = std::move(state);
            else
                bundle.ae_temporal = std::move(state);
            save_bundle(bundle, ae_out);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "final training loss %.6f",
                          report.epoch_loss.back());
            log_line(buf);
        } else if (*extract_cmd) {
            const ModelBundle bundle = load_bundle(ex_bundle);
            if (!bundle.ae_appearance || !bundle.ae_temporal)
                throw ConfigError("bundle must contain both autoencoders; run train-ae first");
            const LoadedDataset ds = load_dataset_dir(ex_data);
            ExtractionConfig ecfg;
            ecfg.extractor.patch_size = bundle.ae_appearance->spec().input_size;
            if (ex_flow == "gt")
                ecfg.flow_source = FlowSource::ground_truth;
            else if (ex_flow == "computed")
                ecfg.flow_source = FlowSource::computed;
            else
                throw ConfigError("--flow must be gt or computed");
            const auto rows =
                extract_dataset_features(ds, *bundle.ae_appearance, *bundle.ae_temporal, ecfg);
            save_feature_table(rows, ex_out);
            log_line("wrote " + std::to_string(rows.size()) + " descriptors to " + ex_out);
        } else if (*ti_cmd) {
            ti_cfg.kernel = ti_kernel == "linear" ? KernelType::linear : KernelType::rbf;
            ti_cfg.seed = mix_seed(ti_seed, 0x1f);
            const auto rows = load_feature_table(ti_features);
            const auto frame_labels = load_frame_annotations(ti_labels);
            std::vector<AnomalyInjection> anomalies;
            if (!ti_manifest.empty()) anomalies = manifest_anomalies(ti_manifest);
            LabeledPools pools = split_pools(rows, frame_labels, anomalies);
            Rng rng(mix_seed(ti_seed, 0x90));
            rng.shuffle(pools.normals);
            if (pools.normals.size() > ti_max_normals) pools.normals.resize(ti_max_normals);
            rng = Rng(mix_seed(ti_seed, 0x91));
            rng.shuffle(pools.anomalies);
            if (pools.anomalies.size() > static_cast<size_t>(std::max(0, ti_n)))
                pools.anomalies.resize(static_cast<size_t>(std::max(0, ti_n)));
            if (ti_n == 0 || pools.anomalies.empty()) {
                ti_cfg.k2 = 0;
                pools.anomalies.clear();
            }
            ModelBundle bundle;
            bundle.inference = ensemble_fit(pools.normals, pools.anomalies, ti_cfg);
            save_bundle(bundle, ti_out);
            log_line("fitted ensemble with " +
                     std::to_string(bundle.inference->classifiers.size()) + " classifiers");
        } else if (*score_cmd) {
            const ModelBundle bundle = load_bundle(sc_bundle);
            if (!bundle.inference)
                throw ConfigError("bundle has no inference model; run train-infer first");
            const auto rows = load_feature_table(sc_features);
            std::vector<int> frames;
            if (!sc_labels.empty())
                for (const auto& a : load_frame_annotations(sc_labels))
                    frames.push_back(a.frame_index);
            const auto scores = score_feature_table(*bundle.inference, rows, frames);
            save_scores(scores, sc_out);
            log_line("wrote " + std::to_string(scores.size()) + " frame scores to " + sc_out);
        } else if (*eval_cmd) {
            const auto score_rows = load_scores(ev_scores);
            const auto annotations = load_frame_annotations(ev_labels);
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
            if (!ev_roc.empty()) {
                std::string roc_csv = "fpr,tpr\n";
                for (const auto& [fpr, tpr] : curve.points)
                    roc_csv += format_double(fpr) + "," + format_double(tpr) + "\n";
                atomic_write_file(ev_roc, roc_csv);
            }
            std::printf("auc %.6f\n", curve.auc);
        } else if (*grid_cmd) {
            const GridSearchConfig cfg = grid_config_from_file(gs_config);
            const EvalDataset ds = build_eval_dataset(cfg);
            InferenceConfig base;
            const GridSearchReport report = grid_search(ds, cfg.grids, base, cfg.seed);
            atomic_write_file(gs_out, report.to_csv());
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "selected k1=%d k2=%d n=%d mu=%.2f eta=%.2f auc=%.6f",
                          report.selected.k1, report.selected.k2, report.selected.n,
                          report.selected.mu, report.selected.eta, report.selected.auc);
            log_line(buf);
        } else if (*exp_cmd) {
            ExperimentOptions opts;
            opts.seeds = exp_seeds;
            opts.base_seed = exp_seed;
            opts.quick = exp_quick;
            const ExperimentResult result = run_experiment(exp_name, exp_out, opts);
            for (const auto& [variant, mean] : result.mean_auc)
                std::printf("%s mean auc %.6f\n", variant.c_str(), mean);
        } else if (*pipe_cmd) {
            PipelineConfig cfg = pipeline_config_from_json_file(pipe_config);
            if (!pipe_out.empty()) cfg.out_dir = pipe_out;
            std::vector<std::string> stages;
            if (!pipe_stages.empty()) {
                std::string cur;
                for (char c : pipe_stages + ",") {
                    if (c == ',') {
                        if (!cur.empty()) stages.push_back(cur);
                        cur.clear();
                    } else {
                        cur.push_back(c);
                    }
                }
            }
            run_pipeline(cfg, stages);
            log_line("pipeline finished; artifacts in " + cfg.out_dir.string());
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 2;
    }
    return 0;
}
