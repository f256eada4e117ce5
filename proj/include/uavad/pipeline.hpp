#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavad/dataset.hpp"
#include "uavad/eval.hpp"
#include "uavad/inference.hpp"
#include "uavad/synth.hpp"

namespace uavad {

// One declarative config drives the whole pipeline:
// synth -> train-ae -> extract -> train-infer -> score -> evaluate.
struct PipelineConfig {
    uint64_t seed = 1;
    std::filesystem::path out_dir;

    // Either synthesized scenarios or pre-existing dataset directories.
    std::optional<ScenarioConfig> train_scenario;
    std::optional<ScenarioConfig> test_scenario;
    std::optional<std::filesystem::path> train_dir;
    std::optional<std::filesystem::path> test_dir;

    AutoencoderSpec ae_spec;
    TrainConfig ae_train;
    size_t max_train_patches = 300;

    ExtractionConfig extraction;

    InferenceConfig inference;
    int n_anomalous = 60;       // anomalous training samples drawn from the pool
    size_t max_normal_samples = 300;
};

inline const std::vector<std::string> kPipelineStages = {
    "synth", "train-ae", "extract", "train-infer", "score", "evaluate"};

PipelineConfig pipeline_config_from_json_text(const std::string& text);
PipelineConfig pipeline_config_from_json_file(const std::filesystem::path& path);
std::string pipeline_config_to_json_text(const PipelineConfig& cfg);

// Runs the requested stages in pipeline order. Every stage writes its
// artifacts atomically and fails with a ConfigError naming any missing input
// artifact. A run manifest with the config echo and its hash is written at
// the end.
void run_pipeline(const PipelineConfig& cfg, const std::vector<std::string>& stages);

// Individual stages, reused by the CLI subcommands.
void stage_synth(const PipelineConfig& cfg);
void stage_train_ae(const PipelineConfig& cfg);
void stage_extract(const PipelineConfig& cfg);
void stage_train_infer(const PipelineConfig& cfg);
void stage_score(const PipelineConfig& cfg);
void stage_evaluate(const PipelineConfig& cfg);

// Scores one feature table with a fitted model; frames come from `frames`
// (typically the annotation list) so empty frames score 0.
std::vector<ScoreRow> score_feature_table(const InferenceModel& model,
                                          const std::vector<FeatureRow>& rows,
                                          const std::vector<int>& frames);

// Splits feature rows into normal/anomalous descriptor pools using object
// labels from the manifest anomalies when present, frame labels otherwise.
struct LabeledPools {
    std::vector<std::vector<double>> normals;
    std::vector<std::vector<double>> anomalies;
};

LabeledPools split_pools(const std::vector<FeatureRow>& rows,
                         const std::vector<FrameAnnotation>& frame_labels,
                         const std::vector<AnomalyInjection>& anomalies);

} // namespace uavad
