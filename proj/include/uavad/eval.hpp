#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uavad/inference.hpp"

namespace uavad {

// ------------------------------------------------------------------ ROC / AUC

struct RocCurve {
    std::vector<std::pair<double, double>> points; // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0.0;
};

// Threshold sweep over the unique scores; tie groups collapse to one curve
// point, so the trapezoidal area equals the Mann-Whitney statistic.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// O(n^2) pairwise count of correctly ordered positive/negative pairs, ties
// counted half. Independent cross-check for roc_auc.
double auc_pairwise_oracle(const std::vector<double>& scores, const std::vector<int>& labels);

// ------------------------------------------------------------------------ PCA

struct PcaProjection {
    std::vector<std::array<double, 2>> points;
    std::array<double, 2> explained_variance; // fractions, descending
};

PcaProjection pca_project_2d(const std::vector<std::vector<double>>& descriptors);

// ---------------------------------------------------------------- grid search

// Descriptor-level dataset view consumed by the fit/score loops: training
// pools plus per-frame test groups.
struct EvalDataset {
    std::vector<std::vector<double>> train_normals;
    std::vector<std::vector<double>> train_anomalies; // full pool, subsampled per cell
    std::vector<int> test_frames;                     // frame index per test group
    std::vector<std::vector<std::vector<double>>> test_descriptors; // per frame
    std::vector<int> test_labels;                     // frame label per test group
};

struct ParameterGrids {
    std::vector<int> k1{2, 4, 6, 8};
    std::vector<int> k2{2, 3, 4};
    std::vector<int> n{0, 20, 40, 60, 80, 100};
    std::vector<double> mu{0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<double> eta{0.5, 0.6, 0.7, 0.8};
};

struct GridCell {
    int k1 = 0;
    int k2 = 0;
    int n = 0;
    double mu = 0.0;
    double eta = 0.0;
    double auc = 0.0;
    bool skipped = false;
};

struct GridSearchReport {
    std::vector<GridCell> cells;
    GridCell selected;
    uint64_t seed = 0;

    std::string to_csv() const;
};

// Fits one ensemble per (k1, k2, n) combination (n anomalous samples drawn
// with the cell-specific sub-seed), scores the test frames and records the
// AUC for every threshold pair. n = 0 rows collapse to the k2-free baseline.
// Infeasible cells (0 < n < k2) are marked skipped.
GridSearchReport grid_search(const EvalDataset& dataset, const ParameterGrids& grids,
                             const InferenceConfig& base_cfg, uint64_t seed);

// Scores every test frame of `dataset` with `model`.
std::pair<std::vector<double>, std::vector<int>> score_eval_dataset(const InferenceModel& model,
                                                                    const EvalDataset& dataset);

// ---------------------------------------------------------------- experiments

struct ExperimentOptions {
    int seeds = 5;
    uint64_t base_seed = 1;
    bool quick = false; // smaller scenes/epochs, used by smoke tests
};

struct ExperimentResult {
    std::string name;
    // One row per (variant, seed) plus per-variant means.
    std::vector<std::string> report_lines; // CSV body, header first
    // Key quantities for programmatic checks, keyed by variant name.
    std::vector<std::pair<std::string, double>> mean_auc;

    double mean(const std::string& variant) const;
};

// Built-in synthetic studies: "context-ablation" (22-dim vs 18-dim
// descriptors on contextual anomalies), "fewshot-ablation" (AUC as a function
// of the number of anomalous training samples on local anomalies) and
// "baseline-comparison" (normal-only inference vs the two-pool ensemble,
// plus feature-subset rows). Writes report.csv, curves.csv and SVG charts
// under out_dir.
ExperimentResult run_experiment(const std::string& name, const std::filesystem::path& out_dir,
                                const ExperimentOptions& opts);

// Minimal line/scatter chart writers used for the experiment outputs.
void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series);
void write_svg_scatter(const std::filesystem::path& path, const std::string& title,
                       const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series);

} // namespace uavad
