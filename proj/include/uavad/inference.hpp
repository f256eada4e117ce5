#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavad/types.hpp"

namespace uavad {

// ------------------------------------------------------------ standardization

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale; // per-dimension standard deviation; 1 where degenerate

    std::vector<double> apply(const std::vector<double>& x) const;
};

Standardizer standardize_fit(const std::vector<std::vector<double>>& samples);

// ----------------------------------------------------------------- clustering

struct KMeansOptions {
    int max_iterations = 100;
    double tolerance = 1e-6; // stop when no center moves more than this
    int restarts = 10;
};

struct KMeansModel {
    std::vector<std::vector<double>> centers;
    double objective = 0.0; // sum of squared distances to assigned centers

    int assign(const std::vector<double>& x) const;
};

// k-means++ seeding followed by Lloyd iterations; empty clusters are reseeded
// from the sample farthest from its current center. Deterministic in seed.
KMeansModel kmeans_fit(const std::vector<std::vector<double>>& samples, int k, uint64_t seed,
                       const KMeansOptions& opts = {});

// ------------------------------------------------------------------------ SVM

enum class KernelType { linear, rbf };

struct SvmParams {
    KernelType kernel = KernelType::rbf;
    double c = 1.0;
    double gamma = 1.0;   // rbf only
    double tol = 1e-3;    // KKT violation tolerance
    long max_iterations = 2'000'000;
};

// Soft-margin binary SVM with Platt-calibrated probability output. Class
// imbalance is absorbed into per-class box constraints with
// C_pos * n_pos == C_neg * n_neg.
struct CalibratedSvm {
    KernelType kernel = KernelType::rbf;
    double gamma = 1.0;
    std::vector<std::vector<double>> support_x;
    std::vector<double> coef; // alpha_i * y_i per support sample
    double bias = 0.0;
    double platt_a = 0.0;
    double platt_b = 0.0;

    double decision(const std::vector<double>& x) const;
    double probability(const std::vector<double>& x) const;
};

CalibratedSvm svm_train(const std::vector<std::vector<double>>& positives,
                        const std::vector<std::vector<double>>& negatives,
                        const SvmParams& params);

// Diagnostics used by the verification suites.
struct SvmSolution {
    std::vector<double> alpha; // one per training sample, positives first
    double bias = 0.0;
    double dual_objective = 0.0;
    double max_kkt_violation = 0.0;
    std::vector<double> box; // per-sample upper bound C_i
};

SvmSolution svm_solve_dual(const std::vector<std::vector<double>>& positives,
                           const std::vector<std::vector<double>>& negatives,
                           const SvmParams& params);

// Platt sigmoid fit p(y=1|f) = 1 / (1 + exp(A f + B)) with regularized targets.
std::pair<double, double> fit_platt(const std::vector<double>& decisions,
                                    const std::vector<int>& labels);

// ------------------------------------------------------------------- ensemble

struct InferenceConfig {
    int k1 = 4;          // normal clusters
    int k2 = 3;          // anomalous clusters; 0 selects the normal-only mode
    double mu = 0.5;     // normal-acceptance threshold
    double eta = 0.5;    // anomaly-acceptance threshold
    KernelType kernel = KernelType::rbf;
    double c = 1.0;
    double gamma = 0.0;  // <= 0 selects 1 / (dim * variance) on the training set
    uint64_t seed = 0;
};

enum class VerdictLabel { normal, anomalous, unknown };

std::string to_string(VerdictLabel v);

struct ObjectVerdict {
    double alpha = 0.0;
    double beta = 0.0;
    VerdictLabel label = VerdictLabel::unknown;
    double score = 0.5; // (1 + beta - alpha) / 2
};

struct EnsembleScores {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> normal_scores;  // m_i, one per normal-cluster classifier
    std::vector<double> anomaly_scores; // n_j, one per anomaly-cluster classifier
};

struct InferenceModel {
    InferenceConfig cfg;
    double gamma_effective = 1.0;
    Standardizer scaler;
    KMeansModel normal_clusters;
    KMeansModel anomaly_clusters;
    std::vector<CalibratedSvm> classifiers; // k1 normal-cluster then k2 anomaly-cluster
    bool baseline_mode = false;             // k2 == 0: anomaly score is 1 - alpha
};

// Standardizes, clusters both pools, then trains one binary classifier per
// cluster with every other cluster's samples (both pools) as negatives.
InferenceModel ensemble_fit(const std::vector<std::vector<double>>& normals,
                            const std::vector<std::vector<double>>& anomalies,
                            const InferenceConfig& cfg);

// Calibrated classifier outputs for an unstandardized descriptor.
EnsembleScores ensemble_scores(const InferenceModel& model, const std::vector<double>& descriptor);

// Decision logic: normal iff alpha > beta and alpha > mu; anomalous iff
// alpha < beta and beta > eta; everything else is unknown and raises an alarm.
ObjectVerdict classify_object(double alpha, double beta, double mu, double eta);

// Verdict plus model-appropriate score for one descriptor.
ObjectVerdict score_descriptor(const InferenceModel& model, const std::vector<double>& descriptor);

struct ScoredFrame {
    int frame_index = 0;
    double score = 0.0;
    bool anomalous = false; // any object anomalous or unknown
    std::vector<ObjectVerdict> objects;
};

// Frame score is the maximum object score; an empty frame scores 0 and is
// normal.
ScoredFrame frame_anomaly_score(int frame_index, const std::vector<ObjectVerdict>& verdicts);

// Normal-only model: k clusters over normal samples, one-vs-rest classifiers
// among them, anomaly score 1 - alpha.
InferenceModel baseline_normal_only(const std::vector<std::vector<double>>& normals, int k,
                                    const InferenceConfig& cfg);

} // namespace uavad
