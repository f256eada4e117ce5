#include "uavad/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavad/errors.hpp"
#include "uavad/rng.hpp"

namespace uavad {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// The volatile store keeps the rounding observable; GCC 11 at -O3 otherwise
// folds the double->float->double round trip away.
double quantize_f32(double v) {
    volatile float f = static_cast<float>(v);
    return static_cast<double>(f);
}

void quantize_vec(std::vector<double>& v) {
    for (double& x : v) x = quantize_f32(x);
}

} // namespace

// ------------------------------------------------------------ standardization

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
    if (x.size() != mean.size())
        throw ValidationError("descriptor dimension does not match the standardizer");
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
    return out;
}

Standardizer standardize_fit(const std::vector<std::vector<double>>& samples) {
    if (samples.size() < 2) throw ValidationError("standardization requires at least 2 samples");
    const size_t dim = samples[0].size();
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.scale.assign(dim, 0.0);
    for (const auto& x : samples) {
        if (x.size() != dim) throw ValidationError("inconsistent descriptor dimensions");
        for (size_t i = 0; i < dim; ++i) s.mean[i] += x[i];
    }
    for (double& m : s.mean) m /= static_cast<double>(samples.size());
    for (const auto& x : samples)
        for (size_t i = 0; i < dim; ++i) {
            const double d = x[i] - s.mean[i];
            s.scale[i] += d * d;
        }
    for (double& v : s.scale) {
        v = std::sqrt(v / static_cast<double>(samples.size()));
        if (v == 0.0) v = 1.0; // constant dimension maps to 0
    }
    return s;
}

// ----------------------------------------------------------------- clustering

int KMeansModel::assign(const std::vector<double>& x) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(x, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

namespace {

KMeansModel kmeans_single(const std::vector<std::vector<double>>& samples, int k, uint64_t seed,
                          const KMeansOptions& opts) {
    const size_t n = samples.size();
    Rng rng(seed);

    // k-means++ seeding.
    std::vector<std::vector<double>> centers;
    centers.push_back(samples[rng.below(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, sq_dist(samples[i], c));
            d2[i] = best;
            total += best;
        }
        size_t pick;
        if (total > 0.0) {
            const double r = rng.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(n);
        }
        centers.push_back(samples[pick]);
    }

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        for (size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = sq_dist(samples[i], centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assign[i] = best;
        }
        std::vector<int> counts(k, 0);
        for (int a : assign) ++counts[a];
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            // Reseed the empty cluster from the sample farthest from its center.
            size_t far_i = 0;
            double far_d = -1.0;
            for (size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] <= 1) continue; // don't orphan another cluster
                const double d = sq_dist(samples[i], centers[assign[i]]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            if (far_d < 0.0) continue; // all points are duplicates; leave empty
            --counts[assign[far_i]];
            assign[far_i] = c;
            ++counts[c];
        }
        std::vector<std::vector<double>> next(k, std::vector<double>(samples[0].size(), 0.0));
        for (size_t i = 0; i < n; ++i)
            for (size_t d = 0; d < samples[i].size(); ++d) next[assign[i]][d] += samples[i][d];
        double movement = 0.0;
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (double& v : next[c]) v /= counts[c];
            movement = std::max(movement, std::sqrt(sq_dist(next[c], centers[c])));
            centers[c] = std::move(next[c]);
        }
        if (movement < opts.tolerance) break;
    }

    KMeansModel model;
    model.centers = std::move(centers);
    model.objective = 0.0;
    for (size_t i = 0; i < n; ++i)
        model.objective += sq_dist(samples[i], model.centers[model.assign(samples[i])]);
    return model;
}

} // namespace

KMeansModel kmeans_fit(const std::vector<std::vector<double>>& samples, int k, uint64_t seed,
                       const KMeansOptions& opts) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (samples.size() < static_cast<size_t>(k))
        throw ValidationError("k exceeds the sample count");
    KMeansModel best;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        KMeansModel m = kmeans_single(samples, k, mix_seed(seed, 0x4b3a + r), opts);
        if (best.centers.empty() || m.objective < best.objective) best = std::move(m);
    }
    return best;
}

// ------------------------------------------------------------------------ SVM

namespace {

double kernel_eval(KernelType kernel, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b) {
    if (kernel == KernelType::linear) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    return std::exp(-gamma * sq_dist(a, b));
}

} // namespace

double CalibratedSvm::decision(const std::vector<double>& x) const {
    double f = bias;
    for (size_t i = 0; i < support_x.size(); ++i)
        f += coef[i] * kernel_eval(kernel, gamma, support_x[i], x);
    return f;
}

double CalibratedSvm::probability(const std::vector<double>& x) const {
    const double fApB = platt_a * decision(x) + platt_b;
    double p;
    if (fApB >= 0.0)
        p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
    else
        p = 1.0 / (1.0 + std::exp(fApB));
    return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

SvmSolution svm_solve_dual(const std::vector<std::vector<double>>& positives,
                           const std::vector<std::vector<double>>& negatives,
                           const SvmParams& params) {
    if (positives.empty() || negatives.empty())
        throw ValidationError("SVM training requires samples on both sides");
    if (params.c <= 0.0) throw ValidationError("C must be > 0");
    if (params.kernel == KernelType::rbf && params.gamma <= 0.0)
        throw ValidationError("rbf gamma must be > 0");

    const size_t n_pos = positives.size();
    const size_t n_neg = negatives.size();
    const size_t n = n_pos + n_neg;

    std::vector<const std::vector<double>*> x(n);
    std::vector<double> y(n);
    for (size_t i = 0; i < n_pos; ++i) {
        x[i] = &positives[i];
        y[i] = 1.0;
    }
    for (size_t i = 0; i < n_neg; ++i) {
        x[n_pos + i] = &negatives[i];
        y[n_pos + i] = -1.0;
    }

    // Balanced per-class box constraints: C_pos * n_pos == C_neg * n_neg.
    const double c_pos = params.c * static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
    const double c_neg = params.c * static_cast<double>(n) / (2.0 * static_cast<double>(n_neg));
    std::vector<double> box(n);
    for (size_t i = 0; i < n; ++i) box[i] = y[i] > 0 ? c_pos : c_neg;

    // Full kernel matrix; training sets stay small enough for this.
    std::vector<double> q(n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            const double v = y[i] * y[j] * kernel_eval(params.kernel, params.gamma, *x[i], *x[j]);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // G_i = sum_j Q_ij alpha_j - 1
    constexpr double kTau = 1e-12;

    long iter = 0;
    for (;; ++iter) {
        if (iter >= params.max_iterations)
            throw ConvergenceError("SMO did not converge within " +
                                   std::to_string(params.max_iterations) + " iterations");
        // Maximal violating pair.
        int i = -1, j = -1;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < n; ++t) {
            const bool in_up = (y[t] > 0 && alpha[t] < box[t]) || (y[t] < 0 && alpha[t] > 0);
            const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < box[t]);
            const double v = -y[t] * grad[t];
            if (in_up && v > m_up) {
                m_up = v;
                i = static_cast<int>(t);
            }
            if (in_low && v < m_low) {
                m_low = v;
                j = static_cast<int>(t);
            }
        }
        if (i < 0 || j < 0 || m_up - m_low <= params.tol) break;

        const double* qi = &q[static_cast<size_t>(i) * n];
        const double* qj = &q[static_cast<size_t>(j) * n];
        const double old_ai = alpha[i], old_aj = alpha[j];

        if (y[i] != y[j]) {
            double quad = qi[i] + qj[j] + 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0 && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if (diff <= 0.0 && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > box[i] - box[j] && alpha[i] > box[i]) {
                alpha[i] = box[i];
                alpha[j] = box[i] - diff;
            } else if (diff <= box[i] - box[j] && alpha[j] > box[j]) {
                alpha[j] = box[j];
                alpha[i] = box[j] + diff;
            }
        } else {
            double quad = qi[i] + qj[j] - 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > box[i] && alpha[i] > box[i]) {
                alpha[i] = box[i];
                alpha[j] = sum - box[i];
            } else if (sum <= box[i] && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > box[j] && alpha[j] > box[j]) {
                alpha[j] = box[j];
                alpha[i] = sum - box[j];
            } else if (sum <= box[j] && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (size_t t = 0; t < n; ++t) grad[t] += qi[t] * dai + qj[t] * daj;
    }

    // Bias from the free support vectors, midpoint of the bounds otherwise.
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= box[t]) {
            if (y[t] < 0)
                upper = std::min(upper, yg);
            else
                lower = std::max(lower, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0)
                upper = std::min(upper, yg);
            else
                lower = std::max(lower, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / n_free : (upper + lower) / 2.0;

    SvmSolution sol;
    sol.alpha = alpha;
    sol.bias = -rho;
    sol.box = box;
    sol.dual_objective = 0.0;
    for (size_t t = 0; t < n; ++t) sol.dual_objective += alpha[t] * (1.0 - 0.5 * (grad[t] + 1.0));

    // Explicit per-point KKT violation with the chosen bias.
    sol.max_kkt_violation = 0.0;
    const double bound_eps = 1e-9;
    for (size_t t = 0; t < n; ++t) {
        const double yf = grad[t] + 1.0 + y[t] * sol.bias; // y_t * f(x_t)
        double violation = 0.0;
        if (alpha[t] <= bound_eps)
            violation = std::max(0.0, 1.0 - yf);
        else if (alpha[t] >= box[t] - bound_eps)
            violation = std::max(0.0, yf - 1.0);
        else
            violation = std::abs(yf - 1.0);
        sol.max_kkt_violation = std::max(sol.max_kkt_violation, violation);
    }
    return sol;
}

std::pair<double, double> fit_platt(const std::vector<double>& decisions,
                                    const std::vector<int>& labels) {
    if (decisions.size() != labels.size() || decisions.empty())
        throw ValidationError("Platt fit requires matching decision/label arrays");
    double prior1 = 0.0, prior0 = 0.0;
    for (int l : labels) (l > 0 ? prior1 : prior0) += 1.0;
    if (prior1 == 0.0 || prior0 == 0.0)
        throw ValidationError("Platt fit requires both classes");

    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    const size_t n = decisions.size();
    std::vector<double> target(n);
    for (size_t i = 0; i < n; ++i) target[i] = labels[i] > 0 ? hi : lo;

    const int max_iter = 100;
    const double min_step = 1e-10;
    const double sigma = 1e-12;

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));

    auto objective = [&](double pa, double pb) {
        double f = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double fApB = decisions[i] * pa + pb;
            if (fApB >= 0.0)
                f += target[i] * fApB + std::log1p(std::exp(-fApB));
            else
                f += (target[i] - 1.0) * fApB + std::log1p(std::exp(fApB));
        }
        return f;
    };

    double fval = objective(a, b);
    for (int it = 0; it < max_iter; ++it) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double fApB = decisions[i] * a + b;
            double p, q;
            if (fApB >= 0.0) {
                p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
                q = 1.0 / (1.0 + std::exp(-fApB));
            } else {
                p = 1.0 / (1.0 + std::exp(fApB));
                q = std::exp(fApB) / (1.0 + std::exp(fApB));
            }
            const double d2 = p * q;
            h11 += decisions[i] * decisions[i] * d2;
            h22 += d2;
            h21 += decisions[i] * d2;
            const double d1 = target[i] - p;
            g1 += decisions[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool accepted = false;
        while (step >= min_step) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if (!accepted) break;
    }
    return {a, b};
}

CalibratedSvm svm_train(const std::vector<std::vector<double>>& positives,
                        const std::vector<std::vector<double>>& negatives,
                        const SvmParams& params) {
    const SvmSolution sol = svm_solve_dual(positives, negatives, params);

    CalibratedSvm svm;
    svm.kernel = params.kernel;
    svm.gamma = params.gamma;
    svm.bias = sol.bias;
    const size_t n_pos = positives.size();
    for (size_t t = 0; t < sol.alpha.size(); ++t) {
        if (sol.alpha[t] <= 1e-12) continue;
        const bool pos = t < n_pos;
        svm.support_x.push_back(pos ? positives[t] : negatives[t - n_pos]);
        svm.coef.push_back(pos ? sol.alpha[t] : -sol.alpha[t]);
    }

    // Calibration on the training decision values.
    std::vector<double> decisions;
    std::vector<int> labels;
    decisions.reserve(positives.size() + negatives.size());
    for (const auto& p : positives) {
        decisions.push_back(svm.decision(p));
        labels.push_back(1);
    }
    for (const auto& q : negatives) {
        decisions.push_back(svm.decision(q));
        labels.push_back(0);
    }
    const auto [a, b] = fit_platt(decisions, labels);
    svm.platt_a = a;
    svm.platt_b = b;
    return svm;
}

// ------------------------------------------------------------------- ensemble

std::string to_string(VerdictLabel v) {
    switch (v) {
        case VerdictLabel::normal: return "normal";
        case VerdictLabel::anomalous: return "anomalous";
        default: return "unknown";
    }
}

InferenceModel ensemble_fit(const std::vector<std::vector<double>>& normals,
                            const std::vector<std::vector<double>>& anomalies,
                            const InferenceConfig& cfg) {
    if (cfg.k1 < 1) throw ConfigError("k1 must be >= 1");
    if (cfg.k2 < 0) throw ConfigError("k2 must be >= 0");
    if (normals.size() < static_cast<size_t>(cfg.k1))
        throw ValidationError("fewer normal samples than normal clusters");
    if (cfg.k2 > 0 && anomalies.size() < static_cast<size_t>(cfg.k2))
        throw ValidationError("fewer anomalous samples than anomalous clusters");
    if (cfg.mu <= 0.0 || cfg.mu >= 1.0 || cfg.eta <= 0.0 || cfg.eta >= 1.0)
        throw ConfigError("thresholds must lie strictly inside (0,1)");
    if (cfg.c <= 0.0) throw ConfigError("C must be > 0");

    InferenceModel model;
    model.cfg = cfg;
    model.baseline_mode = cfg.k2 == 0;

    std::vector<std::vector<double>> all = normals;
    all.insert(all.end(), anomalies.begin(), anomalies.end());
    model.scaler = standardize_fit(all);

    std::vector<std::vector<double>> zn, za;
    zn.reserve(normals.size());
    za.reserve(anomalies.size());
    for (const auto& x : normals) zn.push_back(model.scaler.apply(x));
    for (const auto& x : anomalies) za.push_back(model.scaler.apply(x));

    if (cfg.gamma > 0.0) {
        model.gamma_effective = cfg.gamma;
    } else {
        // 1 / (dim * variance of the standardized training matrix).
        double mean = 0.0, var = 0.0;
        size_t count = 0;
        for (const auto* pool : {&zn, &za})
            for (const auto& x : *pool)
                for (double v : x) {
                    mean += v;
                    ++count;
                }
        mean /= static_cast<double>(count);
        for (const auto* pool : {&zn, &za})
            for (const auto& x : *pool)
                for (double v : x) var += (v - mean) * (v - mean);
        var /= static_cast<double>(count);
        const double dim = static_cast<double>(zn[0].size());
        model.gamma_effective = var > 0.0 ? 1.0 / (dim * var) : 1.0 / dim;
    }

    model.normal_clusters = kmeans_fit(zn, cfg.k1, mix_seed(cfg.seed, 1));
    if (cfg.k2 > 0) model.anomaly_clusters = kmeans_fit(za, cfg.k2, mix_seed(cfg.seed, 2));

    std::vector<std::vector<size_t>> members(cfg.k1 + cfg.k2);
    for (size_t i = 0; i < zn.size(); ++i)
        members[model.normal_clusters.assign(zn[i])].push_back(i);
    for (size_t i = 0; i < za.size(); ++i)
        members[cfg.k1 + model.anomaly_clusters.assign(za[i])].push_back(zn.size() + i);

    const auto& sample_at = [&](size_t idx) -> const std::vector<double>& {
        return idx < zn.size() ? zn[idx] : za[idx - zn.size()];
    };

    SvmParams svm_params;
    svm_params.kernel = cfg.kernel;
    svm_params.c = cfg.c;
    svm_params.gamma = model.gamma_effective;

    for (int cluster = 0; cluster < cfg.k1 + cfg.k2; ++cluster) {
        if (members[cluster].empty())
            throw ValidationError("cluster " + std::to_string(cluster) +
                                  " has no samples after clustering");
        std::vector<std::vector<double>> pos, neg;
        for (size_t idx : members[cluster]) pos.push_back(sample_at(idx));
        for (int other = 0; other < cfg.k1 + cfg.k2; ++other) {
            if (other == cluster) continue;
            for (size_t idx : members[other]) neg.push_back(sample_at(idx));
        }
        model.classifiers.push_back(svm_train(pos, neg, svm_params));
    }

    // Snap to the precision the bundle stores so that fresh and reloaded
    // models score identically.
    quantize_vec(model.scaler.mean);
    quantize_vec(model.scaler.scale);
    model.gamma_effective = quantize_f32(model.gamma_effective);
    for (auto& c : model.normal_clusters.centers) quantize_vec(c);
    for (auto& c : model.anomaly_clusters.centers) quantize_vec(c);
    for (auto& svm : model.classifiers) {
        svm.gamma = quantize_f32(svm.gamma);
        for (auto& sv : svm.support_x) quantize_vec(sv);
        quantize_vec(svm.coef);
        svm.bias = quantize_f32(svm.bias);
        svm.platt_a = quantize_f32(svm.platt_a);
        svm.platt_b = quantize_f32(svm.platt_b);
    }
    return model;
}

EnsembleScores ensemble_scores(const InferenceModel& model,
                               const std::vector<double>& descriptor) {
    const std::vector<double> z = model.scaler.apply(descriptor);
    EnsembleScores out;
    for (int i = 0; i < model.cfg.k1; ++i)
        out.normal_scores.push_back(model.classifiers[i].probability(z));
    for (int j = 0; j < model.cfg.k2; ++j)
        out.anomaly_scores.push_back(model.classifiers[model.cfg.k1 + j].probability(z));
    out.alpha = 0.0;
    for (double m : out.normal_scores) out.alpha = std::max(out.alpha, m);
    out.beta = 0.0; // empty-max convention when k2 == 0
    for (double v : out.anomaly_scores) out.beta = std::max(out.beta, v);
    return out;
}

ObjectVerdict classify_object(double alpha, double beta, double mu, double eta) {
    if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0)
        throw ValidationError("alpha/beta must lie in [0,1]");
    ObjectVerdict v;
    v.alpha = alpha;
    v.beta = beta;
    if (alpha > beta && alpha > mu)
        v.label = VerdictLabel::normal;
    else if (alpha < beta && beta > eta)
        v.label = VerdictLabel::anomalous;
    else
        v.label = VerdictLabel::unknown; // raises an alarm downstream
    v.score = (1.0 + beta - alpha) / 2.0;
    return v;
}

ObjectVerdict score_descriptor(const InferenceModel& model,
                               const std::vector<double>& descriptor) {
    const EnsembleScores s = ensemble_scores(model, descriptor);
    ObjectVerdict v = classify_object(s.alpha, s.beta, model.cfg.mu, model.cfg.eta);
    if (model.baseline_mode) v.score = 1.0 - s.alpha;
    return v;
}

ScoredFrame frame_anomaly_score(int frame_index, const std::vector<ObjectVerdict>& verdicts) {
    ScoredFrame f;
    f.frame_index = frame_index;
    f.objects = verdicts;
    f.score = 0.0;
    f.anomalous = false;
    for (const auto& v : verdicts) {
        f.score = std::max(f.score, v.score);
        if (v.label != VerdictLabel::normal) f.anomalous = true;
    }
    return f;
}

InferenceModel baseline_normal_only(const std::vector<std::vector<double>>& normals, int k,
                                    const InferenceConfig& cfg) {
    InferenceConfig base = cfg;
    base.k1 = k;
    base.k2 = 0;
    return ensemble_fit(normals, {}, base);
}

} // namespace uavad
