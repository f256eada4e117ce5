#include "uavad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "uavad/errors.hpp"
#include "uavad/io.hpp"
#include "uavad/rng.hpp"

namespace uavad {

// ------------------------------------------------------------------ ROC / AUC

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw ValidationError("scores and labels have different lengths");
    size_t pos = 0, neg = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw ValidationError("labels must be 0 or 1");
        (l == 1 ? pos : neg) += 1;
    }
    if (pos == 0 || neg == 0)
        throw ValidationError("AUC needs at least one positive and one negative label");

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    size_t tp = 0, fp = 0;
    size_t i = 0;
    while (i < order.size()) {
        // Consume the whole tie group before emitting a point.
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == 1)
                ++tp;
            else
                ++fp;
            ++j;
        }
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                                  static_cast<double>(tp) / static_cast<double>(pos));
        i = j;
    }

    curve.auc = 0.0;
    for (size_t p = 1; p < curve.points.size(); ++p) {
        const auto& [x0, y0] = curve.points[p - 1];
        const auto& [x1, y1] = curve.points[p];
        curve.auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    return curve;
}

double auc_pairwise_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw ValidationError("scores and labels have different lengths");
    double wins = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    if (pairs == 0)
        throw ValidationError("AUC needs at least one positive and one negative label");
    return wins / static_cast<double>(pairs);
}

// ------------------------------------------------------------------------ PCA

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
    const size_t n = a.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double vkp = eigenvectors[k][p], vkq = eigenvectors[k][q];
                    eigenvectors[k][p] = c * vkp - s * vkq;
                    eigenvectors[k][q] = s * vkp + c * vkq;
                }
            }
    }
    eigenvalues.resize(n);
    for (size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

} // namespace

PcaProjection pca_project_2d(const std::vector<std::vector<double>>& descriptors) {
    if (descriptors.size() < 3) throw ValidationError("PCA requires at least 3 samples");
    const size_t n = descriptors.size();
    const size_t d = descriptors[0].size();
    std::vector<double> mean(d, 0.0);
    for (const auto& x : descriptors) {
        if (x.size() != d) throw ValidationError("inconsistent descriptor dimensions");
        for (size_t i = 0; i < d; ++i) mean[i] += x[i];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& x : descriptors)
        for (size_t i = 0; i < d; ++i)
            for (size_t j = i; j < d; ++j) cov[i][j] += (x[i] - mean[i]) * (x[j] - mean[j]);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n - 1);
            cov[j][i] = cov[i][j];
        }

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
    jacobi_eigen(cov, eigenvalues, eigenvectors);

    std::vector<size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return eigenvalues[a] > eigenvalues[b]; });

    double trace = 0.0;
    for (double ev : eigenvalues) trace += std::max(ev, 0.0);

    PcaProjection out;
    std::array<std::vector<double>, 2> axes;
    for (int comp = 0; comp < 2; ++comp) {
        axes[comp].resize(d);
        for (size_t i = 0; i < d; ++i) axes[comp][i] = eigenvectors[i][order[comp]];
        // Deterministic sign: largest-magnitude coordinate positive.
        size_t arg = 0;
        for (size_t i = 1; i < d; ++i)
            if (std::abs(axes[comp][i]) > std::abs(axes[comp][arg])) arg = i;
        if (axes[comp][arg] < 0.0)
            for (double& v : axes[comp]) v = -v;
        out.explained_variance[comp] =
            trace > 0.0 ? std::max(eigenvalues[order[comp]], 0.0) / trace : 0.0;
    }
    for (const auto& x : descriptors) {
        std::array<double, 2> p{0.0, 0.0};
        for (int comp = 0; comp < 2; ++comp)
            for (size_t i = 0; i < d; ++i) p[comp] += (x[i] - mean[i]) * axes[comp][i];
        out.points.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------- grid search

std::pair<std::vector<double>, std::vector<int>> score_eval_dataset(const InferenceModel& model,
                                                                    const EvalDataset& dataset) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (size_t f = 0; f < dataset.test_descriptors.size(); ++f) {
        std::vector<ObjectVerdict> verdicts;
        for (const auto& desc : dataset.test_descriptors[f])
            verdicts.push_back(score_descriptor(model, desc));
        scores.push_back(frame_anomaly_score(dataset.test_frames[f], verdicts).score);
        labels.push_back(dataset.test_labels[f]);
    }
    return {scores, labels};
}

namespace {

std::vector<std::vector<double>> subsample(const std::vector<std::vector<double>>& pool, int n,
                                           uint64_t seed) {
    std::vector<size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);
    std::vector<std::vector<double>> out;
    for (int i = 0; i < n && i < static_cast<int>(idx.size()); ++i) out.push_back(pool[idx[i]]);
    return out;
}

std::string format_cell(const GridCell& c) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.2f,%.2f,%s,%s", c.k1, c.k2, c.n, c.mu, c.eta,
                  c.skipped ? "" : format_double(c.auc).c_str(), c.skipped ? "skipped" : "ok");
    return buf;
}

} // namespace

std::string GridSearchReport::to_csv() const {
    std::string out = "k1,k2,n,mu,eta,auc,status\n";
    for (const auto& c : cells) {
        out += format_cell(c);
        out += '\n';
    }
    out += "# selected," + format_cell(selected) + "\n";
    return out;
}

GridSearchReport grid_search(const EvalDataset& dataset, const ParameterGrids& grids,
                             const InferenceConfig& base_cfg, uint64_t seed) {
    GridSearchReport report;
    report.seed = seed;
    bool have_selected = false;

    for (int n : grids.n) {
        // n == 0 collapses every k2 to the baseline; emit it once per k1.
        std::vector<int> k2_values = n == 0 ? std::vector<int>{0} : grids.k2;
        for (int k1 : grids.k1) {
            for (int k2 : k2_values) {
                const bool feasible =
                    static_cast<size_t>(k1) <= dataset.train_normals.size() &&
                    (n == 0 ||
                     (n >= k2 && n <= static_cast<int>(dataset.train_anomalies.size())));
                double auc = 0.0;
                bool fitted = false;
                if (feasible) {
                    InferenceConfig cfg = base_cfg;
                    cfg.k1 = k1;
                    cfg.k2 = n == 0 ? 0 : k2;
                    cfg.seed = mix_seed(seed, (static_cast<uint64_t>(k1) << 32) ^
                                                  (static_cast<uint64_t>(k2) << 16) ^
                                                  static_cast<uint64_t>(n));
                    const auto anoms = subsample(dataset.train_anomalies, n, cfg.seed);
                    try {
                        const InferenceModel model =
                            ensemble_fit(dataset.train_normals, anoms, cfg);
                        const auto [scores, labels] = score_eval_dataset(model, dataset);
                        auc = roc_auc(scores, labels).auc;
                        fitted = true;
                    } catch (const Error&) {
                        // Degenerate cell (duplicate-heavy pools leaving a
                        // cluster empty); mark skipped like other infeasible
                        // cells.
                        fitted = false;
                    }
                }
                for (double mu : grids.mu) {
                    for (double eta : grids.eta) {
                        GridCell cell{k1, k2, n, mu, eta, auc, !fitted};
                        report.cells.push_back(cell);
                        if (fitted) {
                            // Selection: max AUC; ties prefer the smallest
                            // model, then the smallest thresholds.
                            const auto key = [](const GridCell& c) {
                                return std::make_tuple(-c.auc, c.k1 + c.k2, c.mu, c.eta, c.n,
                                                       c.k1, c.k2);
                            };
                            if (!have_selected || key(cell) < key(report.selected)) {
                                report.selected = cell;
                                have_selected = true;
                            }
                        }
                    }
                }
            }
        }
    }
    if (!have_selected) throw ValidationError("no feasible grid cell");
    return report;
}

// -------------------------------------------------------------------- charts

namespace {
enum class ChartKind { line, scatter };

void write_svg_impl(
    const std::filesystem::path& path, const std::string& title, ChartKind kind,
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
    const int width = 640, height = 420, margin = 56;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const auto sx = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    const auto sy = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", margin,
                  height - margin, width - margin, height - margin);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", margin,
                  margin, margin, height - margin);
    svg += buf;
    for (int tick = 0; tick <= 4; ++tick) {
        const double fx = xmin + (xmax - xmin) * tick / 4.0;
        const double fy = ymin + (ymax - ymin) * tick / 4.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" font-family=\"sans-serif\""
                      " font-size=\"11\">%.3g</text>\n",
                      sx(fx), height - margin + 18, fx);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\""
                      " font-size=\"11\">%.3g</text>\n",
                      margin - 6, sy(fy) + 4, fy);
        svg += buf;
    }
    int color_i = 0;
    int legend_y = margin;
    for (const auto& [name, pts] : series) {
        const char* color = colors[color_i % 5];
        if (kind == ChartKind::line) {
            std::string poly = "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                               "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : pts) {
                std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", sx(x), sy(y));
                poly += buf;
            }
            poly += "\"/>\n";
            svg += poly;
        } else {
            for (const auto& [x, y] : pts) {
                std::snprintf(buf, sizeof(buf),
                              "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2.2\" fill=\"%s\""
                              " fill-opacity=\"0.7\"/>\n",
                              sx(x), sy(y), color);
                svg += buf;
            }
        }
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\""
                      " fill=\"%s\">%s</text>\n",
                      width - margin - 150, legend_y, color, name.c_str());
        svg += buf;
        legend_y += 16;
        ++color_i;
    }
    svg += "</svg>\n";
    atomic_write_file(path, svg);
}

} // namespace

void write_svg_chart(
    const std::filesystem::path& path, const std::string& title,
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
    write_svg_impl(path, title, ChartKind::line, series);
}

void write_svg_scatter(
    const std::filesystem::path& path, const std::string& title,
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
    write_svg_impl(path, title, ChartKind::scatter, series);
}

double ExperimentResult::mean(const std::string& variant) const {
    for (const auto& [name, value] : mean_auc)
        if (name == variant) return value;
    throw ValidationError("experiment has no variant '" + variant + "'");
}

} // namespace uavad
