#pragma once

// Independent verification routines used only by the test suites. Each oracle
// deliberately takes a different algorithmic route than the library code it
// checks.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracles {

// ----------------------------------------------------------------- dense QP
// Log-barrier interior-point solve of the SVM dual:
//   maximize  sum(a) - 0.5 a^T Q a
//   s.t.      0 <= a_i <= C_i,  y^T a = 0
// Small and dense; converges to ~1e-9 duality gap on the n <= 20 instances the
// acceptance suite uses.
struct QpResult {
    std::vector<double> alpha;
    double objective = 0.0;
};

inline QpResult solve_svm_dual_qp(const std::vector<std::vector<double>>& q,
                                  const std::vector<double>& y, const std::vector<double>& box) {
    const size_t n = q.size();

    // Strictly interior feasible start: a_i = delta * C_i / S_class.
    std::vector<double> a(n);
    double s_pos = 0.0, s_neg = 0.0;
    for (size_t i = 0; i < n; ++i) (y[i] > 0 ? s_pos : s_neg) += box[i];
    const double delta = 0.25 * std::min(s_pos, s_neg);
    for (size_t i = 0; i < n; ++i) a[i] = delta * box[i] / (y[i] > 0 ? s_pos : s_neg);

    const auto dual_value = [&](const std::vector<double>& x) {
        double v = 0.0;
        for (size_t i = 0; i < n; ++i) {
            v += x[i];
            double qx = 0.0;
            for (size_t j = 0; j < n; ++j) qx += q[i][j] * x[j];
            v -= 0.5 * x[i] * qx;
        }
        return v;
    };

    double t = 1.0;
    const double m = 2.0 * static_cast<double>(n); // barrier constraint count
    while (m / t > 1e-10) {
        // Newton iterations on f(a) = -t * dual(a) - sum log(a) - sum log(C-a)
        // restricted to the hyperplane y^T a = 0.
        for (int newton = 0; newton < 60; ++newton) {
            std::vector<double> grad(n);
            std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
            for (size_t i = 0; i < n; ++i) {
                double qx = 0.0;
                for (size_t j = 0; j < n; ++j) {
                    qx += q[i][j] * a[j];
                    hess[i][j] = t * q[i][j];
                }
                grad[i] = -t * (1.0 - qx) - 1.0 / a[i] + 1.0 / (box[i] - a[i]);
                hess[i][i] += 1.0 / (a[i] * a[i]) + 1.0 / ((box[i] - a[i]) * (box[i] - a[i]));
            }
            // KKT system [H y; y^T 0] [dx; nu] = [-g; 0] via Gaussian elimination.
            const size_t dim = n + 1;
            std::vector<std::vector<double>> sys(dim, std::vector<double>(dim + 1, 0.0));
            for (size_t i = 0; i < n; ++i) {
                for (size_t j = 0; j < n; ++j) sys[i][j] = hess[i][j];
                sys[i][n] = y[i];
                sys[i][dim] = -grad[i];
                sys[n][i] = y[i];
            }
            for (size_t col = 0; col < dim; ++col) {
                size_t piv = col;
                for (size_t r = col + 1; r < dim; ++r)
                    if (std::abs(sys[r][col]) > std::abs(sys[piv][col])) piv = r;
                std::swap(sys[col], sys[piv]);
                if (std::abs(sys[col][col]) < 1e-300) throw std::runtime_error("singular KKT");
                for (size_t r = 0; r < dim; ++r) {
                    if (r == col) continue;
                    const double f = sys[r][col] / sys[col][col];
                    for (size_t c2 = col; c2 <= dim; ++c2) sys[r][c2] -= f * sys[col][c2];
                }
            }
            std::vector<double> dx(n);
            double decrement = 0.0;
            for (size_t i = 0; i < n; ++i) {
                dx[i] = sys[i][dim] / sys[i][i];
                decrement += -grad[i] * dx[i];
            }
            if (decrement / 2.0 < 1e-12) break;

            // Backtrack to stay strictly inside the box.
            double step = 1.0;
            for (size_t i = 0; i < n; ++i) {
                if (dx[i] < 0.0) step = std::min(step, 0.99 * (-a[i] / dx[i]));
                if (dx[i] > 0.0) step = std::min(step, 0.99 * ((box[i] - a[i]) / dx[i]));
            }
            const auto barrier_obj = [&](const std::vector<double>& x) {
                double v = -t * dual_value(x);
                for (size_t i = 0; i < n; ++i) v += -std::log(x[i]) - std::log(box[i] - x[i]);
                return v;
            };
            const double f0 = barrier_obj(a);
            double gd = 0.0;
            for (size_t i = 0; i < n; ++i) gd += grad[i] * dx[i];
            while (step > 1e-14) {
                std::vector<double> trial = a;
                for (size_t i = 0; i < n; ++i) trial[i] += step * dx[i];
                if (barrier_obj(trial) <= f0 + 0.25 * step * gd) {
                    a = std::move(trial);
                    break;
                }
                step *= 0.5;
            }
            if (step <= 1e-14) break;
        }
        t *= 8.0;
    }
    return {a, dual_value(a)};
}

// -------------------------------------------------------- exhaustive k-means
// Best 2-partition objective over all assignments (n <= 20 or so).
inline double best_two_partition_objective(const std::vector<std::vector<double>>& pts) {
    const size_t n = pts.size();
    const size_t d = pts[0].size();
    double best = std::numeric_limits<double>::infinity();
    for (uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<double> c0(d, 0.0), c1(d, 0.0);
        size_t n0 = 0, n1 = 0;
        for (size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                for (size_t k = 0; k < d; ++k) c0[k] += pts[i][k];
                ++n0;
            } else {
                for (size_t k = 0; k < d; ++k) c1[k] += pts[i][k];
                ++n1;
            }
        }
        for (size_t k = 0; k < d; ++k) {
            c0[k] /= static_cast<double>(n0);
            c1[k] /= static_cast<double>(n1);
        }
        double obj = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const auto& c = (mask & (1u << i)) ? c0 : c1;
            for (size_t k = 0; k < d; ++k) obj += (pts[i][k] - c[k]) * (pts[i][k] - c[k]);
        }
        best = std::min(best, obj);
    }
    return best;
}

// ------------------------------------------------- power-iteration eigenpairs
// Top eigenvectors of a symmetric matrix by power iteration with deflation.
inline std::pair<std::vector<double>, std::vector<std::vector<double>>> top_eigenpairs(
    std::vector<std::vector<double>> a, int count, uint64_t seed) {
    const size_t n = a.size();
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    uint64_t state = seed * 2654435761u + 1;
    const auto next01 = [&]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int k = 0; k < count; ++k) {
        std::vector<double> v(n);
        for (double& x : v) x = next01() - 0.5;
        double lambda = 0.0;
        for (int iter = 0; iter < 20000; ++iter) {
            std::vector<double> w(n, 0.0);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j) w[i] += a[i][j] * v[j];
            double norm = 0.0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < 1e-300) break;
            for (size_t i = 0; i < n; ++i) w[i] /= norm;
            double diff = 0.0;
            for (size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(w[i] - v[i]));
            v = std::move(w);
            lambda = norm;
            if (diff < 1e-14 && iter > 10) break;
        }
        values.push_back(lambda);
        vectors.push_back(v);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) a[i][j] -= lambda * v[i] * v[j];
    }
    return {values, vectors};
}

} // namespace oracles
