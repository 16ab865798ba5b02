#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fas/errors.hpp"

namespace fas::linalg {

/// Dense symmetric matrix, row-major storage.
class SymmetricMatrix {
   public:
    explicit SymmetricMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 1) throw ConfigError("SymmetricMatrix: order must be >= 1");
    }

    int order() const { return n_; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    void set_symmetric(int i, int j, double v) {
        at(i, j) = v;
        at(j, i) = v;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += at(i, i);
        return t;
    }

    /// Largest |entry|, used to scale residual and convergence thresholds.
    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::fabs(v));
        return m;
    }

   private:
    int n_;
    std::vector<double> a_;
};

/// Eigenvalues (descending) and, optionally, the matching orthonormal
/// eigenvectors stored column-major: vectors[i + n*k] is component i of
/// eigenvector k.
struct EigenSystem {
    std::vector<double> values;
    std::vector<double> vectors;
    int n = 0;
    bool has_vectors = false;

    double vector_component(int i, int k) const { return vectors[static_cast<std::size_t>(k) * n + i]; }
};

/// Cyclic Jacobi diagonalization. Quadratically convergent for symmetric
/// input; the off-diagonal Frobenius mass is driven below ~1e-14 * |A|.
inline EigenSystem jacobi_eigensystem(SymmetricMatrix mat, bool want_vectors = false,
                                      int max_sweeps = 100) {
    const int n = mat.order();
    EigenSystem sys;
    sys.n = n;
    sys.has_vectors = want_vectors;
    if (want_vectors) {
        sys.vectors.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) sys.vectors[static_cast<std::size_t>(i) * n + i] = 1.0;
    }
    if (n == 1) {
        sys.values = {mat.at(0, 0)};
        return sys;
    }

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += mat.at(i, j) * mat.at(i, j);
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(mat.max_abs(), 1e-300);
    const double tol = 1e-15 * scale * n;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= tol) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = mat.at(p, q);
                if (std::fabs(apq) <= 1e-18 * scale) continue;
                const double app = mat.at(p, p);
                const double aqq = mat.at(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                mat.at(p, p) = app - t * apq;
                mat.at(q, q) = aqq + t * apq;
                mat.at(p, q) = 0.0;
                mat.at(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = mat.at(i, p);
                    const double aiq = mat.at(i, q);
                    const double new_ip = aip - s * (aiq + tau * aip);
                    const double new_iq = aiq + s * (aip - tau * aiq);
                    mat.at(i, p) = new_ip;
                    mat.at(p, i) = new_ip;
                    mat.at(i, q) = new_iq;
                    mat.at(q, i) = new_iq;
                }
                if (want_vectors) {
                    for (int i = 0; i < n; ++i) {
                        const double vip = sys.vectors[static_cast<std::size_t>(p) * n + i];
                        const double viq = sys.vectors[static_cast<std::size_t>(q) * n + i];
                        sys.vectors[static_cast<std::size_t>(p) * n + i] = vip - s * (viq + tau * vip);
                        sys.vectors[static_cast<std::size_t>(q) * n + i] = viq + s * (vip - tau * viq);
                    }
                }
            }
        }
    }
    if (!converged && off_norm() > tol)
        throw NumericalError("jacobi_eigensystem: did not converge");

    sys.values.resize(n);
    for (int i = 0; i < n; ++i) sys.values[i] = mat.at(i, i);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sys.values[a] > sys.values[b]; });
    std::vector<double> sorted_vals(n);
    std::vector<double> sorted_vecs;
    if (want_vectors) sorted_vecs.resize(sys.vectors.size());
    for (int k = 0; k < n; ++k) {
        sorted_vals[k] = sys.values[order[k]];
        if (want_vectors)
            std::copy_n(sys.vectors.begin() + static_cast<std::size_t>(order[k]) * n, n,
                        sorted_vecs.begin() + static_cast<std::size_t>(k) * n);
    }
    sys.values = std::move(sorted_vals);
    if (want_vectors) sys.vectors = std::move(sorted_vecs);
    return sys;
}

}  // namespace fas::linalg
