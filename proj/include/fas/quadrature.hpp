#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "fas/errors.hpp"

namespace fas::quad {

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

template <class F>
inline void gk15(F&& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    kronrod = resk * h;
    err = std::fabs((resk - resg) * h);
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
///
/// Splits the worst panel until the global error estimate drops below
/// max(abs_tol, rel_tol * |integral|). Optional breakpoints seed the initial
/// partition, which is how callers isolate integrand kinks.
template <class F>
IntegrationResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                     std::span<const double> breakpoints = {},
                                     int max_intervals = 5000) {
    IntegrationResult out;
    if (!(b > a)) return out;

    std::vector<double> edges;
    edges.push_back(a);
    for (double bp : breakpoints)
        if (bp > a && bp < b) edges.push_back(bp);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    std::priority_queue<detail::Panel> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        detail::Panel p{edges[i], edges[i + 1], 0.0, 0.0};
        detail::gk15(f, p.a, p.b, p.value, p.error);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    int n_panels = static_cast<int>(edges.size()) - 1;
    auto goal = [&] { return std::max(abs_tol, rel_tol * std::fabs(total)); };
    while (total_err > goal() && n_panels < max_intervals) {
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // panel narrower than one ulp; its error can no longer shrink
            total_err -= worst.error;
            continue;
        }
        detail::Panel left{worst.a, mid, 0.0, 0.0};
        detail::Panel right{mid, worst.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n_panels;
    }
    if (total_err > 10.0 * goal())
        throw NumericalError("integrate_adaptive: failed to reach requested tolerance");

    out.value = total;
    out.error_estimate = total_err;
    out.intervals = n_panels;
    return out;
}

}  // namespace fas::quad
