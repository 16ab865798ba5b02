#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "fas/channel.hpp"
#include "fas/detail/float128.hpp"
#include "fas/errors.hpp"
#include "fas/quadrature.hpp"
#include "fas/specfun.hpp"

namespace fas {

inline constexpr double kLog2E = 1.4426950408889634074;  // log2(e)

/// Frame budget: total latency, per-port scanning overhead, payload size and
/// the minimum blocklength that still admits valid coding.
struct FrameConfig {
    double l_tot = 500.0;     ///< total latency budget, channel uses
    double tau = 2.0;         ///< per-port overhead, channel uses (0 = FPA baseline)
    int payload_bits = 256;   ///< D
    double l_min = 50.0;      ///< minimum admissible blocklength

    void validate() const {
        if (!(l_min >= 1.0)) throw ConfigError("FrameConfig: l_min must be >= 1");
        if (!(l_tot > l_min)) throw ConfigError("FrameConfig: l_tot must exceed l_min");
        if (!(tau >= 0.0)) throw ConfigError("FrameConfig: tau must be >= 0");
        if (payload_bits < 1) throw ConfigError("FrameConfig: payload_bits must be >= 1");
    }
};

/// Effective blocklength L(N) = L_tot - N tau.
/// N is admissible while L(N) >= l_min; below that the port count is infeasible.
inline double effective_blocklength(const FrameConfig& frame, int n) {
    frame.validate();
    if (n < 1) throw DomainError("effective_blocklength: n must be >= 1");
    const double l = frame.l_tot - n * frame.tau;
    if (l < frame.l_min)
        throw InfeasibleError("effective_blocklength: L(N) fell below l_min for N=" +
                              std::to_string(n));
    return l;
}

inline bool is_port_feasible(const FrameConfig& frame, int n) {
    return n >= 1 && frame.l_tot - n * frame.tau >= frame.l_min;
}

/// Channel dispersion V(gamma) = (1 - (1+gamma)^{-2}) log2(e)^2.
inline double channel_dispersion(double gamma) {
    const double r = 1.0 + gamma;
    return (1.0 - 1.0 / (r * r)) * kLog2E * kLog2E;
}

/// Normal-approximation instantaneous BLER at SNR gamma,
/// Q((C(gamma) - D/L) / sqrt(V(gamma)/L)).
inline double instantaneous_bler(double gamma, const FrameConfig& frame, int n) {
    const double l = effective_blocklength(frame, n);
    if (!(gamma >= 0.0)) throw DomainError("instantaneous_bler: gamma must be >= 0");
    const double rate = frame.payload_bits / l;
    const double cap = std::log1p(gamma) * kLog2E;
    const double v = channel_dispersion(gamma);
    if (v <= 0.0) return rate > 0.0 ? 1.0 : 0.5;  // gamma = 0, zero capacity
    return specfun::gaussian_q((cap - rate) / std::sqrt(v / l));
}

/// Parameters of the linearized Q approximation of the instantaneous BLER.
struct LinearizationParams {
    double theta;     ///< 2^{D/L} - 1, the rate-matched SNR threshold
    double beta;      ///< slope, sqrt(L / (2 pi (2^{2D/L} - 1)))
    double delta_lo;  ///< theta - 1/(2 beta); may be negative for tiny payloads
    double delta_hi;  ///< theta + 1/(2 beta)
};

inline LinearizationParams linearization_for_blocklength(double l, int payload_bits) {
    const double rate = payload_bits / l;
    const double theta = std::exp2(rate) - 1.0;
    const double beta = std::sqrt(l / (2.0 * M_PI * (std::exp2(2.0 * rate) - 1.0)));
    return {theta, beta, theta - 0.5 / beta, theta + 0.5 / beta};
}

inline LinearizationParams linearization(const FrameConfig& frame, int n) {
    return linearization_for_blocklength(effective_blocklength(frame, n), frame.payload_bits);
}

/// Linearized instantaneous BLER (the integrand the closed form integrates).
inline double linearized_bler(double gamma, const LinearizationParams& lp) {
    if (gamma < lp.delta_lo) return 1.0;
    if (gamma > lp.delta_hi) return 0.0;
    return 0.5 - lp.beta * (gamma - lp.theta);
}

/// Closed-form average BLER with its log10 and evaluation diagnostics.
struct BlerEvaluation {
    double value = 0.0;        ///< clamped to [0, 1]
    double log10_value = 0.0;  ///< log10 of the unclamped positive value
    bool clamped = false;      ///< excursion beyond [0 - 1e-9, 1 + 1e-9] was clipped
    bool extended_precision = false;  ///< cancellation forced the float128 path
};

namespace detail {

template <class Real>
struct SignedSumResult {
    Real value;
    Real noise_mass;  // scale whose multiple of machine-eps bounds the result noise
};

// Average BLER of Theorem 1 over the subset table, evaluated in Real.
// The H-function differences are paired through expm1 so the per-term
// cancellation between H(delta_lo) and H(delta_hi) costs no precision; the
// remaining (intrinsic) cross-subset cancellation is what noise_mass tracks.
template <class Real>
SignedSumResult<Real> theorem1_eval(const SpectralChannel& ch, double gbar,
                                    const LinearizationParams& lp, double delta_lo_eff) {
    const Real g = gbar;
    const Real dl = delta_lo_eff;
    const Real dh = lp.delta_hi;
    const Real delta = dh - dl;
    const Real beta = lp.beta;
    const Real theta = lp.theta;

    auto cdf = [&](Real x) {
        Real f = Real(1);
        for (double lam : ch.eigenvalues) f *= -expm1_w(-x / (g * Real(lam)));
        return f;
    };
    const Real f_lo = cdf(dl);
    const Real f_hi = cdf(dh);

    specfun::NeumaierSum<Real> acc;
    acc.add(f_lo);
    acc.add((Real(0.5) + beta * theta) * (f_hi - f_lo));

    Real noise = fabs_w(f_lo) + fabs_w(f_hi - f_lo);
    for (const SubsetTerm& t : ch.subset_table) {
        const Real a = Real(t.xi) / g;
        const Real exp_lo = exp_w(-a * dl);
        const Real tail = (dh + Real(1) / a) * expm1_w(-a * delta);
        // H(dl, Xi) - H(dh, Xi) = -e^{-a dl} (delta + (dh + 1/a) expm1(-a delta))
        const Real bracket = -exp_lo * (delta + tail);
        acc.add(Real(-t.sign) * beta * bracket);
        noise += beta * exp_lo * (delta + fabs_w(tail));
    }
    return {acc.total(), noise};
}

}  // namespace detail

/// Average BLER under finite blocklength (Theorem 1 closed form).
///
/// delta_lo is clamped at 0 before use since the SNR support is [0, inf).
/// Evaluation runs in double first; when the compensated result is within
/// ~1e-10 of the accumulated cancellation noise it is redone in float128,
/// which resolves values down to ~1e-25 at better than 1e-9 relative.
inline BlerEvaluation avg_bler_closed_form_detail(const SpectralChannel& ch, double gbar,
                                                  const FrameConfig& frame, int n) {
    if (!(gbar > 0.0)) throw DomainError("avg_bler_closed_form: gbar must be > 0");
    const LinearizationParams lp = linearization(frame, n);
    const double dl_eff = std::max(lp.delta_lo, 0.0);

    BlerEvaluation out;
    const auto fast = detail::theorem1_eval<double>(ch, gbar, lp, dl_eff);
    constexpr double eps_d = std::numeric_limits<double>::epsilon();
    double value;
    if (fast.value > 64.0 * eps_d * fast.noise_mass / 1e-10) {
        value = fast.value;
    } else {
        out.extended_precision = true;
        const auto wide = detail::theorem1_eval<detail::f128>(ch, gbar, lp, dl_eff);
        value = static_cast<double>(wide.value);
        out.log10_value = (wide.value > 0)
                              ? static_cast<double>(detail::log_w(wide.value)) / M_LN10
                              : -400.0;
    }
    if (!out.extended_precision)
        out.log10_value = value > 0.0 ? std::log10(value) : -400.0;

    if (value < 0.0 || value > 1.0) {
        out.clamped = (value < -1e-9 || value > 1.0 + 1e-9);
        value = std::clamp(value, 0.0, 1.0);
    }
    out.value = value;
    return out;
}

inline double avg_bler_closed_form(const SpectralChannel& ch, double gbar,
                                   const FrameConfig& frame, int n) {
    return avg_bler_closed_form_detail(ch, gbar, frame, n).value;
}

/// Numerical-integration baseline for the average BLER.
///
/// With use_exact_q the integrand is the exact normal-approximation BLER
/// (Eq. 4-style); otherwise the linearized form, which makes the integral
/// agree with the closed form to quadrature tolerance. The PDF enters in its
/// cancellation-free product form, so small averages retain relative accuracy.
inline double avg_bler_quadrature(const SpectralChannel& ch, double gbar, const FrameConfig& frame,
                                  int n, bool use_exact_q = false) {
    if (!(gbar > 0.0)) throw DomainError("avg_bler_quadrature: gbar must be > 0");
    const double l = effective_blocklength(frame, n);
    const LinearizationParams lp = linearization_for_blocklength(l, frame.payload_bits);
    const double dl_eff = std::max(lp.delta_lo, 0.0);

    const double lam_max = ch.eigenvalues.front();
    const double tail_x =
        gbar * lam_max * (std::log(static_cast<double>(ch.effective_rank)) + 32.3);

    if (!use_exact_q) {
        const double hi = lp.delta_hi;
        const double bps[] = {dl_eff, lp.theta};
        auto f = [&](double x) {
            return linearized_bler(x, lp) * detail::snr_pdf_stable(ch, gbar, x);
        };
        return quad::integrate_adaptive(f, 0.0, hi, 1e-300, 1e-12, bps, 4000).value;
    }
    const double hi = std::max(tail_x, 4.0 * lp.delta_hi);
    const double bps[] = {lp.theta, lp.delta_hi, 4.0 * lp.delta_hi};
    auto f = [&](double x) {
        return instantaneous_bler(x, frame, n) * detail::snr_pdf_stable(ch, gbar, x);
    };
    return quad::integrate_adaptive(f, 0.0, hi, 1e-300, 1e-12, bps, 4000).value;
}

/// Coding penalty coefficient K(M, L) of the high-SNR BLER asymptote:
/// the integral of the instantaneous BLER against d(x^M).
inline double coding_penalty(int m, double l, int payload_bits) {
    if (m < 1) throw DomainError("coding_penalty: m must be >= 1");
    if (!(l > 0.0)) throw DomainError("coding_penalty: l must be > 0");
    const double rate = payload_bits / l;
    auto q_arg = [&](double x) {
        const double v = channel_dispersion(x);
        if (v <= 0.0) return -std::numeric_limits<double>::infinity();
        return (std::log1p(x) * kLog2E - rate) / std::sqrt(v / l);
    };
    // upper limit where the Q factor is below ~1e-18
    double lo = 1e-12, hi = 1.0;
    while (q_arg(hi) < 8.75) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (q_arg(mid) < 8.75 ? lo : hi) = mid;
    }
    const double x_up = hi;
    const double theta = std::exp2(rate) - 1.0;
    auto f = [&](double x) {
        const double q = specfun::gaussian_q(q_arg(x));
        return q * m * std::pow(x, m - 1);
    };
    const double bps[] = {std::min(theta, x_up)};
    const double k =
        quad::integrate_adaptive(f, 0.0, x_up, 1e-300, 1e-9, bps, 4000).value;
    if (!std::isfinite(k) || !(k > 0.0))
        throw NumericalError("coding_penalty: integral overflowed or degenerated");
    return k;
}

/// Diversity order, array gain and coding penalty of the high-SNR asymptote.
struct AsymptoticBler {
    int diversity_order;    ///< M = rank of the retained spectrum
    double array_gain;      ///< geometric mean of the retained eigenvalues
    double coding_penalty;  ///< K(M, L(N))
};

/// High-SNR asymptote K(M, L(N)) (G_a gbar)^{-M} and its ingredients.
inline std::pair<AsymptoticBler, double> asymptotic_bler(const SpectralChannel& ch, double gbar,
                                                         const FrameConfig& frame, int n) {
    if (!(gbar > 0.0)) throw DomainError("asymptotic_bler: gbar must be > 0");
    const double l = effective_blocklength(frame, n);
    const int m = ch.effective_rank;
    double log_ga = 0.0;
    for (double lam : ch.eigenvalues) log_ga += std::log(lam);
    log_ga /= m;
    const double ga = std::exp(log_ga);
    const double k = coding_penalty(m, l, frame.payload_bits);
    // log domain dodges underflow at extreme SNR
    const double log10_val = std::log10(k) - m * (log_ga + std::log(gbar)) / M_LN10;
    return {AsymptoticBler{m, ga, k}, std::pow(10.0, log10_val)};
}

/// Power-law fit K(M, L) ~ A L^{-k} over a geometric blocklength grid.
struct SensitivityFit {
    double k;          ///< fitted sensitivity exponent (slope of -log K vs log L)
    double r_squared;  ///< goodness of the log-log fit
};

inline SensitivityFit sensitivity_exponent(int m, const FrameConfig& frame) {
    frame.validate();
    if (m < 1) throw DomainError("sensitivity_exponent: m must be >= 1");
    constexpr int kGrid = 12;
    const double ratio = frame.l_tot / frame.l_min;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < kGrid; ++i) {
        const double l = frame.l_min * std::pow(ratio, static_cast<double>(i) / (kGrid - 1));
        const double x = std::log(l);
        const double y = -std::log(coding_penalty(m, l, frame.payload_bits));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = kGrid * sxx - sx * sx;
    const double k = (kGrid * sxy - sx * sy) / denom;
    const double sst = syy - sy * sy / kGrid;
    const double b = (sy - k * sx) / kGrid;
    double sse = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        const double l = frame.l_min * std::pow(ratio, static_cast<double>(i) / (kGrid - 1));
        const double x = std::log(l);
        const double y = -std::log(coding_penalty(m, l, frame.payload_bits));
        const double r = y - (k * x + b);
        sse += r * r;
    }
    const double r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;
    if (!(k > 0.0))
        throw ModelError("sensitivity_exponent: power law K ~ L^-k does not hold (k <= 0)");
    return {k, r2};
}

/// Largest per-port switching delay for which the FAS high-SNR BLER does not
/// exceed the FPA baseline, under the K(M,L) ~ A L^{-k} power-law model.
struct ReliabilityThreshold {
    double tau_eq = 0.0;   ///< clamped at 0
    bool clamped = false;  ///< raw threshold was negative (FAS never beneficial)
    SensitivityFit fit{};
};

inline ReliabilityThreshold tau_threshold_reliability(const SpectralChannel& ch, double gbar,
                                                      const FrameConfig& frame, int n) {
    if (!(gbar > 0.0)) throw DomainError("tau_threshold_reliability: gbar must be > 0");
    if (n < 1) throw DomainError("tau_threshold_reliability: n must be >= 1");
    const int m = ch.effective_rank;
    ReliabilityThreshold out;
    out.fit = sensitivity_exponent(m, frame);
    double log_ga = 0.0;
    for (double lam : ch.eigenvalues) log_ga += std::log(lam);
    log_ga /= m;
    const double log_km = std::log(coding_penalty(m, frame.l_tot, frame.payload_bits));
    const double log_k1 = std::log(coding_penalty(1, frame.l_tot, frame.payload_bits));
    // inner ratio of the boundary condition K(M,Ltot) (L/Ltot)^{-k} <= K1 Ga^M gbar^{M-1}
    const double log_inner = log_km - log_k1 - m * log_ga - (m - 1) * std::log(gbar);
    const double raw = (frame.l_tot / n) * (1.0 - std::exp(log_inner / out.fit.k));
    if (raw < 0.0) {
        out.clamped = true;
        out.tau_eq = 0.0;
    } else {
        out.tau_eq = raw;
    }
    return out;
}

}  // namespace fas
