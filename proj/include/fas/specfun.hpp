#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "fas/errors.hpp"

namespace fas::specfun {

/// Tolerance pair used by callers that want to assert accuracy contracts.
struct AccuracySpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw ConfigError("AccuracySpec: tolerances must be positive");
    }
};

namespace detail {

inline void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw DomainError(std::string(who) + ": non-finite argument");
}

// erfc via Cody's rational Chebyshev approximations (Math. Comp. 1969).
// Three intervals: erf on [0, 0.46875], erfc on (0.46875, 4], erfc on (4, inf).
inline double erfc_cody(double x) {
    static constexpr double a[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021,
                                    3209.37758913846947, .185777706184603153};
    static constexpr double b[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228,
                                    2844.23683343917062};
    static constexpr double c[9] = {.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                                    298.635138197400131,  881.95222124176909,  1712.04761263407058,
                                    2051.07837782607147,  1230.33935479799725, 2.15311535474403846e-8};
    static constexpr double d[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858,
                                    1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
                                    3439.36767414372164, 1230.33935480374942};
    static constexpr double p[6] = {.305326634961232344, .360344899949804439, .125781726111229246,
                                    .0160837851487422766, 6.58749161529837803e-4, .0163153871373020978};
    static constexpr double q[5] = {2.56852019228982242, 1.87295284992346047, .527905102951428412,
                                    .0605183413124413191, .00233520497626869185};
    constexpr double sqrpi = 0.56418958354775628695;  // 1/sqrt(pi)
    constexpr double thresh = 0.46875;
    constexpr double xbig = 26.543;

    const double y = std::fabs(x);
    double result;
    if (y <= thresh) {
        const double ysq = (y > 1.11e-16) ? y * y : 0.0;
        double xnum = a[4] * ysq;
        double xden = ysq;
        for (int i = 0; i < 3; ++i) {
            xnum = (xnum + a[i]) * ysq;
            xden = (xden + b[i]) * ysq;
        }
        const double erf_val = x * (xnum + a[3]) / (xden + b[3]);
        return 1.0 - erf_val;  // works for both signs of x
    }
    if (y <= 4.0) {
        double xnum = c[8] * y;
        double xden = y;
        for (int i = 0; i < 7; ++i) {
            xnum = (xnum + c[i]) * y;
            xden = (xden + d[i]) * y;
        }
        result = (xnum + c[7]) / (xden + d[7]);
        const double ysq = std::trunc(y * 16.0) / 16.0;
        const double del = (y - ysq) * (y + ysq);
        result *= std::exp(-ysq * ysq) * std::exp(-del);
    } else if (y < xbig) {
        const double ysq = 1.0 / (y * y);
        double xnum = p[5] * ysq;
        double xden = ysq;
        for (int i = 0; i < 4; ++i) {
            xnum = (xnum + p[i]) * ysq;
            xden = (xden + q[i]) * ysq;
        }
        result = ysq * (xnum + p[4]) / (xden + q[4]);
        result = (sqrpi - result) / y;
        const double ysq2 = std::trunc(y * 16.0) / 16.0;
        const double del = (y - ysq2) * (y + ysq2);
        result *= std::exp(-ysq2 * ysq2) * std::exp(-del);
    } else {
        result = 0.0;
    }
    if (x < 0.0) result = 2.0 - result;
    return result;
}

}  // namespace detail

/// Zero-order Bessel function of the first kind.
///
/// Power series for |x| <= 10, Hankel asymptotic expansion beyond.
/// Absolute error stays well below 1e-7 over |x| <= 1e4.
inline double bessel_j0(double x) {
    detail::require_finite(x, "bessel_j0");
    const double ax = std::fabs(x);  // J0 is even
    if (ax <= 10.0) {
        const double q = 0.25 * ax * ax;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -q / (static_cast<double>(k) * k);
            sum += term;
            if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        }
        return sum;
    }
    // J0(x) ~ sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)],
    // with  A_m = A_{m-1} (2m-1)^2 / (8m)  feeding the two alternating series.
    double am = 1.0;
    double psum = 1.0, qsum = 0.0;
    double xpow = 1.0;
    const double inv_x = 1.0 / ax;
    for (int m = 1; m <= 12; ++m) {
        const double tm = 2.0 * m - 1.0;
        am *= tm * tm / (8.0 * m);
        xpow *= inv_x;
        const double t = am * xpow;
        const int r = m % 4;
        if (r == 1)
            qsum -= t;
        else if (r == 2)
            psum -= t;
        else if (r == 3)
            qsum += t;
        else
            psum += t;
    }
    const double chi = ax - 0.25 * M_PI;
    return std::sqrt(2.0 / (M_PI * ax)) * (psum * std::cos(chi) - qsum * std::sin(chi));
}

/// Gaussian Q-function, Q(x) = P[N(0,1) > x] = erfc(x/sqrt(2))/2.
inline double gaussian_q(double x) {
    detail::require_finite(x, "gaussian_q");
    return 0.5 * detail::erfc_cody(x * M_SQRT1_2);
}

/// Standard normal density.
inline double gaussian_pdf(double x) {
    return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

/// Inverse of the Gaussian Q-function on (0, 1).
///
/// Acklam's rational estimate refined by two Newton steps against gaussian_q;
/// round-trip error is a few ulps across the full open interval.
inline double gaussian_q_inv(double prob) {
    detail::require_finite(prob, "gaussian_q_inv");
    if (!(prob > 0.0 && prob < 1.0))
        throw DomainError("gaussian_q_inv: p must lie strictly inside (0, 1)");
    // Acklam approximates Phi^{-1}(p) where Phi is the lower CDF; Q^{-1}(p) = -Phi^{-1}(p).
    static constexpr double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    // Evaluate Phi^{-1}(prob) and negate; both tail branches then see an
    // exactly representable tail probability.
    constexpr double p_low = 0.02425;
    double z;
    if (prob < p_low) {
        const double r = std::sqrt(-2.0 * std::log(prob));
        z = (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5]) /
            ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double r = prob - 0.5;
        const double s = r * r;
        z = (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r /
            (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0);
    } else {
        const double r = std::sqrt(-2.0 * std::log1p(-prob));
        z = -(((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5]) /
            ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0);
    }
    double x = -z;  // Q^{-1}(prob)
    for (int it = 0; it < 2; ++it) {
        const double phi = gaussian_pdf(x);
        if (phi <= 0.0) break;
        x += (gaussian_q(x) - prob) / phi;
    }
    return x;
}

/// e^x * E1(x) for x > 0, evaluated without intermediate overflow.
///
/// The modified-Lentz continued fraction computes the scaled product
/// directly for x > 1; below that the series for E1 is scaled by e^x.
inline double exp_e1_scaled(double x) {
    detail::require_finite(x, "exp_e1_scaled");
    if (!(x > 0.0)) throw DomainError("exp_e1_scaled: requires x > 0");
    if (x > 1.0) {
        // e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- 9/(...))))
        constexpr double tiny = 1e-300;
        double b = x + 1.0;
        double c = 1.0 / tiny;
        double dd = 1.0 / b;
        double h = dd;
        for (int i = 1; i <= 200; ++i) {
            const double an = -static_cast<double>(i) * i;
            b += 2.0;
            dd = an * dd + b;
            if (std::fabs(dd) < tiny) dd = tiny;
            c = b + an / c;
            if (std::fabs(c) < tiny) c = tiny;
            dd = 1.0 / dd;
            const double delta = c * dd;
            h *= delta;
            if (std::fabs(delta - 1.0) < 1e-16) return h;
        }
        throw NumericalError("exp_e1_scaled: continued fraction failed to converge");
    }
    constexpr double euler_gamma = 0.57721566490153286061;
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
        term *= -x / k;
        sum -= term / k;
        if (std::fabs(term) < 1e-18 * (std::fabs(sum) + 1.0)) break;
    }
    return std::exp(x) * (-euler_gamma - std::log(x) + sum);
}

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
inline double exp_integral_e1(double x) {
    detail::require_finite(x, "exp_integral_e1");
    if (!(x > 0.0)) throw DomainError("exp_integral_e1: requires x > 0");
    if (x > 1.0) return std::exp(-x) * exp_e1_scaled(x);
    constexpr double euler_gamma = 0.57721566490153286061;
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
        term *= -x / k;
        sum -= term / k;
        if (std::fabs(term) < 1e-18 * (std::fabs(sum) + 1.0)) break;
    }
    return -euler_gamma - std::log(x) + sum;
}

/// Neumaier (Kahan-Babuska) compensated accumulator.
///
/// Tracks the running sum of absolute values as well, which callers use to
/// bound the cancellation noise of alternating series.
template <class Real = double>
class NeumaierSum {
   public:
    void add(Real value) {
        const Real t = sum_ + value;
        if (fabs_(sum_) >= fabs_(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
        abs_sum_ += fabs_(value);
    }
    Real total() const { return sum_ + comp_; }
    Real abs_total() const { return abs_sum_; }

   private:
    static Real fabs_(Real v) { return v < Real(0) ? -v : v; }
    Real sum_ = Real(0);
    Real comp_ = Real(0);
    Real abs_sum_ = Real(0);
};

/// Compensated sum of a sequence; order-insensitive to ~1e-16 * sum(|terms|).
inline double compensated_sum(std::span<const double> terms) {
    NeumaierSum<double> acc;
    for (double t : terms) {
        detail::require_finite(t, "compensated_sum");
        acc.add(t);
    }
    return acc.total();
}

}  // namespace fas::specfun
