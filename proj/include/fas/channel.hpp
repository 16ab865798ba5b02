#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fas/errors.hpp"
#include "fas/linalg.hpp"
#include "fas/specfun.hpp"

namespace fas {

/// Geometry and fading scale of the port array; defines the covariance matrix.
struct CorrelationSpec {
    int n_ports = 50;            ///< N
    double aperture = 5.0;       ///< W, length in wavelengths
    double sigma2 = 1.0;         ///< large-scale fading coefficient
    double energy_fraction = 0.99;
    int rank_cap = 20;

    void validate() const {
        if (n_ports < 1) throw ConfigError("CorrelationSpec: n_ports must be >= 1");
        if (!(aperture > 0.0)) throw ConfigError("CorrelationSpec: aperture must be > 0");
        if (!(sigma2 > 0.0)) throw ConfigError("CorrelationSpec: sigma2 must be > 0");
        if (!(energy_fraction > 0.0 && energy_fraction <= 1.0))
            throw ConfigError("CorrelationSpec: energy_fraction must lie in (0, 1]");
        if (rank_cap < 1 || rank_cap > 24)
            throw ConfigError("CorrelationSpec: rank_cap must lie in [1, 24]");
    }
};

/// One inclusion-exclusion term: sign (-1)^{k+1} and decay rate
/// Xi_s = sum_{j in s} 1/lambda_j over a nonempty eigenvalue subset s.
struct SubsetTerm {
    double xi;
    double sign;
};

/// Truncated eigenvalue spectrum plus the signed subset-rate table that powers
/// every closed form. Immutable after construction; safe to share across threads.
struct SpectralChannel {
    std::vector<double> eigenvalues;      ///< descending, strictly positive, length M
    int effective_rank = 0;               ///< M
    double total_energy = 0.0;            ///< trace(J) = N sigma^2
    std::vector<SubsetTerm> subset_table; ///< 2^M - 1 entries, bitmask counter order
    bool truncation_shortfall = false;    ///< rank_cap bound before reaching energy_fraction
    int n_ports = 0;
    double sigma2 = 1.0;
};

/// Full (untruncated) decomposition; eigenvectors present only when requested.
struct PhysicalChannel {
    std::vector<double> eigenvalues;  ///< all N values, descending, clamped at 0
    std::vector<double> eigenvectors; ///< column-major N x N, empty unless requested
    int n_ports = 0;

    double eigenvector(int i, int k) const {
        return eigenvectors[static_cast<std::size_t>(k) * n_ports + i];
    }
};

/// Spatial covariance under the Jakes isotropic-scattering model:
/// J(m,n) = sigma^2 J0(2 pi |m-n| W / (N-1)).
inline linalg::SymmetricMatrix build_covariance(const CorrelationSpec& spec) {
    spec.validate();
    const int n = spec.n_ports;
    linalg::SymmetricMatrix j(n);
    if (n == 1) {
        j.at(0, 0) = spec.sigma2;
        return j;
    }
    const double step = 2.0 * M_PI * spec.aperture / (n - 1);
    for (int m = 0; m < n; ++m) {
        j.at(m, m) = spec.sigma2;
        for (int k = m + 1; k < n; ++k)
            j.set_symmetric(m, k, spec.sigma2 * specfun::bessel_j0(step * (k - m)));
    }
    return j;
}

namespace detail {

inline std::vector<SubsetTerm> enumerate_subsets(const std::vector<double>& eigenvalues) {
    const int m = static_cast<int>(eigenvalues.size());
    std::vector<double> inv(m);
    for (int i = 0; i < m; ++i) inv[i] = 1.0 / eigenvalues[i];
    const std::uint32_t count = (1u << m) - 1u;
    std::vector<double> xi_by_mask(count + 1, 0.0);
    std::vector<SubsetTerm> table(count);
    for (std::uint32_t mask = 1; mask <= count; ++mask) {
        const std::uint32_t low = mask & (~mask + 1u);
        const double xi = xi_by_mask[mask ^ low] + inv[std::countr_zero(low)];
        xi_by_mask[mask] = xi;
        table[mask - 1] = {xi, (std::popcount(mask) % 2 == 1) ? 1.0 : -1.0};
    }
    return table;
}

}  // namespace detail

/// Eigendecomposition of J with energy truncation.
///
/// Eigenvalues in [-1e-10 sigma^2, 0) are treated as floating-point noise and
/// clamped to zero; anything below -1e-6 sigma^2 contradicts positive
/// semi-definiteness of the Jakes model and raises ModelError. Truncation
/// keeps the shortest descending prefix reaching energy_fraction of the trace,
/// capped at rank_cap.
inline std::pair<SpectralChannel, PhysicalChannel> spectral_decompose(
    const linalg::SymmetricMatrix& j, const CorrelationSpec& spec, bool want_eigenvectors = false) {
    spec.validate();
    if (j.order() != spec.n_ports)
        throw UsageError("spectral_decompose: matrix order does not match spec.n_ports");

    linalg::EigenSystem sys = linalg::jacobi_eigensystem(j, want_eigenvectors);

    PhysicalChannel phys;
    phys.n_ports = spec.n_ports;
    phys.eigenvalues = sys.values;
    for (double& v : phys.eigenvalues) {
        if (v < 0.0) {
            if (v < -1e-6 * spec.sigma2)
                throw ModelError("spectral_decompose: covariance has a genuinely negative eigenvalue");
            v = 0.0;
        }
    }
    if (want_eigenvectors) phys.eigenvectors = std::move(sys.vectors);

    SpectralChannel ch;
    ch.n_ports = spec.n_ports;
    ch.sigma2 = spec.sigma2;
    ch.total_energy = static_cast<double>(spec.n_ports) * spec.sigma2;

    const double target = spec.energy_fraction * ch.total_energy;
    double cum = 0.0;
    for (double v : phys.eigenvalues) {
        if (v <= 0.0) break;
        if (cum >= target) break;
        if (static_cast<int>(ch.eigenvalues.size()) == spec.rank_cap) {
            ch.truncation_shortfall = true;
            break;
        }
        ch.eigenvalues.push_back(v);
        cum += v;
    }
    if (ch.eigenvalues.empty()) ch.eigenvalues.push_back(phys.eigenvalues.front());
    ch.effective_rank = static_cast<int>(ch.eigenvalues.size());
    ch.subset_table = detail::enumerate_subsets(ch.eigenvalues);
    return {std::move(ch), std::move(phys)};
}

/// Convenience: covariance build + decomposition in one call.
inline SpectralChannel make_spectral_channel(const CorrelationSpec& spec) {
    return spectral_decompose(build_covariance(spec), spec, false).first;
}

/// Spectral channel constructed directly from a given eigenvalue spectrum.
/// Used for synthetic configurations in experiments and tests.
inline SpectralChannel spectral_channel_from_eigenvalues(std::vector<double> eigenvalues,
                                                         double sigma2 = 1.0) {
    if (eigenvalues.empty())
        throw ConfigError("spectral_channel_from_eigenvalues: need at least one eigenvalue");
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (!(eigenvalues[i] > 0.0))
            throw ConfigError("spectral_channel_from_eigenvalues: eigenvalues must be > 0");
        if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
            throw ConfigError("spectral_channel_from_eigenvalues: eigenvalues must be descending");
    }
    if (eigenvalues.size() > 24)
        throw ConfigError("spectral_channel_from_eigenvalues: at most 24 eigenvalues supported");
    SpectralChannel ch;
    ch.eigenvalues = std::move(eigenvalues);
    ch.effective_rank = static_cast<int>(ch.eigenvalues.size());
    ch.sigma2 = sigma2;
    ch.n_ports = ch.effective_rank;
    double tr = 0.0;
    for (double v : ch.eigenvalues) tr += v;
    ch.total_energy = tr;
    ch.subset_table = detail::enumerate_subsets(ch.eigenvalues);
    return ch;
}

/// CDF of the post-selection SNR, F(x) = prod_n (1 - exp(-x / (gbar lambda_n))).
///
/// The product form is exactly the inclusion-exclusion expansion but free of
/// cancellation; it is the preferred evaluation for the CDF.
inline double snr_cdf(const SpectralChannel& ch, double gbar, double x) {
    if (!(gbar > 0.0)) throw DomainError("snr_cdf: gbar must be > 0");
    if (!(x >= 0.0)) throw DomainError("snr_cdf: x must be >= 0");
    double f = 1.0;
    for (double lam : ch.eigenvalues) f *= -std::expm1(-x / (gbar * lam));
    return f;
}

/// PDF of the post-selection SNR via the signed subset expansion,
/// f(x) = sum_s sign_s (Xi_s/gbar) exp(-Xi_s x / gbar), compensated summation.
inline double snr_pdf(const SpectralChannel& ch, double gbar, double x) {
    if (!(gbar > 0.0)) throw DomainError("snr_pdf: gbar must be > 0");
    if (!(x >= 0.0)) throw DomainError("snr_pdf: x must be >= 0");
    specfun::NeumaierSum<double> acc;
    for (const SubsetTerm& t : ch.subset_table) {
        const double a = t.xi / gbar;
        acc.add(t.sign * a * std::exp(-a * x));
    }
    double f = acc.total();
    if (f < 0.0 && f > -1e-12) f = 0.0;  // cancellation residue near the origin
    return f;
}

/// Mean of the post-selection SNR, gbar * sum_s sign_s / Xi_s.
inline double snr_mean(const SpectralChannel& ch, double gbar) {
    if (!(gbar > 0.0)) throw DomainError("snr_mean: gbar must be > 0");
    specfun::NeumaierSum<double> acc;
    for (const SubsetTerm& t : ch.subset_table) acc.add(t.sign / t.xi);
    return gbar * acc.total();
}

namespace detail {

/// Cancellation-free PDF evaluation used by the quadrature baselines:
/// f(x) = F(x) * sum_n b_n / (exp(b_n x) - 1) with b_n = 1/(gbar lambda_n).
inline double snr_pdf_stable(const SpectralChannel& ch, double gbar, double x) {
    if (x <= 0.0) {
        if (x < 0.0) return 0.0;
        return ch.effective_rank == 1 ? 1.0 / (gbar * ch.eigenvalues[0]) : 0.0;
    }
    double f = 1.0;
    double rate = 0.0;
    for (double lam : ch.eigenvalues) {
        const double b = 1.0 / (gbar * lam);
        f *= -std::expm1(-b * x);
        rate += b / std::expm1(b * x);  // overflow of expm1 harmlessly yields 0
    }
    return f * rate;
}

}  // namespace detail

}  // namespace fas
