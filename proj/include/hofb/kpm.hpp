#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "hofb/errors.hpp"
#include "hofb/sparse.hpp"

namespace hb {

struct KPMParams {
    int num_moments = 512;
    int num_random_vectors = 3;
    int energy_points = 512;
    double rescale_margin = 0.01;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (num_moments < 2) throw ConfigError("num_moments must be >= 2");
        if (num_random_vectors < 1)
            throw ConfigError("num_random_vectors must be >= 1");
        if (energy_points < 2) throw ConfigError("energy_points must be >= 2");
        if (!(rescale_margin > 0.0 && rescale_margin < 0.5))
            throw ConfigError("rescale_margin must lie in (0, 0.5)");
    }
};

/// Interval guaranteed (with overwhelming probability) to contain the spectrum.
struct SpectralBounds {
    double e_min = 0.0;
    double e_max = 0.0;

    double center() const { return 0.5 * (e_min + e_max); }
    double half_width() const { return 0.5 * (e_max - e_min); }
};

struct DOSCurve {
    std::vector<double> energies; // eV, uniform ascending
    std::vector<double> density;  // states/eV per flake

    double integral() const {
        double s = 0.0;
        for (std::size_t i = 1; i < energies.size(); ++i)
            s += 0.5 * (density[i] + density[i - 1]) * (energies[i] - energies[i - 1]);
        return s;
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

namespace detail {

/// Unit-modulus random-phase vector; the lowest-variance standard choice for
/// stochastic trace estimation with complex Hermitian matrices.
inline std::vector<Complex> random_phase_vector(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    std::vector<Complex> v(dim);
    for (auto& x : v) x = std::polar(1.0, uni(rng));
    return v;
}

} // namespace detail

/// Extremal Ritz values from the symmetric Lanczos process, widened by
/// margin * spread on each side. Collapse is guarded to a minimum width of
/// 1e-6 eV.
inline SpectralBounds estimate_bounds(const SparseHermitian& H, double margin,
                                      std::uint64_t seed = 0x5eed) {
    const std::size_t n = H.dim();
    if (n < 2) throw NumericError("estimate_bounds needs dim >= 2");
    const int max_iters = static_cast<int>(std::min<std::size_t>(n, 100));

    std::vector<Complex> v = detail::random_phase_vector(n, splitmix64(seed));
    {
        double nrm = 0.0;
        for (const auto& x : v) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        for (auto& x : v) x /= nrm;
    }
    std::vector<Complex> v_prev(n, Complex{0.0, 0.0}), w(n);
    std::vector<double> alpha, beta;

    double matrix_scale = 0.0;
    for (const auto& x : H.values) matrix_scale = std::max(matrix_scale, std::abs(x));

    for (int it = 0; it < max_iters; ++it) {
        H.matvec(v.data(), w.data());
        Complex a{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) a += std::conj(v[i]) * w[i];
        alpha.push_back(a.real());
        for (std::size_t i = 0; i < n; ++i)
            w[i] -= a.real() * v[i] + (beta.empty() ? 0.0 : beta.back()) * v_prev[i];
        double b = 0.0;
        for (const auto& x : w) b += std::norm(x);
        b = std::sqrt(b);
        if (b < 1e-12 * std::max(matrix_scale, 1.0)) break; // invariant subspace
        beta.push_back(b);
        v_prev = v;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
    }

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();

    const double spread = hi - lo;
    lo -= margin * spread;
    hi += margin * spread;
    if (hi - lo < 1e-6) {
        const double mid = 0.5 * (lo + hi);
        lo = mid - 0.5e-6;
        hi = mid + 0.5e-6;
    }
    return {lo, hi};
}

/// Stochastic Chebyshev moments of H rescaled into [-1+eps, 1-eps].
/// Deterministic for a fixed seed: random vectors are processed in a fixed
/// order and the reduction is an ordered sum.
inline std::vector<Complex> moments(const SparseHermitian& H,
                                    const SpectralBounds& bounds,
                                    const KPMParams& p) {
    p.validate();
    const std::size_t n = H.dim();
    const int M = p.num_moments;
    if (!(bounds.e_max > bounds.e_min))
        throw NumericError("invalid spectral bounds");
    const double a = bounds.half_width() / (1.0 - p.rescale_margin);
    const double b = bounds.center();

    std::vector<Complex> mu(M, Complex{0.0, 0.0});
    std::vector<Complex> v0(n), v1(n), tmp(n);

    auto scaled_matvec = [&](const std::vector<Complex>& x, std::vector<Complex>& y) {
        H.matvec(x.data(), y.data());
        for (std::size_t i = 0; i < n; ++i) y[i] = (y[i] - b * x[i]) / a;
    };
    auto dot = [&](const std::vector<Complex>& x, const std::vector<Complex>& y) {
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
        return s;
    };

    const double blowup = 1e3 * static_cast<double>(n);
    for (int r = 0; r < p.num_random_vectors; ++r) {
        const auto rv = detail::random_phase_vector(
            n, splitmix64(p.rng_seed ^ splitmix64(static_cast<std::uint64_t>(r))));
        v0 = rv;                  // T_0 |r>
        scaled_matvec(v0, v1);    // T_1 |r>
        mu[0] += dot(rv, v0);
        if (M > 1) mu[1] += dot(rv, v1);
        for (int k = 2; k < M; ++k) {
            // v_{k} = 2 H~ v_{k-1} - v_{k-2}
            scaled_matvec(v1, tmp);
            for (std::size_t i = 0; i < n; ++i)
                tmp[i] = 2.0 * tmp[i] - v0[i];
            std::swap(v0, v1);
            std::swap(v1, tmp);
            mu[k] += dot(rv, v1);
            if ((k & 31) == 0) {
                double nrm = 0.0;
                for (const auto& x : v1) nrm += std::norm(x);
                if (std::sqrt(nrm) > blowup)
                    throw NumericError(
                        "Chebyshev recursion diverged: spectral bounds do not "
                        "contain the spectrum");
            }
        }
    }
    // Normalize so mu_0 = dim(H) exactly.
    const double scale = static_cast<double>(n) / mu[0].real();
    for (auto& m : mu) m *= scale;
    return mu;
}

/// Jackson kernel coefficient g_k for an M-moment expansion.
inline double jackson_coefficient(int k, int M) {
    const double q = std::numbers::pi / (M + 1);
    return ((M - k + 1) * std::cos(q * k) + std::sin(q * k) / std::tan(q)) /
           (M + 1);
}

/// Gaussian-equivalent broadening of the Jackson kernel at mid-spectrum, in eV.
inline double jackson_broadening(const SpectralBounds& bounds, const KPMParams& p) {
    const double a = bounds.half_width() / (1.0 - p.rescale_margin);
    return std::numbers::pi * a / p.num_moments;
}

/// Jackson-damped Chebyshev reconstruction of the DOS. Evaluation happens on a
/// Chebyshev-node grid (never touching x = +-1), is mapped to eV with the
/// Jacobian of the affine rescale, and resampled onto a uniform energy grid.
inline DOSCurve reconstruct_dos(const std::vector<Complex>& mu,
                                const SpectralBounds& bounds, const KPMParams& p) {
    p.validate();
    const int M = static_cast<int>(mu.size());
    if (M < 2 || !(mu[0].real() > 0.0))
        throw NumericError("reconstruct_dos requires mu_0 > 0");
    const double a = bounds.half_width() / (1.0 - p.rescale_margin);
    const double b = bounds.center();

    std::vector<double> g(M);
    for (int k = 0; k < M; ++k) g[k] = jackson_coefficient(k, M);

    const int nodes = std::max(2 * p.energy_points, std::min(2 * M, 4096));
    // Ascending in energy: node j has theta descending.
    std::vector<double> node_e(nodes), node_rho(nodes);
    for (int j = 0; j < nodes; ++j) {
        const double theta =
            std::numbers::pi * (nodes - j - 0.5) / static_cast<double>(nodes);
        const double x = std::cos(theta);
        long double s = static_cast<long double>(g[0]) * mu[0].real();
        for (int k = 1; k < M; ++k)
            s += 2.0L * g[k] * mu[k].real() * std::cos(k * theta);
        const double rho_x =
            static_cast<double>(s) / (std::numbers::pi * std::sin(theta));
        node_e[j] = a * x + b;
        node_rho[j] = rho_x / a; // Jacobian dx/dE = 1/a
    }

    DOSCurve out;
    out.energies.resize(p.energy_points);
    out.density.assign(p.energy_points, 0.0);
    const double e_lo = b - a, e_hi = b + a;
    const double step = (e_hi - e_lo) / (p.energy_points - 1);
    int seg = 0;
    for (int i = 0; i < p.energy_points; ++i) {
        const double e = e_lo + i * step;
        out.energies[i] = e;
        if (e <= node_e.front() || e >= node_e.back()) continue; // beyond last node
        while (seg + 2 < nodes && node_e[seg + 1] < e) ++seg;
        const double w = (e - node_e[seg]) / (node_e[seg + 1] - node_e[seg]);
        out.density[i] = (1.0 - w) * node_rho[seg] + w * node_rho[seg + 1];
    }
    return out;
}

/// One-call DOS: bounds (unless supplied), moments, reconstruction.
inline DOSCurve kpm_dos(const SparseHermitian& H, const KPMParams& p,
                        const SpectralBounds* bounds = nullptr) {
    SpectralBounds bds =
        bounds ? *bounds : estimate_bounds(H, p.rescale_margin, p.rng_seed);
    return reconstruct_dos(moments(H, bds, p), bds, p);
}

} // namespace hb
