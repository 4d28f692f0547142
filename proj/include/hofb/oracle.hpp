#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "hofb/builtin.hpp"
#include "hofb/errors.hpp"
#include "hofb/kpm.hpp"
#include "hofb/lattice.hpp"
#include "hofb/peierls.hpp"
#include "hofb/sparse.hpp"

namespace hb {

/// Flux per plaquette p/q in units of the flux quantum; stored coprime.
struct RationalFlux {
    int p = 0;
    int q = 1;

    RationalFlux(int p_, int q_) : p(p_), q(q_) {
        if (q <= 0) throw ConfigError("flux denominator must be positive");
        const int g = std::gcd(std::abs(p), q);
        if (g > 1) {
            p /= g;
            q /= g;
        }
    }

    double value() const { return static_cast<double>(p) / q; }
};

inline Eigen::MatrixXcd to_dense(const SparseHermitian& H) {
    const auto n = static_cast<Eigen::Index>(H.dim());
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
    const auto& pat = *H.pattern;
    for (Eigen::Index r = 0; r < n; ++r)
        for (auto k = pat.row_offsets[r]; k < pat.row_offsets[r + 1]; ++k)
            D(r, pat.col_indices[k]) = H.values[k];
    return D;
}

inline std::vector<double> eigenvalues_sorted(const Eigen::MatrixXcd& D) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline std::vector<double> eigenvalues_sorted(const SparseHermitian& H) {
    return eigenvalues_sorted(to_dense(H));
}

inline constexpr std::size_t kMaxExactDim = 4000;

/// Ground truth DOS: all eigenvalues of the densified H, smeared with
/// unit-weight Gaussians of width sigma on the given grid.
inline DOSCurve exact_dos(const SparseHermitian& H, double sigma,
                          const std::vector<double>& grid) {
    if (H.dim() > kMaxExactDim)
        throw SizeError("exact_dos limited to dim <= " +
                        std::to_string(kMaxExactDim));
    const auto ev = eigenvalues_sorted(H);
    DOSCurve out;
    out.energies = grid;
    out.density.assign(grid.size(), 0.0);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    for (double e : ev)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double z = (grid[i] - e) / sigma;
            out.density[i] += norm * std::exp(-0.5 * z * z);
        }
    return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> g(points);
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[i] = lo + i * step;
    return g;
}

/// Union of Harper-matrix eigenvalues over a k mesh for the square lattice at
/// rational flux. The q x q matrix has diagonal 2t cos(k2 + 2*pi*phi*j),
/// off-diagonal t, and the corner Bloch factor exp(+-i q k1).
inline std::vector<double> harper_spectrum_square(const RationalFlux& flux, double t,
                                                  int k_grid) {
    if (flux.q > 200) throw SizeError("harper solver limited to q <= 200");
    if (k_grid < 2) throw ConfigError("k_grid must be >= 2");
    const int q = flux.q;
    const double phi = flux.value();
    std::vector<double> spectrum;
    spectrum.reserve(static_cast<std::size_t>(k_grid) * k_grid * q);
    for (int i1 = 0; i1 < k_grid; ++i1)
        for (int i2 = 0; i2 < k_grid; ++i2) {
            // Inclusive mesh over one magnetic Brillouin zone.
            const double k1 = 2.0 * std::numbers::pi / q * i1 / (k_grid - 1);
            const double k2 = 2.0 * std::numbers::pi * i2 / (k_grid - 1);
            Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(q, q);
            for (int j = 0; j < q; ++j)
                H(j, j) = 2.0 * t * std::cos(k2 + 2.0 * std::numbers::pi * phi * j);
            if (q == 1) {
                H(0, 0) += 2.0 * t * std::cos(static_cast<double>(q) * k1);
            } else {
                for (int j = 0; j + 1 < q; ++j) {
                    H(j, j + 1) += t;
                    H(j + 1, j) += t;
                }
                const Complex bloch = std::polar(t, static_cast<double>(q) * k1);
                H(q - 1, 0) += bloch;
                H(0, q - 1) += std::conj(bloch);
            }
            for (double e : eigenvalues_sorted(H)) spectrum.push_back(e);
        }
    return spectrum;
}

/// Magnetic Bloch spectrum of an arbitrary bonded lattice at field B: a
/// supercell of q unit cells along a2 (integer flux through the supercell in the
/// Landau gauge A = (B*y, 0, 0)), diagonalized over an inclusive k mesh.
/// `gauge_origin_y` shifts the gauge origin; the spectrum must not depend on it.
inline std::vector<double> magnetic_bloch_spectrum(const Lattice& lattice, int q,
                                                   double B, int k_grid,
                                                   FluxQuantum fq = FluxQuantum::h_over_e,
                                                   double gauge_origin_y = 0.0) {
    if (q < 1) throw ConfigError("supercell multiplier must be >= 1");
    if (k_grid < 2) throw ConfigError("k_grid must be >= 2");
    const int ns = static_cast<int>(lattice.sites.size());
    const int dim = ns * q;

    struct Hop {
        int s_from, s_to;
        double phase;   // Peierls phase (radians)
        int m1, m2;     // supercell translation counts (A1 = a1, A2 = q*a2)
        double t;
    };
    std::vector<Hop> hops;
    const Vec2 y_shift{0.0, gauge_origin_y};
    for (int j = 0; j < q; ++j)
        for (const auto& b : lattice.bonds) {
            const int cell_to = j + b.db;
            const int jt = ((cell_to % q) + q) % q;
            const int wrap = (cell_to - jt) / q;
            const Vec2 from = lattice.sites[b.a].position +
                              static_cast<double>(j) * lattice.a2;
            const Vec2 to = lattice.sites[b.b].position +
                            static_cast<double>(cell_to) * lattice.a2 +
                            static_cast<double>(b.da) * lattice.a1;
            const double phase =
                peierls_phase(from + y_shift, to + y_shift, B, fq);
            hops.push_back({b.a + j * ns, b.b + jt * ns, phase, b.da, wrap, b.t});
        }

    std::vector<double> spectrum;
    spectrum.reserve(static_cast<std::size_t>(k_grid) * k_grid * dim);
    for (int i1 = 0; i1 < k_grid; ++i1)
        for (int i2 = 0; i2 < k_grid; ++i2) {
            const double k1 = 2.0 * std::numbers::pi * i1 / (k_grid - 1);
            const double k2 = 2.0 * std::numbers::pi * i2 / (k_grid - 1);
            Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
            for (int s = 0; s < dim; ++s) {
                const int cell_site = s % ns;
                H(s, s) = lattice.onsite_of(lattice.sites[cell_site].species);
            }
            for (const auto& h : hops) {
                const Complex amp =
                    h.t * std::polar(1.0, h.phase + k1 * h.m1 + k2 * h.m2);
                H(h.s_from, h.s_to) += amp;
                H(h.s_to, h.s_from) += std::conj(amp);
            }
            for (double e : eigenvalues_sorted(H)) spectrum.push_back(e);
        }
    return spectrum;
}

/// Honeycomb magnetic Bloch spectrum at rational flux per hexagon, via the
/// 2q x 2q supercell Hamiltonian with Peierls phases on the three
/// nearest-neighbor vectors.
inline std::vector<double> harper_spectrum_honeycomb(const RationalFlux& flux,
                                                     double t, int k_grid,
                                                     double gauge_origin_y = 0.0) {
    if (flux.q > 200) throw SizeError("harper solver limited to q <= 200");
    const Lattice lat = make_honeycomb(1.0, t);
    const double area = lat.cell_area(); // hexagon area equals the cell area
    const double B = flux.value() * period_of_area(area);
    return magnetic_bloch_spectrum(lat, flux.q, B, k_grid, FluxQuantum::h_over_e,
                                   gauge_origin_y);
}

/// Clusters a spectrum sample into `bands` closed intervals by taking, for each
/// band index, the extremes over the k mesh of the sorted per-k eigenvalues.
inline std::vector<std::pair<double, double>> band_intervals(
    const std::vector<double>& spectrum, int bands) {
    // The spectrum is stored k point by k point, each block sorted ascending.
    std::vector<std::pair<double, double>> out(
        bands, {std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()});
    const std::size_t block = bands;
    for (std::size_t off = 0; off + block <= spectrum.size(); off += block)
        for (int b = 0; b < bands; ++b) {
            out[b].first = std::min(out[b].first, spectrum[off + b]);
            out[b].second = std::max(out[b].second, spectrum[off + b]);
        }
    return out;
}

} // namespace hb
