#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "hofb/flake.hpp"
#include "hofb/plaquette.hpp"
#include "hofb/sparse.hpp"

namespace hb {

/// Peierls phase picked up on the straight bond n -> m in the Landau gauge
/// A = (B*y, 0, 0). The midpoint rule is the exact line integral for this
/// linear gauge. Positions in Angstrom, B in Tesla, result in radians.
inline double peierls_phase(const Vec2& pos_n, const Vec2& pos_m, double B,
                            FluxQuantum fq = FluxQuantum::h_over_e) {
    const double phi0 = flux_quantum_value(fq);
    const double y_mid = 0.5 * (pos_n.y + pos_m.y);
    const double dx = pos_m.x - pos_n.x;
    return 2.0 * std::numbers::pi / phi0 * B * y_mid * dx * kAngstrom2ToM2;
}

/// Builds H(B) for a flake. The sparsity pattern is constructed once and shared
/// by every assembled matrix; only the value array is rewritten per field point.
class HamiltonianFactory {
public:
    HamiltonianFactory(const Flake& flake, FluxQuantum fq = FluxQuantum::h_over_e)
        : flake_(&flake), fq_(fq) {
        const std::size_t n = flake.sites.size();
        onsite_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& sp = flake.sites[i].species;
            // An explicit on-site table must cover every species; with no table
            // at all, every species defaults to 0 eV.
            if (!flake.lattice.onsite.empty() && !flake.lattice.onsite.count(sp))
                throw ConfigError("no on-site energy configured for species '" + sp +
                                  "'");
            onsite_[i] = flake.lattice.onsite_of(sp);
        }

        // Pattern: diagonal plus both directions of every edge.
        std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> rows(n);
        for (std::size_t i = 0; i < n; ++i)
            rows[i].push_back({static_cast<std::int32_t>(i), -1});
        for (std::size_t e = 0; e < flake.edges.size(); ++e) {
            const auto& b = flake.edges[e];
            if (b.n == b.m) throw ConfigError("flake contains a self-loop");
            rows[b.n].push_back({b.m, static_cast<std::int32_t>(2 * e)});
            rows[b.m].push_back({b.n, static_cast<std::int32_t>(2 * e + 1)});
        }
        auto pattern = std::make_shared<SparsePattern>();
        pattern->dim = n;
        pattern->row_offsets.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::sort(rows[i].begin(), rows[i].end());
            for (std::size_t k = 1; k < rows[i].size(); ++k)
                if (rows[i][k].first == rows[i][k - 1].first)
                    throw ConfigError("duplicate edge between sites " +
                                      std::to_string(i) + " and " +
                                      std::to_string(rows[i][k].first));
            pattern->row_offsets[i + 1] =
                pattern->row_offsets[i] + static_cast<std::int64_t>(rows[i].size());
        }
        pattern->col_indices.reserve(pattern->row_offsets[n]);
        slot_of_halfedge_.assign(2 * flake.edges.size(), -1);
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [col, half] : rows[i]) {
                if (half >= 0)
                    slot_of_halfedge_[half] =
                        static_cast<std::int64_t>(pattern->col_indices.size());
                pattern->col_indices.push_back(col);
            }
        pattern_ = std::move(pattern);
    }

    /// H[n,m] = t_nm * exp(i*phase), H[m,n] its conjugate, H[n,n] the on-site
    /// energy of the species. The pattern is identical for every B.
    SparseHermitian assemble(double B) const {
        SparseHermitian H;
        H.pattern = pattern_;
        H.values.assign(pattern_->col_indices.size(), Complex{0.0, 0.0});
        const std::size_t n = flake_->sites.size();
        for (std::size_t i = 0; i < n; ++i) {
            // diagonal slot: column i within row i
            for (auto k = pattern_->row_offsets[i]; k < pattern_->row_offsets[i + 1]; ++k)
                if (static_cast<std::size_t>(pattern_->col_indices[k]) == i)
                    H.values[k] = Complex{onsite_[i], 0.0};
        }
        for (std::size_t e = 0; e < flake_->edges.size(); ++e) {
            const auto& b = flake_->edges[e];
            const double phase = peierls_phase(flake_->sites[b.n].position,
                                               flake_->sites[b.m].position, B, fq_);
            const Complex v = b.t * std::polar(1.0, phase);
            H.values[slot_of_halfedge_[2 * e]] = v;
            H.values[slot_of_halfedge_[2 * e + 1]] = std::conj(v);
        }
        return H;
    }

    const Flake& flake() const { return *flake_; }
    FluxQuantum flux_quantum() const { return fq_; }
    std::shared_ptr<const SparsePattern> pattern() const { return pattern_; }

private:
    const Flake* flake_;
    FluxQuantum fq_;
    std::vector<double> onsite_;
    std::shared_ptr<const SparsePattern> pattern_;
    std::vector<std::int64_t> slot_of_halfedge_;
};

/// Convenience wrapper for one-off assemblies.
inline SparseHermitian assemble(const Flake& flake, double B,
                                FluxQuantum fq = FluxQuantum::h_over_e) {
    return HamiltonianFactory(flake, fq).assemble(B);
}

} // namespace hb
