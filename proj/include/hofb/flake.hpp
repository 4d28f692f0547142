#pragma once

#include <cstdint>
#include <vector>

#include "hofb/errors.hpp"
#include "hofb/lattice.hpp"

namespace hb {

struct FlakeEdge {
    std::int32_t n = 0; // n < m always
    std::int32_t m = 0;
    double t = 0.0; // eV
};

/// A finite open-boundary sample: nx x ny copies of the unit cell. Bonds that
/// would cross the outer boundary are dropped.
struct Flake {
    std::vector<Site> sites; // absolute positions
    std::vector<FlakeEdge> edges;
    Lattice lattice; // provenance
    int nx = 0;
    int ny = 0;
};

inline constexpr std::size_t kDefaultMaxFlakeSites = 1000000;

inline Flake build_flake(const Lattice& lattice, int nx, int ny,
                         std::size_t max_sites = kDefaultMaxFlakeSites) {
    if (nx < 1 || ny < 1)
        throw ConfigError("flake dimensions must be at least 1x1");
    const std::size_t cell_sites = lattice.sites.size();
    const std::size_t total =
        static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * cell_sites;
    if (total > max_sites)
        throw SizeError("flake would have " + std::to_string(total) +
                        " sites, exceeding the limit of " + std::to_string(max_sites));

    Flake flake;
    flake.lattice = lattice;
    flake.nx = nx;
    flake.ny = ny;
    flake.sites.reserve(total);

    auto index = [&](int cx, int cy, int s) {
        return (static_cast<std::int64_t>(cx) * ny + cy) * cell_sites + s;
    };

    for (int cx = 0; cx < nx; ++cx)
        for (int cy = 0; cy < ny; ++cy) {
            const Vec2 shift = static_cast<double>(cx) * lattice.a1 +
                               static_cast<double>(cy) * lattice.a2;
            for (const auto& s : lattice.sites)
                flake.sites.push_back({s.species, s.position + shift});
        }

    for (int cx = 0; cx < nx; ++cx)
        for (int cy = 0; cy < ny; ++cy)
            for (const auto& b : lattice.bonds) {
                if (b.t == 0.0) continue;
                const int tx = cx + b.da, ty = cy + b.db;
                if (tx < 0 || tx >= nx || ty < 0 || ty >= ny) continue;
                auto n = static_cast<std::int32_t>(index(cx, cy, b.a));
                auto m = static_cast<std::int32_t>(index(tx, ty, b.b));
                if (n > m) std::swap(n, m);
                flake.edges.push_back({n, m, b.t});
            }
    return flake;
}

} // namespace hb
