#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hofb/errors.hpp"
#include "hofb/geometry.hpp"

namespace hb {

/// One atom of the unit cell. Positions are strictly 2D, in Angstrom.
struct Site {
    std::string species;
    Vec2 position;
};

/// Piecewise-constant distance window assigning hopping t between two species.
/// The interval [d_min, d_max] is closed; boundary distances are compared with
/// an absolute tolerance of 1e-6 A.
struct HoppingRule {
    std::string species_a;
    std::string species_b;
    double d_min = 0.0; // Angstrom
    double d_max = 0.0; // Angstrom
    double t = 0.0;     // eV
};

inline constexpr double kDistanceTol = 1e-6; // Angstrom, rule-boundary tolerance

/// Bond from site `a` of the home cell to site `b` of the cell displaced by
/// (da, db) lattice vectors. Stored once per undirected bond.
struct CellBond {
    int a = 0;
    int b = 0;
    int da = 0;
    int db = 0;
    double t = 0.0; // eV
};

struct Lattice {
    Vec2 a1, a2;
    std::vector<Site> sites;
    std::vector<HoppingRule> hopping_rules;
    std::vector<CellBond> bonds;          // filled by assign_hoppings
    std::map<std::string, double> onsite; // eV per species; absent means 0

    double cell_area() const { return std::abs(cross(a1, a2)); }

    double onsite_of(const std::string& species) const {
        auto it = onsite.find(species);
        return it == onsite.end() ? 0.0 : it->second;
    }

    void validate() const {
        if (cell_area() <= 0.0)
            throw ConfigError("degenerate unit cell: |a1 x a2| must be positive");
        if (sites.empty()) throw ConfigError("lattice has no sites");
        for (const auto& s : sites) {
            if (s.species.empty()) throw ConfigError("site with empty species");
            if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y))
                throw ConfigError("non-finite site position");
        }
        for (std::size_t i = 0; i < sites.size(); ++i)
            for (std::size_t j = i + 1; j < sites.size(); ++j)
                if (distance(sites[i].position, sites[j].position) < 0.5)
                    throw ConfigError("sites " + std::to_string(i) + " and " +
                                      std::to_string(j) + " closer than 0.5 A");
    }
};

namespace detail {

inline bool rule_matches(const HoppingRule& r, const std::string& sa,
                         const std::string& sb, double d) {
    const bool species_ok = (r.species_a == sa && r.species_b == sb) ||
                            (r.species_a == sb && r.species_b == sa);
    return species_ok && d >= r.d_min - kDistanceTol && d <= r.d_max + kDistanceTol;
}

/// Uniform spatial bin grid over a point cloud; bin size equals the query radius
/// so a lookup only has to visit the 3x3 neighborhood.
class BinGrid {
public:
    BinGrid(const std::vector<Vec2>& points, double bin_size)
        : points_(points), h_(std::max(bin_size, 1e-6)) {
        for (std::size_t i = 0; i < points.size(); ++i)
            bins_[key(points[i])].push_back(static_cast<int>(i));
    }

    template <typename F>
    void for_each_within(const Vec2& p, double radius, F&& fn) const {
        const auto [cx, cy] = cell(p);
        for (std::int64_t bx = cx - 1; bx <= cx + 1; ++bx)
            for (std::int64_t by = cy - 1; by <= cy + 1; ++by) {
                auto it = bins_.find(pack(bx, by));
                if (it == bins_.end()) continue;
                for (int i : it->second)
                    if (distance(points_[i], p) <= radius) fn(i);
            }
    }

private:
    std::pair<std::int64_t, std::int64_t> cell(const Vec2& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / h_)),
                static_cast<std::int64_t>(std::floor(p.y / h_))};
    }
    static std::uint64_t pack(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) << 32) ^
               (static_cast<std::uint64_t>(y) & 0xffffffffull);
    }
    std::uint64_t key(const Vec2& p) const {
        auto [x, y] = cell(p);
        return pack(x, y);
    }

    const std::vector<Vec2>& points_;
    double h_;
    std::unordered_map<std::uint64_t, std::vector<int>> bins_;
};

} // namespace detail

/// Assigns bonds to every site pair (including periodic images) whose distance
/// falls inside exactly one rule window. Two rules matching the same pair at the
/// same distance is an ambiguity error. Pure in (positions, rules); rule order
/// does not matter.
inline Lattice assign_hoppings(const Lattice& lattice,
                               const std::vector<HoppingRule>& rules) {
    Lattice out = lattice;
    out.hopping_rules = rules;
    out.bonds.clear();
    out.validate();
    for (const auto& r : rules)
        if (!(r.d_min > 0.0 && r.d_min < r.d_max))
            throw ConfigError("hopping rule requires 0 < d_min < d_max");
    if (rules.empty()) return out;

    double d_max = 0.0;
    for (const auto& r : rules) d_max = std::max(d_max, r.d_max);
    const double reach = d_max + kDistanceTol;

    // Cell-offset range needed to cover `reach` around the home cell.
    const double h1 = lattice.cell_area() / norm(lattice.a2); // spacing of a1-planes
    const double h2 = lattice.cell_area() / norm(lattice.a1);
    const int ra = static_cast<int>(std::ceil(reach / h1)) + 1;
    const int rb = static_cast<int>(std::ceil(reach / h2)) + 1;

    struct Image {
        int site;
        int da, db;
    };
    std::vector<Image> images;
    std::vector<Vec2> positions;
    for (int da = -ra; da <= ra; ++da)
        for (int db = -rb; db <= rb; ++db)
            for (std::size_t s = 0; s < lattice.sites.size(); ++s) {
                images.push_back({static_cast<int>(s), da, db});
                positions.push_back(lattice.sites[s].position +
                                    static_cast<double>(da) * lattice.a1 +
                                    static_cast<double>(db) * lattice.a2);
            }

    detail::BinGrid grid(positions, reach);
    for (std::size_t s = 0; s < lattice.sites.size(); ++s) {
        const Vec2 p = lattice.sites[s].position;
        grid.for_each_within(p, reach, [&](int idx) {
            const Image& im = images[idx];
            if (im.da == 0 && im.db == 0 && im.site == static_cast<int>(s)) return;
            const double d = distance(p, positions[idx]);
            const HoppingRule* matched = nullptr;
            for (const auto& r : rules) {
                if (detail::rule_matches(r, lattice.sites[s].species,
                                         lattice.sites[im.site].species, d)) {
                    if (matched)
                        throw ConfigError("ambiguous hopping rules for pair (" +
                                          lattice.sites[s].species + "," +
                                          lattice.sites[im.site].species +
                                          ") at d=" + std::to_string(d));
                    matched = &r;
                }
            }
            if (!matched) return;
            // Canonical orientation: store each undirected bond once.
            const bool keep = std::tuple(im.da, im.db, im.site) >
                              std::tuple(0, 0, static_cast<int>(s));
            if (keep)
                out.bonds.push_back({static_cast<int>(s), im.site, im.da, im.db,
                                     matched->t});
        });
    }
    std::sort(out.bonds.begin(), out.bonds.end(), [](const CellBond& x, const CellBond& y) {
        return std::tuple(x.a, x.b, x.da, x.db) < std::tuple(y.a, y.b, y.da, y.db);
    });
    return out;
}

} // namespace hb
