#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "hofb/errors.hpp"
#include "hofb/lattice.hpp"

namespace hb {

/// Square lattice, one site per cell, four neighbors.
inline Lattice make_square(double a = 1.0, double t = -1.0) {
    Lattice lat;
    lat.a1 = {a, 0.0};
    lat.a2 = {0.0, a};
    lat.sites = {{"X", {0.0, 0.0}}};
    return assign_hoppings(lat, {{"X", "X", 0.9 * a, 1.1 * a, t}});
}

/// Honeycomb lattice; the defaults are graphene (1.42 A bonds, t = -2.7 eV).
inline Lattice make_honeycomb(double bond = 1.42, double t = -2.7) {
    const double rt3 = std::sqrt(3.0);
    Lattice lat;
    lat.a1 = {rt3 * bond, 0.0};
    lat.a2 = {rt3 * bond / 2.0, 1.5 * bond};
    lat.sites = {{"C", {0.0, 0.0}}, {"C", {0.0, bond}}};
    return assign_hoppings(lat, {{"C", "C", 0.8 * bond, 1.2 * bond, t}});
}

/// Kagome lattice with nearest-neighbor distance d: two triangles and one
/// hexagon per cell.
inline Lattice make_kagome(double d = 1.0, double t = -1.0) {
    const double rt3 = std::sqrt(3.0);
    Lattice lat;
    lat.a1 = {2.0 * d, 0.0};
    lat.a2 = {d, rt3 * d};
    lat.sites = {{"X", {0.0, 0.0}}, {"X", {d, 0.0}}, {"X", {d / 2.0, rt3 * d / 2.0}}};
    return assign_hoppings(lat, {{"X", "X", 0.9 * d, 1.1 * d, t}});
}

/// Decorated honeycomb with two plaquette classes: `ring_size`-gon rings sit on
/// the vertices of a honeycomb superlattice and are joined by short bridge
/// bonds, leaving a large pore per hexagon. `pore_scale` is the ring-center
/// distance in units of 2*ring_radius (must exceed 1). The default pore scale
/// is tuned, for 12-site rings, to put the pore area at 1.5x the ring area so
/// the two field periods sit at a 2:3 ratio.
inline Lattice make_porous_honeycomb(int ring_size = 12, double pore_scale = 1.005171,
                                     double ring_radius = 60.0, double t = -1.0) {
    if (ring_size < 6 || ring_size % 6 != 0)
        throw ConfigError("ring_size must be a positive multiple of 6");
    const double r = ring_radius;
    const double D = 2.0 * r * pore_scale;
    const double L = D - 2.0 * r; // bridge bond length
    if (L < 0.5)
        throw ConfigError("pore_scale too small: bridge bonds shorter than 0.5 A");
    const double s = 2.0 * r * std::sin(std::numbers::pi / ring_size); // ring side
    if (1.5 * L >= 0.99 * s)
        throw ConfigError("bridge and ring bond lengths too close to separate by "
                          "distance rules");

    const double rt3 = std::sqrt(3.0);
    Lattice lat;
    lat.a1 = {rt3 * D, 0.0};
    lat.a2 = {rt3 * D / 2.0, 1.5 * D};
    const Vec2 centers[2] = {{0.0, 0.0}, {0.0, D}};
    for (const auto& c : centers)
        for (int k = 0; k < ring_size; ++k) {
            const double ang = std::numbers::pi / 2.0 +
                               2.0 * std::numbers::pi * k / ring_size;
            lat.sites.push_back({"C", c + r * Vec2{std::cos(ang), std::sin(ang)}});
        }
    // The ring window must stay narrow: the nearest *inter*-ring vertex pair
    // besides the bridge sits only ~0.5% above the ring bond length.
    lat = assign_hoppings(lat, {{"C", "C", 0.998 * s, 1.002 * s, t},
                                {"C", "C", 0.5 * L, 1.5 * L, t}});
    const std::size_t expected = 2 * static_cast<std::size_t>(ring_size) + 3;
    if (lat.bonds.size() != expected)
        throw ConfigError("porous-honeycomb geometry is ambiguous: expected " +
                          std::to_string(expected) + " bonds per cell, got " +
                          std::to_string(lat.bonds.size()));
    return lat;
}

/// Named built-in lattices for the CLI and the test suites.
/// `a` rescales the natural length parameter, `t` the hopping.
inline Lattice make_builtin(const std::string& name, double a = 0.0, double t = 0.0,
                            int ring_size = 12, double pore_scale = 1.005171) {
    auto or_default = [](double v, double d) { return v == 0.0 ? d : v; };
    if (name == "square")
        return make_square(or_default(a, 1.0), or_default(t, -1.0));
    if (name == "honeycomb" || name == "graphene")
        return make_honeycomb(or_default(a, 1.42), or_default(t, -2.7));
    if (name == "kagome")
        return make_kagome(or_default(a, 1.0), or_default(t, -1.0));
    if (name == "porous-honeycomb")
        return make_porous_honeycomb(ring_size, pore_scale, or_default(a, 60.0),
                                     or_default(t, -1.0));
    throw ConfigError("unknown builtin lattice '" + name +
                      "' (try square, honeycomb, graphene, kagome, porous-honeycomb)");
}

} // namespace hb
