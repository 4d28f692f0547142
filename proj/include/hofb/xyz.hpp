#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "hofb/errors.hpp"
#include "hofb/lattice.hpp"

namespace hb {

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(tok, &pos);
        return pos == tok.size();
    } catch (...) {
        return false;
    }
}

inline bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace detail

/// Parses an extended-XYZ document into a Lattice.
///
/// Line 1: site count N. Line 2: comment line carrying
/// Lattice="ax ay az bx by bz cx cy cz". Lines 3..N+2: `symbol x y z`.
/// The z coordinates and the third lattice vector are discarded; the model is
/// strictly two-dimensional. Hoppings are not assigned here.
inline Lattice parse_structure(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            return true;
        }
        return false;
    };

    if (!next_line())
        throw ParseError("line 1: missing site count");
    long n = 0;
    {
        std::istringstream ls(line);
        if (!(ls >> n) || n <= 0)
            throw ParseError("line 1: malformed site count '" + line + "'");
        std::string rest;
        if (ls >> rest) throw ParseError("line 1: trailing content after site count");
    }

    if (!next_line())
        throw ParseError("line 2: missing comment/Lattice line");
    const std::string key = "Lattice=\"";
    auto kpos = line.find(key);
    if (kpos == std::string::npos)
        throw ParseError("line 2: missing Lattice=\"...\" key");
    auto end = line.find('"', kpos + key.size());
    if (end == std::string::npos)
        throw ParseError("line 2: unterminated Lattice value");
    std::istringstream lat(line.substr(kpos + key.size(), end - kpos - key.size()));
    double v[9];
    for (int i = 0; i < 9; ++i)
        if (!(lat >> v[i]))
            throw ParseError("line 2: Lattice value needs 9 numbers");

    Lattice lattice;
    lattice.a1 = {v[0], v[1]};
    lattice.a2 = {v[3], v[4]};

    for (long i = 0; i < n; ++i) {
        if (!next_line())
            throw ParseError("line " + std::to_string(lineno + 1) +
                             ": expected " + std::to_string(n) + " sites, got " +
                             std::to_string(i));
        std::istringstream ls(line);
        std::string sym, xs, ys, zs;
        if (!(ls >> sym >> xs >> ys >> zs))
            throw ParseError("line " + std::to_string(lineno) +
                             ": expected `symbol x y z`");
        double x, y, z;
        if (!detail::parse_double(xs, x) || !detail::parse_double(ys, y) ||
            !detail::parse_double(zs, z))
            throw ParseError("line " + std::to_string(lineno) +
                             ": non-numeric coordinate");
        lattice.sites.push_back({sym, {x, y}});
    }
    while (next_line()) {
        if (!detail::blank(line))
            throw ParseError("line " + std::to_string(lineno) +
                             ": unexpected content after " + std::to_string(n) +
                             " sites");
    }
    return lattice;
}

struct HoppingConfig {
    std::vector<HoppingRule> rules;
    std::map<std::string, double> onsite;
};

/// Plain-text key-value hopping config. One entry per line:
///   hop <A> <B> <dmin> <dmax> <t_eV>
///   onsite <A> <e_eV>
/// Blank lines and lines starting with '#' are ignored.
inline HoppingConfig parse_hopping_config(const std::string& text) {
    HoppingConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw.empty() || kw[0] == '#') continue;
        if (kw == "hop") {
            HoppingRule r;
            if (!(ls >> r.species_a >> r.species_b >> r.d_min >> r.d_max >> r.t))
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected `hop A B dmin dmax t`");
            cfg.rules.push_back(r);
        } else if (kw == "onsite") {
            std::string sp;
            double e;
            if (!(ls >> sp >> e))
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected `onsite A e`");
            cfg.onsite[sp] = e;
        } else {
            throw ParseError("line " + std::to_string(lineno) +
                             ": unknown keyword '" + kw + "'");
        }
    }
    return cfg;
}

} // namespace hb
