#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "hofb/errors.hpp"
#include "hofb/flake.hpp"
#include "hofb/geometry.hpp"
#include "hofb/lattice.hpp"

namespace hb {

// Magnetic flux quantum in Wb. The engine measures plaquette flux against h/e
// by default; h/2e is selectable for comparison.
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kElementaryCharge = 1.602176634e-19; // C
inline constexpr double kPhi0HOverE = 4.135667696e-15;  // Wb
inline constexpr double kPhi0HOver2E = 2.067833848e-15; // Wb
inline constexpr double kAngstrom2ToM2 = 1e-20;

enum class FluxQuantum { h_over_e, h_over_2e };

inline double flux_quantum_value(FluxQuantum fq) {
    return fq == FluxQuantum::h_over_e ? kPhi0HOverE : kPhi0HOver2E;
}

/// B_p = Phi_0 / A_p, with the area given in Angstrom^2 and the result in Tesla.
inline double period_of_area(double area_A2,
                             FluxQuantum fq = FluxQuantum::h_over_e) {
    if (!(area_A2 > 0.0)) throw NumericError("period_of_area requires area > 0");
    return flux_quantum_value(fq) / (area_A2 * kAngstrom2ToM2);
}

/// A minimal face of the lattice graph.
struct Plaquette {
    std::vector<int> vertex_cycle; // site indices, closed walk (first not repeated)
    double area = 0.0;             // Angstrom^2
    double period = 0.0;           // Tesla
};

/// Faces grouped by area, for reporting (e.g. the two kagome triangles form one
/// class).
struct FaceClass {
    double area = 0.0;
    double period = 0.0;
    int vertex_count = 0;
    int multiplicity = 0;
    Plaquette representative;
};

namespace detail {

struct DirectedEdge {
    int from = 0;
    int to = 0;
    int da = 0, db = 0; // cell offset of `to` relative to `from` (0 for finite graphs)
    int twin = 0;       // index of the reversed directed edge
    double angle = 0.0; // direction angle at `from`
    double length = 0.0;
};

/// Rotation-system face walk over a set of directed edges. At each vertex the
/// outgoing edges are sorted by angle; the walk continues with the next edge
/// clockwise from the reversed arrival edge. Returns one walk (as directed edge
/// indices) per face.
class FaceTracer {
public:
    FaceTracer(int num_vertices, std::vector<DirectedEdge> edges)
        : edges_(std::move(edges)), outgoing_(num_vertices) {
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e)
            outgoing_[edges_[e].from].push_back(e);
        for (auto& out : outgoing_) {
            std::sort(out.begin(), out.end(), [&](int x, int y) {
                if (edges_[x].angle != edges_[y].angle)
                    return edges_[x].angle < edges_[y].angle;
                return edges_[x].length < edges_[y].length;
            });
            for (std::size_t i = 1; i < out.size(); ++i) {
                const double d = std::abs(edges_[out[i]].angle - edges_[out[i - 1]].angle);
                if (d < 1e-12 &&
                    std::abs(edges_[out[i]].length - edges_[out[i - 1]].length) < 1e-9)
                    throw EmbeddingError(
                        "two bonds leave a site at an identical angle");
            }
        }
    }

    int next_edge(int e) const {
        const auto& edge = edges_[e];
        const int rev = edge.twin;
        const auto& out = outgoing_[edge.to];
        auto it = std::find(out.begin(), out.end(), rev);
        // Clockwise-next from the reversed arrival edge: previous in CCW order.
        const std::size_t pos = static_cast<std::size_t>(it - out.begin());
        return out[(pos + out.size() - 1) % out.size()];
    }

    std::vector<std::vector<int>> trace_all() const {
        std::vector<std::vector<int>> walks;
        std::vector<char> used(edges_.size(), 0);
        for (int start = 0; start < static_cast<int>(edges_.size()); ++start) {
            if (used[start]) continue;
            std::vector<int> walk;
            int e = start;
            do {
                used[e] = 1;
                walk.push_back(e);
                e = next_edge(e);
            } while (e != start);
            walks.push_back(std::move(walk));
        }
        return walks;
    }

    const DirectedEdge& edge(int e) const { return edges_[e]; }
    std::size_t edge_count() const { return edges_.size(); }

private:
    std::vector<DirectedEdge> edges_;
    std::vector<std::vector<int>> outgoing_;
};

inline double shoelace(const std::vector<Vec2>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        s += cross(p, q);
    }
    return 0.5 * s;
}

/// Checks that bonds, drawn as segments over a 3x3 patch of cells, intersect
/// only at shared endpoints.
inline void check_planar_embedding(const Lattice& lattice) {
    struct Seg {
        Vec2 a, b;
    };
    std::vector<Seg> segs;
    for (int da = -1; da <= 1; ++da)
        for (int db = -1; db <= 1; ++db) {
            const Vec2 base = static_cast<double>(da) * lattice.a1 +
                              static_cast<double>(db) * lattice.a2;
            for (const auto& bond : lattice.bonds) {
                const Vec2 pa = lattice.sites[bond.a].position + base;
                const Vec2 pb = lattice.sites[bond.b].position + base +
                                static_cast<double>(bond.da) * lattice.a1 +
                                static_cast<double>(bond.db) * lattice.a2;
                segs.push_back({pa, pb});
            }
        }
    for (std::size_t i = 0; i < segs.size(); ++i)
        for (std::size_t j = i + 1; j < segs.size(); ++j)
            if (segments_cross(segs[i].a, segs[i].b, segs[j].a, segs[j].b))
                throw EmbeddingError("bond segments cross: the lattice drawing is "
                                     "not a planar embedding");
}

} // namespace detail

/// Enumerates the distinct interior faces of one unit cell's periodic embedding.
///
/// The trace runs directly on the torus graph (sites with cell offsets), which
/// yields each translation class of faces exactly once; contractible faces close
/// with zero accumulated offset. Areas come from the shoelace formula on the
/// unwrapped vertex polygon.
inline std::vector<Plaquette> enumerate_faces(const Lattice& lattice,
                                              FluxQuantum fq = FluxQuantum::h_over_e) {
    if (lattice.bonds.empty()) return {};
    detail::check_planar_embedding(lattice);

    std::vector<detail::DirectedEdge> edges;
    for (const auto& b : lattice.bonds) {
        const Vec2 pa = lattice.sites[b.a].position;
        const Vec2 pb = lattice.sites[b.b].position +
                        static_cast<double>(b.da) * lattice.a1 +
                        static_cast<double>(b.db) * lattice.a2;
        const Vec2 d = pb - pa;
        const int e0 = static_cast<int>(edges.size());
        edges.push_back({b.a, b.b, b.da, b.db, e0 + 1, angle_of(d), norm(d)});
        edges.push_back({b.b, b.a, -b.da, -b.db, e0, angle_of(-d), norm(d)});
    }
    detail::FaceTracer tracer(static_cast<int>(lattice.sites.size()), std::move(edges));

    std::vector<Plaquette> faces;
    for (const auto& walk : tracer.trace_all()) {
        // Unwrap the walk in the universal cover.
        std::vector<Vec2> poly;
        std::vector<int> cycle;
        int da = 0, db = 0;
        for (int e : walk) {
            const auto& ed = tracer.edge(e);
            poly.push_back(lattice.sites[ed.from].position +
                           static_cast<double>(da) * lattice.a1 +
                           static_cast<double>(db) * lattice.a2);
            cycle.push_back(ed.from);
            da += ed.da;
            db += ed.db;
        }
        if (da != 0 || db != 0) continue; // non-contractible walk, not a face
        const double area = std::abs(detail::shoelace(poly));
        if (area <= 1e-12) continue; // degenerate (dangling bonds)
        Plaquette p;
        p.vertex_cycle = std::move(cycle);
        p.area = area;
        p.period = period_of_area(area, fq);
        faces.push_back(std::move(p));
    }
    std::sort(faces.begin(), faces.end(),
              [](const Plaquette& a, const Plaquette& b) { return a.area > b.area; });
    return faces;
}

/// Faces of a finite flake graph, traced with the same rotation-system walk.
/// Returns the interior faces; the outer boundary walk is discarded by its
/// orientation (opposite signed area).
inline std::vector<Plaquette> enumerate_flake_faces(
    const Flake& flake, FluxQuantum fq = FluxQuantum::h_over_e) {
    std::vector<detail::DirectedEdge> edges;
    for (const auto& b : flake.edges) {
        const Vec2 pa = flake.sites[b.n].position;
        const Vec2 pb = flake.sites[b.m].position;
        const Vec2 d = pb - pa;
        const int e0 = static_cast<int>(edges.size());
        edges.push_back({b.n, b.m, 0, 0, e0 + 1, angle_of(d), norm(d)});
        edges.push_back({b.m, b.n, 0, 0, e0, angle_of(-d), norm(d)});
    }
    detail::FaceTracer tracer(static_cast<int>(flake.sites.size()), std::move(edges));

    // The clockwise-next successor rule traces every interior face
    // counter-clockwise (positive signed area) and each outer boundary
    // clockwise; degenerate walks along dangling bonds enclose no area.
    std::vector<Plaquette> faces;
    for (const auto& walk : tracer.trace_all()) {
        std::vector<Vec2> poly;
        std::vector<int> cycle;
        for (int e : walk) {
            poly.push_back(flake.sites[tracer.edge(e).from].position);
            cycle.push_back(tracer.edge(e).from);
        }
        const double a = detail::shoelace(poly);
        if (a <= 1e-12) continue;
        Plaquette p;
        p.vertex_cycle = std::move(cycle);
        p.area = a;
        p.period = period_of_area(a, fq);
        faces.push_back(std::move(p));
    }
    return faces;
}

/// Groups faces whose areas agree to a relative tolerance into classes.
inline std::vector<FaceClass> face_classes(const std::vector<Plaquette>& faces,
                                           double rel_tol = 1e-6) {
    std::vector<FaceClass> classes;
    for (const auto& f : faces) {
        auto it = std::find_if(classes.begin(), classes.end(), [&](const FaceClass& c) {
            return std::abs(c.area - f.area) <= rel_tol * c.area;
        });
        if (it == classes.end()) {
            classes.push_back({f.area, f.period, static_cast<int>(f.vertex_cycle.size()),
                               1, f});
        } else {
            ++it->multiplicity;
        }
    }
    std::sort(classes.begin(), classes.end(),
              [](const FaceClass& a, const FaceClass& b) { return a.area > b.area; });
    return classes;
}

/// A common near-multiple of a period set: L together with integers k_i such
/// that every k_i * p_i lies within `tolerance` (relative) of L.
struct BeatPeriod {
    double period = 0.0; // Tesla
    std::vector<int> multiplicities;
};

/// Finds common near-multiples of the given periods, smallest first. The search
/// walks multiples of the largest period; each candidate family reports
/// L = mean(k_i * p_i). Multiplicities are bounded by `k_max`.
inline std::vector<BeatPeriod> beat_periods(const std::vector<double>& periods,
                                            double tolerance, int k_max = 100) {
    if (periods.empty()) throw ConfigError("beat_periods needs at least one period");
    for (double p : periods)
        if (!(p > 0.0)) throw ConfigError("beat_periods requires positive periods");
    if (!(tolerance >= 0.0 && tolerance < 0.2))
        throw ConfigError("beat tolerance must lie in [0, 0.2)");

    const double p_ref = *std::max_element(periods.begin(), periods.end());
    std::vector<BeatPeriod> result;
    for (int k_ref = 1; k_ref <= k_max; ++k_ref) {
        const double target = k_ref * p_ref;
        std::vector<int> ks(periods.size());
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < periods.size(); ++i) {
            const int k = static_cast<int>(std::llround(target / periods[i]));
            if (k < 1 || k > k_max) {
                ok = false;
                break;
            }
            ks[i] = k;
            const double m = k * periods[i];
            lo = std::max(lo, m / (1.0 + tolerance));
            hi = std::min(hi, m / std::max(1.0 - tolerance, 1e-300));
            sum += m;
        }
        if (!ok || lo > hi * (1.0 + 1e-12)) continue;
        const double L = sum / static_cast<double>(periods.size());
        // A coarser family already found with the same ratios is not repeated.
        bool duplicate = false;
        for (const auto& r : result) {
            if (std::abs(L - r.period * std::llround(L / r.period)) <=
                tolerance * L + 1e-9 * L)
                duplicate = true;
        }
        if (!duplicate) result.push_back({L, ks});
    }
    return result;
}

} // namespace hb
