#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hofb/builtin.hpp"
#include "hofb/plaquette.hpp"

using namespace hb;

TEST_CASE("square lattice has one unit face") {
    const auto faces = enumerate_faces(make_square(1.0));
    REQUIRE(faces.size() == 1);
    CHECK(faces[0].area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(faces[0].vertex_cycle.size() == 4);
}

TEST_CASE("graphene hexagon area and period") {
    const auto faces = enumerate_faces(make_honeycomb(1.42, -2.7));
    REQUIRE(faces.size() == 1);
    const double hex_area = 1.5 * std::sqrt(3.0) * 1.42 * 1.42; // 5.2383 A^2
    CHECK(faces[0].area == doctest::Approx(hex_area).epsilon(1e-12));
    CHECK(faces[0].vertex_cycle.size() == 6);
    // "around 78 kT" for graphene
    CHECK(faces[0].period == doctest::Approx(78950.0).epsilon(0.01));
}

TEST_CASE("kagome has triangle and hexagon classes with area ratio 1:6") {
    const auto faces = enumerate_faces(make_kagome(1.0));
    REQUIRE(faces.size() == 3); // two triangles + one hexagon per cell
    const auto classes = face_classes(faces);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].multiplicity == 1); // hexagon
    CHECK(classes[1].multiplicity == 2); // up and down triangles
    CHECK(classes[0].area / classes[1].area == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("face areas tile the unit cell") {
    for (const auto& lat :
         {make_square(1.3), make_honeycomb(1.42), make_kagome(0.9)}) {
        const auto faces = enumerate_faces(lat);
        double total = 0.0;
        for (const auto& f : faces) total += f.area;
        CHECK(total == doctest::Approx(lat.cell_area()).epsilon(1e-9));
    }
}

TEST_CASE("porous honeycomb has ring and pore classes") {
    const auto lat = make_porous_honeycomb();
    const auto faces = enumerate_faces(lat);
    REQUIRE(faces.size() == 3); // two rings + one pore
    const auto classes = face_classes(faces);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].multiplicity == 1); // pore
    CHECK(classes[1].multiplicity == 2); // rings
    // default pore scale targets A_pore / A_ring = 3/2
    CHECK(classes[0].area / classes[1].area == doctest::Approx(1.5).epsilon(2e-3));
    double total = 0.0;
    for (const auto& f : faces) total += f.area;
    CHECK(total == doctest::Approx(lat.cell_area()).epsilon(1e-9));
}

TEST_CASE("period_of_area follows B_p = Phi0/A") {
    CHECK(period_of_area(1.0) == doctest::Approx(4.135667696e5).epsilon(1e-12));
    CHECK(period_of_area(2.0) == doctest::Approx(period_of_area(1.0) / 2.0));
    // Starphene-COF lattice plaquette: 3091 A^2 -> 133.8 T
    CHECK(period_of_area(3091.0) == doctest::Approx(133.8).epsilon(2e-3));
    // h/2e halves the period
    CHECK(period_of_area(1.0, FluxQuantum::h_over_2e) ==
          doctest::Approx(period_of_area(1.0) / 2.0).epsilon(1e-9));
    CHECK_THROWS_AS(period_of_area(0.0), NumericError);
    CHECK_THROWS_AS(period_of_area(-1.0), NumericError);
}

TEST_CASE("periods are invariant under rigid rotation of the structure") {
    auto lat = make_kagome(1.0);
    auto rot = lat;
    const double th = 0.6180339887;
    rot.a1 = rotated(rot.a1, th);
    rot.a2 = rotated(rot.a2, th);
    for (auto& s : rot.sites) s.position = rotated(s.position, th);
    rot = assign_hoppings(rot, lat.hopping_rules);

    auto ca = face_classes(enumerate_faces(lat));
    auto cb = face_classes(enumerate_faces(rot));
    REQUIRE(ca.size() == cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i)
        CHECK(ca[i].period == doctest::Approx(cb[i].period).epsilon(1e-9));
}

TEST_CASE("Euler check on open flakes: V - E + F_interior = 1") {
    for (const auto& lat : {make_square(1.0), make_honeycomb(1.42)}) {
        for (int n : {2, 5, 10}) {
            const auto flake = build_flake(lat, n, n);
            const auto faces = enumerate_flake_faces(flake);
            const long v = static_cast<long>(flake.sites.size());
            const long e = static_cast<long>(flake.edges.size());
            const long f = static_cast<long>(faces.size());
            CHECK(v - e + f == 1);
        }
    }
}

TEST_CASE("crossing bonds are an embedding error") {
    // Two species pairs bonded along the two diagonals of the same unit
    // square: the segments cross at (0.5, 0.5), which is not a site.
    Lattice lat;
    lat.a1 = {10.0, 0.0};
    lat.a2 = {0.0, 10.0};
    lat.sites = {{"P", {0.0, 0.0}},
                 {"P", {1.0, 1.0}},
                 {"Q", {1.0, 0.0}},
                 {"Q", {0.0, 1.0}}};
    lat = assign_hoppings(lat, {{"P", "P", 1.3, 1.5, -1.0},
                                {"Q", "Q", 1.3, 1.5, -1.0}});
    REQUIRE(lat.bonds.size() == 2);
    CHECK_THROWS_AS(enumerate_faces(lat), EmbeddingError);
}

TEST_CASE("beat periods") {
    SUBCASE("paper pair 121.9/81.06 kT -> ~240 kT at (2,3)") {
        const auto beats = beat_periods({121.9e3, 81.06e3}, 0.02);
        REQUIRE(!beats.empty());
        CHECK(beats[0].period == doctest::Approx(243.5e3).epsilon(0.004));
        CHECK(beats[0].multiplicities == std::vector<int>{2, 3});
    }
    SUBCASE("identical periods") {
        const auto beats = beat_periods({5.0, 5.0}, 0.01);
        REQUIRE(!beats.empty());
        CHECK(beats[0].period == doctest::Approx(5.0));
        CHECK(beats[0].multiplicities == std::vector<int>{1, 1});
    }
    SUBCASE("exact harmonic at zero tolerance") {
        const auto beats = beat_periods({100.0, 50.0}, 0.0);
        REQUIRE(!beats.empty());
        CHECK(beats[0].period == doctest::Approx(100.0));
        CHECK(beats[0].multiplicities == std::vector<int>{1, 2});
    }
    SUBCASE("no common near-multiple within bound") {
        CHECK(beat_periods({1.0, std::sqrt(2.0)}, 1e-9).empty());
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(beat_periods({}, 0.02), ConfigError);
        CHECK_THROWS_AS(beat_periods({1.0}, 0.5), ConfigError);
        CHECK_THROWS_AS(beat_periods({-1.0}, 0.02), ConfigError);
    }
}
