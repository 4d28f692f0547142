#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hofb/builtin.hpp"
#include "hofb/oracle.hpp"
#include "hofb/peierls.hpp"

using namespace hb;

TEST_CASE("rational flux is stored coprime") {
    const RationalFlux f(2, 4);
    CHECK(f.p == 1);
    CHECK(f.q == 2);
    CHECK(f.value() == doctest::Approx(0.5));
    CHECK(RationalFlux(-2, 6).p == -1);
    CHECK_THROWS_AS(RationalFlux(1, 0), ConfigError);
    CHECK_THROWS_AS(RationalFlux(1, -3), ConfigError);
}

TEST_CASE("exact_dos integrates to the state count") {
    Lattice lat;
    lat.a1 = {10.0, 0.0};
    lat.a2 = {0.0, 10.0};
    lat.sites = {{"C", {0.0, 0.0}}, {"C", {1.42, 0.0}}};
    lat = assign_hoppings(lat, {{"C", "C", 1.0, 2.0, -2.7}});
    const auto H = assemble(build_flake(lat, 1, 1), 0.0);

    const auto grid = uniform_grid(-5.0, 5.0, 2001);
    const auto dos = exact_dos(H, 0.05, grid);
    CHECK(dos.integral() == doctest::Approx(2.0).epsilon(1e-6));
    // Peaks sit at the dimer levels.
    const auto peak = std::max_element(dos.density.begin(), dos.density.end());
    const double e_peak =
        grid[static_cast<std::size_t>(peak - dos.density.begin())];
    CHECK(std::abs(std::abs(e_peak) - 2.7) < 0.01);
}

TEST_CASE("exact_dos refuses oversized matrices") {
    const auto H = assemble(build_flake(make_honeycomb(), 64, 64), 0.0);
    REQUIRE(H.dim() > kMaxExactDim);
    CHECK_THROWS_AS(exact_dos(H, 0.1, uniform_grid(-10.0, 10.0, 8)), SizeError);
}

TEST_CASE("square lattice at zero flux fills [-4|t|, 4|t|]") {
    const auto s = harper_spectrum_square(RationalFlux(0, 1), -1.0, 33);
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    CHECK(*lo == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(*hi == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("square lattice at half flux matches the closed form") {
    // E = +-2|t| sqrt(cos^2 k1 + cos^2 k2) per momentum.
    const int kg = 17;
    const auto s = harper_spectrum_square(RationalFlux(1, 2), -1.0, kg);
    REQUIRE(s.size() == static_cast<std::size_t>(kg) * kg * 2);
    std::size_t idx = 0;
    for (int i1 = 0; i1 < kg; ++i1)
        for (int i2 = 0; i2 < kg; ++i2) {
            const double k1 = 2.0 * std::numbers::pi / 2.0 * i1 / (kg - 1);
            const double k2 = 2.0 * std::numbers::pi * i2 / (kg - 1);
            const double e = 2.0 * std::sqrt(std::cos(k1) * std::cos(k1) +
                                             std::cos(k2) * std::cos(k2));
            CHECK(s[idx++] == doctest::Approx(-e).epsilon(1e-9));
            CHECK(s[idx++] == doctest::Approx(e).epsilon(1e-9));
        }
    const auto hi = *std::max_element(s.begin(), s.end());
    CHECK(hi == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("square spectrum is even in flux and periodic in flux") {
    const int kg = 9;
    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto a = sorted(harper_spectrum_square(RationalFlux(1, 3), -1.0, kg));
    const auto b = sorted(harper_spectrum_square(RationalFlux(2, 3), -1.0, kg));
    const auto c = sorted(harper_spectrum_square(RationalFlux(4, 3), -1.0, kg));
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
        CHECK(a[i] == doctest::Approx(c[i]).epsilon(1e-9));
    }
}

TEST_CASE("flux p/q opens q bands") {
    for (int q : {3, 5}) {
        const auto s = harper_spectrum_square(RationalFlux(1, q), -1.0, 21);
        const auto bands = band_intervals(s, q);
        REQUIRE(static_cast<int>(bands.size()) == q);
        for (int b = 0; b < q; ++b) {
            CHECK(bands[b].first <= bands[b].second);
            if (b + 1 < q) CHECK(bands[b].second <= bands[b + 1].first + 1e-9);
        }
    }
}

TEST_CASE("generic magnetic Bloch solver agrees with the Harper matrix") {
    const int q = 3;
    const auto lat = make_square(1.0, -1.0);
    const double B = period_of_area(lat.cell_area()) / q; // phi = 1/3
    const auto ref = harper_spectrum_square(RationalFlux(1, q), -1.0, 33);
    const auto gen = magnetic_bloch_spectrum(lat, q, B, 33);
    const auto rb = band_intervals(ref, q);
    const auto gb = band_intervals(gen, q);
    for (int b = 0; b < q; ++b) {
        CHECK(gb[b].first == doctest::Approx(rb[b].first).epsilon(0.02));
        CHECK(gb[b].second == doctest::Approx(rb[b].second).epsilon(0.02));
    }
    // Exact global extremes are mesh-independent up to sampling.
    const auto [rlo, rhi] = std::minmax_element(ref.begin(), ref.end());
    const auto [glo, ghi] = std::minmax_element(gen.begin(), gen.end());
    CHECK(*glo == doctest::Approx(*rlo).epsilon(5e-3));
    CHECK(*ghi == doctest::Approx(*rhi).epsilon(5e-3));
}

TEST_CASE("honeycomb at zero flux spans [-3|t|, 3|t|] symmetrically") {
    const auto s = harper_spectrum_honeycomb(RationalFlux(0, 1), -1.0, 33);
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    CHECK(*lo == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(*hi == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("honeycomb spectrum has E -> -E symmetry at rational flux") {
    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    for (auto flux : {RationalFlux(1, 3), RationalFlux(1, 2)}) {
        const auto s = sorted(harper_spectrum_honeycomb(flux, -1.0, 9));
        const std::size_t n = s.size();
        for (std::size_t i = 0; i < n; ++i)
            CHECK(s[i] == doctest::Approx(-s[n - 1 - i]).epsilon(1e-9));
    }
}

TEST_CASE("honeycomb spectrum is gauge independent") {
    // At flux 1/2, shifting the gauge origin by 2 * A_cell / |a1| moves both
    // k1 and k2 by exactly 2*pi: every hop phase changes, but each k point maps
    // onto itself and the sorted spectra agree to round-off.
    const auto lat = make_honeycomb(1.0, -1.0);
    const double y0 = 2.0 * lat.cell_area() / lat.a1.x;
    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto a = sorted(harper_spectrum_honeycomb(RationalFlux(1, 2), -1.0, 33));
    const auto b =
        sorted(harper_spectrum_honeycomb(RationalFlux(1, 2), -1.0, 33, y0));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) < 1e-10);
}

TEST_CASE("solver input validation") {
    CHECK_THROWS_AS(harper_spectrum_square(RationalFlux(1, 201), -1.0, 9),
                    SizeError);
    CHECK_THROWS_AS(harper_spectrum_square(RationalFlux(1, 3), -1.0, 1),
                    ConfigError);
    CHECK_THROWS_AS(magnetic_bloch_spectrum(make_square(), 0, 0.0, 9),
                    ConfigError);
}
