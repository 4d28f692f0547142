#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "hofb/sweep.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(HOFB_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe))
        r.output.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path temp_dir() {
    const auto dir =
        fs::temp_directory_path() / ("hofb_cli_test_" + std::to_string(getpid()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Period of the first face class printed by `plaquettes`.
double first_class_period(const std::string& output) {
    std::istringstream in(output);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int idx = -1, verts = 0, mult = 0;
        double area = 0.0, period = 0.0;
        if (ls >> idx >> verts >> area >> period >> mult && idx == 0)
            return period;
    }
    FAIL("no face class row in output:\n" << output);
    return 0.0;
}

} // namespace

TEST_CASE("plaquettes: graphene period near 79 kT") {
    const auto r = run_cli("plaquettes --builtin graphene");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("1 face(s), 1 class(es)") != std::string::npos);
    CHECK(first_class_period(r.output) == doctest::Approx(78950.0).epsilon(0.01));
}

TEST_CASE("plaquettes: unit square period and flux-quantum switch") {
    const auto r = run_cli("plaquettes --builtin square --a 1 --t -1");
    CHECK(r.exit_code == 0);
    const double p = first_class_period(r.output);
    CHECK(p == doctest::Approx(4.135667696e5).epsilon(1e-6));

    const auto r2 =
        run_cli("plaquettes --builtin square --a 1 --t -1 --flux-quantum h_over_2e");
    CHECK(r2.exit_code == 0);
    CHECK(first_class_period(r2.output) == doctest::Approx(p / 2.0).epsilon(1e-6));
}

TEST_CASE("plaquettes: kagome classes and their beat") {
    const auto r = run_cli("plaquettes --builtin kagome");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("3 face(s), 2 class(es)") != std::string::npos);
    // Triangle period is exactly six hexagon periods: beat at (6,1).
    CHECK(r.output.find("(6,1)") != std::string::npos);
}

TEST_CASE("butterfly: writes all formats plus a manifest, reproducibly") {
    const auto dir = temp_dir();
    const std::string prefix = (dir / "fly").string();
    const std::string args =
        "butterfly --builtin square --a 1 --t -1 --nx 6 --ny 6 --b-min 0 "
        "--b-max 2e5 --b-points 4 --moments 64 --random-vectors 1 "
        "--energy-points 64 --workers 1 --format csv --format bin --format pgm "
        "--out " + prefix;
    const auto r = run_cli(args);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(prefix + ".csv"));
    REQUIRE(fs::exists(prefix + ".spec"));
    REQUIRE(fs::exists(prefix + ".pgm"));
    REQUIRE(fs::exists(prefix + ".manifest"));
    CHECK(!fs::exists(prefix + ".csv.tmp"));

    const auto manifest = slurp(prefix + ".manifest");
    CHECK(manifest.find("seed = 1") != std::string::npos);
    CHECK(manifest.find("b_points = 4") != std::string::npos);
    CHECK(manifest.find("builtin = square") != std::string::npos);

    std::ifstream bin(prefix + ".spec", std::ios::binary);
    const auto spec = hb::read_binary(bin);
    CHECK(spec.b_points() == 4);
    CHECK(spec.energy_points() == 64);
    CHECK(spec.b_values.front() == 0.0);
    CHECK(spec.b_values.back() == 2e5);

    // Identical invocation, identical bytes.
    const std::string bytes = slurp(prefix + ".spec");
    fs::remove(prefix + ".spec");
    const auto r2 = run_cli(args);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(prefix + ".spec") == bytes);

    // Different seed, different spectrum bytes.
    const auto r3 = run_cli(args + " --seed 7");
    CHECK(r3.exit_code == 0);
    CHECK(slurp(prefix + ".spec") != bytes);
    fs::remove_all(dir);
}

TEST_CASE("dos: one-row CSV at a single field") {
    const auto dir = temp_dir();
    const std::string prefix = (dir / "dos").string();
    const auto r = run_cli(
        "dos --builtin honeycomb --nx 4 --ny 4 --b-min 1e4 --moments 64 "
        "--random-vectors 1 --energy-points 50 --out " + prefix);
    CHECK(r.exit_code == 0);
    std::ifstream in(prefix + ".csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "B_tesla,E_ev,dos");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 50); // one field x 50 energies
    fs::remove_all(dir);
}

TEST_CASE("oracle: square flux set for q_max = 3") {
    const auto dir = temp_dir();
    const std::string prefix = (dir / "orc").string();
    const auto r =
        run_cli("oracle --lattice square --q-max 3 --k-grid 5 --out " + prefix);
    CHECK(r.exit_code == 0);
    std::ifstream in(prefix + ".oracle.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "flux,energy");
    std::set<std::string> fluxes;
    double e_min = 1e9, e_max = -1e9;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        fluxes.insert(line.substr(0, comma));
        const double e = std::stod(line.substr(comma + 1));
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
    }
    CHECK(fluxes.size() == 5); // 0, 1/3, 1/2, 2/3, 1
    CHECK(e_min == doctest::Approx(-4.0).epsilon(1e-9)); // reached at flux 0
    CHECK(e_max == doctest::Approx(4.0).epsilon(1e-9));
    fs::remove_all(dir);
}

TEST_CASE("oracle: honeycomb spectra are symmetric in energy") {
    const auto dir = temp_dir();
    const std::string prefix = (dir / "orch").string();
    const auto r =
        run_cli("oracle --lattice honeycomb --q-max 2 --k-grid 7 --out " + prefix);
    CHECK(r.exit_code == 0);
    std::ifstream in(prefix + ".oracle.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    double e_min = 1e9, e_max = -1e9;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const double e = std::stod(line.substr(comma + 1));
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
    }
    CHECK(e_max == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(e_min == doctest::Approx(-e_max).epsilon(1e-9));
    fs::remove_all(dir);
}

TEST_CASE("info: structure summary and flake counts") {
    const auto r = run_cli("info --builtin honeycomb --nx 3 --ny 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("sites/cell:  2") != std::string::npos);
    CHECK(r.output.find("bonds/cell:  3") != std::string::npos);
    CHECK(r.output.find("flake 3x3: 18 sites") != std::string::npos);
}

TEST_CASE("info: reads a structure file with a hoppings config") {
    const auto dir = temp_dir();
    const auto xyz = dir / "graphene.xyz";
    {
        std::ofstream out(xyz);
        out << "2\n"
            << "Lattice=\"2.46 0.0 0.0 -1.23 2.130422 0.0 0.0 0.0 20.0\"\n"
            << "C 0.0 0.0 0.0\n"
            << "C 0.0 1.42 0.0\n";
    }
    const auto hop = dir / "hop.cfg";
    {
        std::ofstream out(hop);
        out << "hop C C 1.2 1.6 -2.7\nonsite C 0.0\n";
    }
    const auto r = run_cli("info --structure " + xyz.string() + " --hoppings " +
                           hop.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("bonds/cell:  3") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("exit codes: usage, input, numeric") {
    CHECK(run_cli("").exit_code == 2);            // missing subcommand
    CHECK(run_cli("plaquettes --bogus").exit_code == 2);
    CHECK(run_cli("plaquettes").exit_code == 3);  // neither structure nor builtin
    CHECK(run_cli("plaquettes --builtin nosuch").exit_code == 3);
    CHECK(run_cli("info --structure /nonexistent.xyz").exit_code == 3);

    const auto dir = temp_dir();
    const auto bad = dir / "bad.xyz";
    {
        std::ofstream out(bad);
        out << "not a number\n";
    }
    CHECK(run_cli("info --structure " + bad.string()).exit_code == 3);

    // Oversized flake: numeric/size failure.
    const auto r = run_cli("butterfly --builtin square --a 1 --t -1 --nx 2000 "
                           "--ny 2000 --b-max 1 --out " + (dir / "x").string());
    CHECK(r.exit_code == 4);
    fs::remove_all(dir);
}
