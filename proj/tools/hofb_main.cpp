// hofb: tight-binding magnetic-spectrum engine.
//
// Subcommands: plaquettes, butterfly, dos, oracle, info.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "hofb/hofb.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
    std::string structure_path;
    std::string builtin_name;
    std::string hoppings_path;
    std::uint64_t seed = 1;
    std::string out_prefix = "hofb";
    std::string flux_quantum = "h_over_e";
    double builtin_a = 0.0;
    double builtin_t = 0.0;
    int ring_size = 12;
    double pore_scale = 1.005171;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    auto* s = cmd->add_option("--structure", o.structure_path,
                              "extended-XYZ structure file");
    auto* b = cmd->add_option(
        "--builtin", o.builtin_name,
        "built-in lattice: square, honeycomb, graphene, kagome, porous-honeycomb");
    s->excludes(b);
    cmd->add_option("--hoppings", o.hoppings_path,
                    "hopping/on-site config (hop A B dmin dmax t / onsite A e)");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out", o.out_prefix, "output path prefix");
    cmd->add_option("--flux-quantum", o.flux_quantum, "h_over_e or h_over_2e")
        ->check(CLI::IsMember({"h_over_e", "h_over_2e"}));
    cmd->add_option("--a", o.builtin_a, "built-in lattice length parameter (A)");
    cmd->add_option("--t", o.builtin_t, "built-in hopping (eV)");
    cmd->add_option("--ring-size", o.ring_size, "porous-honeycomb ring size");
    cmd->add_option("--pore-scale", o.pore_scale, "porous-honeycomb pore scale");
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hb::ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

hb::FluxQuantum flux_quantum(const CommonOpts& o) {
    return o.flux_quantum == "h_over_2e" ? hb::FluxQuantum::h_over_2e
                                         : hb::FluxQuantum::h_over_e;
}

hb::Lattice load_lattice(const CommonOpts& o) {
    hb::Lattice lat;
    if (!o.builtin_name.empty()) {
        lat = hb::make_builtin(o.builtin_name, o.builtin_a, o.builtin_t, o.ring_size,
                               o.pore_scale);
    } else if (!o.structure_path.empty()) {
        lat = hb::parse_structure(slurp(o.structure_path));
    } else {
        throw hb::ConfigError("either --structure or --builtin is required");
    }
    if (!o.hoppings_path.empty()) {
        const auto cfg = hb::parse_hopping_config(slurp(o.hoppings_path));
        if (!cfg.rules.empty()) lat = hb::assign_hoppings(lat, cfg.rules);
        lat.onsite = cfg.onsite;
    } else if (lat.bonds.empty()) {
        // default rule set per the structure module contract
        lat = hb::assign_hoppings(lat, {{"C", "C", 1.2, 1.6, -2.7}});
    }
    return lat;
}

int cmd_plaquettes(const CommonOpts& o) {
    const auto lat = load_lattice(o);
    const auto faces = hb::enumerate_faces(lat, flux_quantum(o));
    const auto classes = hb::face_classes(faces);
    std::printf("# %zu face(s), %zu class(es); cell area %.6g A^2\n", faces.size(),
                classes.size(), lat.cell_area());
    std::printf("%-8s %-10s %-16s %-16s %s\n", "face", "vertices", "area_A2",
                "B_p_tesla", "multiplicity");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        std::printf("%-8zu %-10d %-16.8g %-16.8g %d\n", i, c.vertex_count, c.area,
                    c.period, c.multiplicity);
    }
    if (classes.size() >= 2) {
        std::printf("\n# beat periods (pairwise, tolerance 0.02)\n");
        std::printf("%-8s %-8s %-16s %s\n", "class_i", "class_j", "beat_tesla",
                    "multiplicities");
        for (std::size_t i = 0; i < classes.size(); ++i)
            for (std::size_t j = i + 1; j < classes.size(); ++j) {
                const auto beats = hb::beat_periods(
                    {classes[i].period, classes[j].period}, 0.02);
                if (beats.empty()) {
                    std::printf("%-8zu %-8zu %-16s -\n", i, j, "none");
                    continue;
                }
                std::printf("%-8zu %-8zu %-16.8g (%d,%d)\n", i, j, beats[0].period,
                            beats[0].multiplicities[0], beats[0].multiplicities[1]);
            }
    }
    return 0;
}

int cmd_info(const CommonOpts& o, int nx, int ny) {
    const auto lat = load_lattice(o);
    std::set<std::string> species;
    for (const auto& s : lat.sites) species.insert(s.species);
    std::printf("sites/cell:  %zu\n", lat.sites.size());
    std::printf("bonds/cell:  %zu\n", lat.bonds.size());
    if (lat.bonds.empty()) std::printf("warning: no bonds assigned\n");
    std::string sp;
    for (const auto& s : species) sp += (sp.empty() ? "" : ",") + s;
    std::printf("species:     %s\n", sp.c_str());
    std::printf("cell area:   %.8g A^2\n", lat.cell_area());
    std::printf("a1:          (%.8g, %.8g) A\n", lat.a1.x, lat.a1.y);
    std::printf("a2:          (%.8g, %.8g) A\n", lat.a2.x, lat.a2.y);
    if (nx > 0 && ny > 0) {
        const auto flake = hb::build_flake(lat, nx, ny);
        std::printf("flake %dx%d: %zu sites, %zu edges\n", nx, ny,
                    flake.sites.size(), flake.edges.size());
    }
    return 0;
}

void write_manifest(const std::string& path, const CommonOpts& o,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ofstream out(path);
    if (!out) throw hb::ParseError("cannot write manifest: " + path);
    out << "version = " << hb::kVersion << "\n";
    out << "seed = " << o.seed << "\n";
    out << "flux_quantum = " << o.flux_quantum << "\n";
    if (!o.builtin_name.empty()) out << "builtin = " << o.builtin_name << "\n";
    if (!o.structure_path.empty()) out << "structure = " << o.structure_path << "\n";
    if (!o.hoppings_path.empty()) out << "hoppings = " << o.hoppings_path << "\n";
    if (o.builtin_a != 0.0) out << "a = " << o.builtin_a << "\n";
    if (o.builtin_t != 0.0) out << "t = " << o.builtin_t << "\n";
    for (const auto& [k, v] : extra) out << k << " = " << v << "\n";
}

struct ButterflyOpts {
    double b_min = 0.0;
    double b_max = 0.0;
    int b_points = 128;
    int nx = 50, ny = 50;
    int moments = 512;
    int random_vectors = 3;
    int energy_points = 512;
    int workers = 0;
    bool center = false;
    std::vector<std::string> formats;
};

int cmd_butterfly(const CommonOpts& o, const ButterflyOpts& bo, bool single_dos) {
    const auto lat = load_lattice(o);
    const auto flake = hb::build_flake(lat, bo.nx, bo.ny);

    hb::SweepPlan plan;
    plan.b_min = bo.b_min;
    plan.b_max = single_dos ? bo.b_min : bo.b_max;
    plan.b_points = single_dos ? 1 : bo.b_points;
    plan.workers = bo.workers;
    plan.kpm.num_moments = bo.moments;
    plan.kpm.num_random_vectors = bo.random_vectors;
    plan.kpm.energy_points = bo.energy_points;
    plan.kpm.rng_seed = o.seed;

    auto spectrum = hb::run_sweep(flake, plan);
    if (bo.center) spectrum = hb::center_energies(std::move(spectrum));

    std::vector<std::string> formats = bo.formats;
    if (formats.empty()) formats = {"csv"};

    // Write to temporaries first: a failing stage must not leave partial files.
    std::vector<std::pair<std::string, std::string>> outputs;
    for (const auto& f : formats) {
        const std::string path = o.out_prefix + "." +
                                 (f == "bin" ? "spec" : f == "pgm" ? "pgm" : "csv");
        std::ofstream out(path + ".tmp", std::ios::binary);
        if (!out) throw hb::ParseError("cannot write output: " + path);
        if (f == "csv") hb::write_csv(spectrum, out);
        else if (f == "bin") hb::write_binary(spectrum, out);
        else if (f == "pgm") hb::write_pgm(spectrum, out);
        else throw hb::ConfigError("unknown format '" + f + "'");
        out.close();
        outputs.push_back({path + ".tmp", path});
    }
    for (const auto& [tmp, final_path] : outputs)
        if (std::rename(tmp.c_str(), final_path.c_str()) != 0)
            throw hb::ParseError("cannot finalize output: " + final_path);

    write_manifest(o.out_prefix + ".manifest", o,
                   {{"command", single_dos ? "dos" : "butterfly"},
                    {"b_min", std::to_string(plan.b_min)},
                    {"b_max", std::to_string(plan.b_max)},
                    {"b_points", std::to_string(plan.b_points)},
                    {"nx", std::to_string(bo.nx)},
                    {"ny", std::to_string(bo.ny)},
                    {"moments", std::to_string(bo.moments)},
                    {"random_vectors", std::to_string(bo.random_vectors)},
                    {"energy_points", std::to_string(bo.energy_points)},
                    {"center", bo.center ? "true" : "false"}});
    std::printf("wrote %zu file(s) with prefix %s (%zu x %zu grid)\n",
                outputs.size() + 1, o.out_prefix.c_str(), spectrum.b_points(),
                spectrum.energy_points());
    return 0;
}

int cmd_oracle(const std::string& lattice_name, int q_max, int k_grid, double t,
               const std::string& out_prefix) {
    if (lattice_name != "square" && lattice_name != "honeycomb")
        throw hb::ConfigError("oracle supports lattices: square, honeycomb");
    if (q_max < 1 || q_max > 200)
        throw hb::ConfigError("q_max must lie in [1, 200]");
    const std::string path = out_prefix + ".oracle.csv";
    std::ofstream out(path);
    if (!out) throw hb::ParseError("cannot write output: " + path);
    out << "flux,energy\n";
    out.precision(12);
    for (int q = 1; q <= q_max; ++q)
        for (int p = 0; p <= q; ++p) {
            if (std::gcd(p, q) != 1 && !(p == 0 && q == 1)) continue;
            if (p == 0 && q != 1) continue;
            const hb::RationalFlux flux(p, q);
            const auto spec = lattice_name == "square"
                                  ? hb::harper_spectrum_square(flux, t, k_grid)
                                  : hb::harper_spectrum_honeycomb(flux, t, k_grid);
            for (double e : spec) out << flux.value() << ',' << e << '\n';
        }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hofb: Hofstadter butterfly spectra for 2D tight-binding lattices"};
    app.require_subcommand(1);

    CommonOpts plaq_opts, info_opts, fly_opts, dos_opts;
    ButterflyOpts fly, dos_one;
    int info_nx = 0, info_ny = 0;

    auto* plaq = app.add_subcommand(
        "plaquettes", "enumerate plaquettes and predicted field periods");
    add_common(plaq, plaq_opts);

    auto* fly_cmd = app.add_subcommand("butterfly", "sweep B and write DOS(E,B)");
    add_common(fly_cmd, fly_opts);
    fly_cmd->add_option("--b-min", fly.b_min, "sweep start (Tesla)");
    fly_cmd->add_option("--b-max", fly.b_max, "sweep end (Tesla)");
    fly_cmd->add_option("--b-points", fly.b_points, "number of field points");
    fly_cmd->add_option("--nx", fly.nx, "supercell repetitions along a1");
    fly_cmd->add_option("--ny", fly.ny, "supercell repetitions along a2");
    fly_cmd->add_option("--moments", fly.moments, "KPM moments");
    fly_cmd->add_option("--random-vectors", fly.random_vectors, "KPM random vectors");
    fly_cmd->add_option("--energy-points", fly.energy_points, "energy grid size");
    fly_cmd->add_option("--workers", fly.workers, "worker threads (0 = auto)");
    fly_cmd->add_option("--format", fly.formats, "csv, bin, pgm (repeatable)");
    fly_cmd->add_flag("--center", fly.center, "center the energy axis");

    auto* dos_cmd =
        app.add_subcommand("dos", "single-field DOS curve (B = --b-min)");
    add_common(dos_cmd, dos_opts);
    dos_cmd->add_option("--b-min", dos_one.b_min, "field (Tesla)");
    dos_cmd->add_option("--nx", dos_one.nx, "supercell repetitions along a1");
    dos_cmd->add_option("--ny", dos_one.ny, "supercell repetitions along a2");
    dos_cmd->add_option("--moments", dos_one.moments, "KPM moments");
    dos_cmd->add_option("--random-vectors", dos_one.random_vectors,
                        "KPM random vectors");
    dos_cmd->add_option("--energy-points", dos_one.energy_points, "energy grid size");
    dos_cmd->add_option("--format", dos_one.formats, "csv, bin (repeatable)");

    std::string oracle_lattice = "square", oracle_out = "hofb";
    int oracle_qmax = 20, oracle_kgrid = 33;
    double oracle_t = -1.0;
    auto* oracle_cmd = app.add_subcommand(
        "oracle", "Harper magnetic-Bloch reference spectra as CSV");
    oracle_cmd->add_option("--lattice", oracle_lattice, "square or honeycomb");
    oracle_cmd->add_option("--q-max", oracle_qmax, "largest flux denominator");
    oracle_cmd->add_option("--k-grid", oracle_kgrid, "k mesh points per axis");
    oracle_cmd->add_option("--t", oracle_t, "hopping (eV)");
    oracle_cmd->add_option("--out", oracle_out, "output path prefix");

    auto* info_cmd = app.add_subcommand("info", "structure summary");
    add_common(info_cmd, info_opts);
    info_cmd->add_option("--nx", info_nx, "also materialize an nx x ny flake");
    info_cmd->add_option("--ny", info_ny, "see --nx");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (plaq->parsed()) return cmd_plaquettes(plaq_opts);
        if (fly_cmd->parsed()) return cmd_butterfly(fly_opts, fly, false);
        if (dos_cmd->parsed()) return cmd_butterfly(dos_opts, dos_one, true);
        if (oracle_cmd->parsed())
            return cmd_oracle(oracle_lattice, oracle_qmax, oracle_kgrid, oracle_t,
                              oracle_out);
        if (info_cmd->parsed()) return cmd_info(info_opts, info_nx, info_ny);
    } catch (const hb::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const hb::EmbeddingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const hb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const hb::SizeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const hb::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
