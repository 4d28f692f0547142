#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hofb/flake.hpp"
#include "hofb/kpm.hpp"
#include "hofb/peierls.hpp"

namespace hb {

struct SweepPlan {
    double b_min = 0.0; // Tesla
    double b_max = 0.0;
    int b_points = 1;
    KPMParams kpm;
    int workers = 0; // 0: hardware concurrency

    void validate() const {
        if (!(b_min <= b_max)) throw ConfigError("b_min must not exceed b_max");
        if (b_points < 1) throw ConfigError("b_points must be >= 1");
        kpm.validate();
    }
};

/// DOS on an (energy x magnetic field) grid: the butterfly.
struct Spectrum {
    std::vector<double> b_values; // Tesla, ascending
    std::vector<double> energies; // eV, shared by all rows
    std::vector<double> dos;      // row-major, b_points x energy_points
    bool centered = false;

    std::size_t b_points() const { return b_values.size(); }
    std::size_t energy_points() const { return energies.size(); }
    const double* row(std::size_t i) const { return dos.data() + i * energy_points(); }
    double* row(std::size_t i) { return dos.data() + i * energy_points(); }
    double max_dos() const {
        double m = 0.0;
        for (double v : dos) m = std::max(m, v);
        return m;
    }
};

/// Seed for the field point at B: derived from the quantized B value rather
/// than the loop index, so refined sweeps reuse identical noise at shared B.
inline std::uint64_t seed_for_field(std::uint64_t global_seed, double B) {
    return splitmix64(global_seed ^ splitmix64(std::bit_cast<std::uint64_t>(B)));
}

inline double field_at(const SweepPlan& plan, int i) {
    if (plan.b_points == 1) return plan.b_min;
    const double step = (plan.b_max - plan.b_min) / (plan.b_points - 1);
    return plan.b_min + i * step;
}

/// Sweeps B over a uniform grid and stacks the per-field KPM DOS rows. One
/// global spectral bound (the envelope over five sampled fields) keeps all rows
/// on a single shared energy grid. Field points are distributed over a worker
/// pool; the output is deterministic and independent of scheduling order.
inline Spectrum run_sweep(const Flake& flake, const SweepPlan& plan) {
    plan.validate();
    HamiltonianFactory factory(flake);

    SpectralBounds bounds{std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity()};
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double B = plan.b_min + f * (plan.b_max - plan.b_min);
        const auto bd = estimate_bounds(factory.assemble(B), plan.kpm.rescale_margin,
                                        plan.kpm.rng_seed);
        bounds.e_min = std::min(bounds.e_min, bd.e_min);
        bounds.e_max = std::max(bounds.e_max, bd.e_max);
    }

    Spectrum spec;
    spec.b_values.resize(plan.b_points);
    for (int i = 0; i < plan.b_points; ++i) spec.b_values[i] = field_at(plan, i);
    spec.dos.assign(static_cast<std::size_t>(plan.b_points) * plan.kpm.energy_points,
                    0.0);
    {
        // Shared grid, identical to what reconstruct_dos produces for `bounds`.
        const double a = bounds.half_width() / (1.0 - plan.kpm.rescale_margin);
        const double b = bounds.center();
        spec.energies.resize(plan.kpm.energy_points);
        const double step = 2.0 * a / (plan.kpm.energy_points - 1);
        for (int j = 0; j < plan.kpm.energy_points; ++j)
            spec.energies[j] = (b - a) + j * step;
    }

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= plan.b_points || failed.load()) break;
            try {
                const double B = spec.b_values[i];
                KPMParams kp = plan.kpm;
                kp.rng_seed = seed_for_field(plan.kpm.rng_seed, B);
                const auto H = factory.assemble(B);
                const auto dos = reconstruct_dos(moments(H, bounds, kp), bounds, kp);
                std::copy(dos.density.begin(), dos.density.end(),
                          spec.dos.begin() +
                              static_cast<std::size_t>(i) * plan.kpm.energy_points);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(error_mutex);
                error_message = e.what();
                failed.store(true);
            }
        }
    };

    int workers = plan.workers > 0
                      ? plan.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, plan.b_points));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw NumericError("sweep failed: " + error_message);
    return spec;
}

inline constexpr double kDosSupportFloor = 1e-6; // fraction of the matrix maximum

/// Shifts the shared energy grid so the support of the spectrum (DOS above
/// 1e-6 of the maximum) is centered around zero. Already-centered spectra pass
/// through unchanged.
inline Spectrum center_energies(Spectrum spectrum) {
    if (spectrum.centered) return spectrum;
    const double floor = kDosSupportFloor * spectrum.max_dos();
    if (!(floor > 0.0)) throw NumericError("cannot center an all-zero spectrum");
    double e_lo = 0.0, e_hi = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < spectrum.energy_points(); ++j) {
        bool occupied = false;
        for (std::size_t i = 0; i < spectrum.b_points(); ++i)
            if (spectrum.row(i)[j] > floor) {
                occupied = true;
                break;
            }
        if (!occupied) continue;
        if (!any) e_lo = spectrum.energies[j];
        e_hi = spectrum.energies[j];
        any = true;
    }
    if (!any) throw NumericError("cannot center an all-zero spectrum");
    const double shift = -0.5 * (e_lo + e_hi);
    for (auto& e : spectrum.energies) e += shift;
    spectrum.centered = true;
    return spectrum;
}

struct PeriodCandidate {
    double period = 0.0;  // Tesla
    double strength = 0.0; // normalized autocorrelation at the peak
};

/// Measures spectral periodicities along the B axis with a normalized (Pearson)
/// autocorrelation of the mean-subtracted DOS rows. Local maxima above
/// strength 0.5 become candidates; harmonics of a detected period rank after
/// their fundamental, strongest family first.
inline std::vector<PeriodCandidate> measure_period(const Spectrum& spectrum) {
    const int nb = static_cast<int>(spectrum.b_points());
    const int ne = static_cast<int>(spectrum.energy_points());
    if (nb < 16) throw ConfigError("measure_period requires at least 16 field points");
    const double db = nb > 1 ? spectrum.b_values[1] - spectrum.b_values[0] : 0.0;
    for (int i = 2; i < nb; ++i) {
        const double step = spectrum.b_values[i] - spectrum.b_values[i - 1];
        if (std::abs(step - db) > 1e-9 * std::max(std::abs(db), 1.0))
            throw ConfigError("measure_period requires a uniform B grid");
    }

    // Mean-subtracted rows.
    std::vector<double> rows(spectrum.dos);
    for (int i = 0; i < nb; ++i) {
        double mean = 0.0;
        for (int j = 0; j < ne; ++j) mean += rows[i * ne + j];
        mean /= ne;
        for (int j = 0; j < ne; ++j) rows[i * ne + j] -= mean;
    }

    const int max_lag = nb / 2; // at least two periods must fit into the sweep
    std::vector<double> corr(max_lag + 1, 0.0);
    for (int lag = 1; lag <= max_lag; ++lag) {
        double num = 0.0, aa = 0.0, bb = 0.0;
        for (int i = 0; i + lag < nb; ++i) {
            const double* x = rows.data() + static_cast<std::size_t>(i) * ne;
            const double* y = rows.data() + static_cast<std::size_t>(i + lag) * ne;
            for (int j = 0; j < ne; ++j) {
                num += x[j] * y[j];
                aa += x[j] * x[j];
                bb += y[j] * y[j];
            }
        }
        const double denom = std::sqrt(aa * bb);
        corr[lag] = denom > 0.0 ? num / denom : 0.0;
    }

    struct Peak {
        int lag;
        double strength;
    };
    std::vector<Peak> peaks;
    for (int lag = 2; lag < max_lag; ++lag)
        if (corr[lag] > 0.5 && corr[lag] >= corr[lag - 1] && corr[lag] >= corr[lag + 1])
            peaks.push_back({lag, corr[lag]});
    if (peaks.empty())
        throw NumericError("no periodicity found: the sweep range may be shorter "
                           "than two periods");

    // Family ranking: a peak whose lag is an integer multiple of another peak's
    // lag inherits that fundamental; families are ordered by their strongest
    // member, and within a family the fundamental comes first.
    std::vector<int> family(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        family[i] = static_cast<int>(i);
        for (std::size_t j = 0; j < i; ++j) {
            const double ratio =
                static_cast<double>(peaks[i].lag) / peaks[family[j]].lag;
            const double k = std::round(ratio);
            if (k >= 2.0 && std::abs(ratio - k) * peaks[family[j]].lag <= 1.5) {
                family[i] = family[j];
                break;
            }
        }
    }
    std::vector<double> family_strength(peaks.size(), 0.0);
    for (std::size_t i = 0; i < peaks.size(); ++i)
        family_strength[family[i]] =
            std::max(family_strength[family[i]], peaks[i].strength);

    std::vector<std::size_t> order(peaks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (family[x] != family[y])
            return family_strength[family[x]] > family_strength[family[y]];
        return peaks[x].lag < peaks[y].lag;
    });

    std::vector<PeriodCandidate> out;
    for (std::size_t idx : order) {
        // Parabolic refinement of the peak position.
        const int lag = peaks[idx].lag;
        double refined = lag;
        const double ym = corr[lag - 1], y0 = corr[lag], yp = corr[lag + 1];
        const double denom = ym - 2.0 * y0 + yp;
        if (std::abs(denom) > 1e-15) {
            const double d = 0.5 * (ym - yp) / denom;
            if (std::abs(d) <= 1.0) refined = lag + d;
        }
        out.push_back({refined * db, peaks[idx].strength});
    }
    return out;
}

// --- serialization ---------------------------------------------------------

/// Long-format CSV: `B_tesla,E_ev,dos`.
inline void write_csv(const Spectrum& s, std::ostream& os) {
    os << "B_tesla,E_ev,dos\n";
    os.precision(17);
    for (std::size_t i = 0; i < s.b_points(); ++i)
        for (std::size_t j = 0; j < s.energy_points(); ++j)
            os << s.b_values[i] << ',' << s.energies[j] << ',' << s.row(i)[j] << '\n';
}

inline constexpr char kSpectrumMagic[8] = {'H', 'B', 'S', 'P', 'E', 'C', '1', '\0'};

/// Binary matrix file: magic "HBSPEC1\0", then little-endian u64 b_points,
/// u64 energy_points, f64 B grid, f64 energy grid, f64 row-major dos.
inline void write_binary(const Spectrum& s, std::ostream& os) {
    static_assert(std::endian::native == std::endian::little,
                  "binary spectrum files assume a little-endian host");
    os.write(kSpectrumMagic, sizeof(kSpectrumMagic));
    const std::uint64_t nb = s.b_points(), ne = s.energy_points();
    os.write(reinterpret_cast<const char*>(&nb), 8);
    os.write(reinterpret_cast<const char*>(&ne), 8);
    auto write_f64 = [&](const std::vector<double>& v) {
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    write_f64(s.b_values);
    write_f64(s.energies);
    write_f64(s.dos);
}

inline Spectrum read_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kSpectrumMagic, 8) != 0)
        throw ParseError("not a spectrum file (bad magic)");
    std::uint64_t nb = 0, ne = 0;
    is.read(reinterpret_cast<char*>(&nb), 8);
    is.read(reinterpret_cast<char*>(&ne), 8);
    Spectrum s;
    s.b_values.resize(nb);
    s.energies.resize(ne);
    s.dos.resize(nb * ne);
    auto read_f64 = [&](std::vector<double>& v) {
        is.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    read_f64(s.b_values);
    read_f64(s.energies);
    read_f64(s.dos);
    if (!is) throw ParseError("truncated spectrum file");
    return s;
}

/// 8-bit grayscale PGM heatmap: rows = energy descending, columns = B
/// ascending, intensity = log10(1 + dos/floor), normalized. This matches the
/// logarithmic rendering of butterfly spectra.
inline void write_pgm(const Spectrum& s, std::ostream& os) {
    const std::size_t w = s.b_points(), h = s.energy_points();
    os << "P5\n" << w << ' ' << h << "\n255\n";
    const double floor = kDosSupportFloor * std::max(s.max_dos(), 1e-300);
    double vmax = 0.0;
    for (double v : s.dos) vmax = std::max(vmax, std::log10(1.0 + v / floor));
    if (vmax <= 0.0) vmax = 1.0;
    std::vector<unsigned char> line(w);
    for (std::size_t j = 0; j < h; ++j) {
        const std::size_t je = h - 1 - j; // energy descending
        for (std::size_t i = 0; i < w; ++i) {
            const double v = std::log10(1.0 + s.row(i)[je] / floor) / vmax;
            line[i] = static_cast<unsigned char>(std::lround(255.0 * v));
        }
        os.write(reinterpret_cast<const char*>(line.data()),
                 static_cast<std::streamsize>(w));
    }
}

} // namespace hb
