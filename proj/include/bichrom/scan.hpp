#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bichrom/format.hpp"
#include "bichrom/lattice_sim.hpp"
#include "bichrom/params.hpp"
#include "bichrom/wave_criteria.hpp"

namespace bichrom {

enum class SimulatePolicy { Never, OnUndetermined, Always };

struct CellRecord {
    std::optional<int> root_count;
    Verdict criterion = Verdict::OutsideDomain;
    std::optional<double> gamma;
    std::optional<double> sim_speed;
    std::optional<SpeedClass> sim_class;
};

/// Rectangular (a, d) grid of classification labels and measured speeds,
/// stored row-major a-then-d.
struct RegionGrid {
    std::vector<double> a_axis;
    std::vector<double> d_axis;
    std::vector<CellRecord> cells;

    CellRecord& at(std::size_t ia, std::size_t id) { return cells[ia * d_axis.size() + id]; }
    const CellRecord& at(std::size_t ia, std::size_t id) const {
        return cells[ia * d_axis.size() + id];
    }
};

struct ScanOptions {
    SimulatePolicy simulate = SimulatePolicy::Never;
    bool with_gamma = false;
    int sim_budget = -1;  // < 0 means no cap
    std::uint64_t seed = 1234567;
    unsigned threads = 0;  // 0 picks hardware_concurrency
    int sim_N = 512;
    double sim_t_end = 2000.0;
};

namespace detail {

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, n == 0 ? 1 : unsigned(n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return out;
}

}  // namespace detail

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::ProvenPinned: return "ProvenPinned";
        case Verdict::ProvenTravelling: return "ProvenTravelling";
        case Verdict::Undetermined: return "Undetermined";
        case Verdict::OutsideDomain: return "OutsideDomain";
    }
    return "?";
}

inline const char* to_string(SpeedClass c) {
    switch (c) {
        case SpeedClass::Travelling: return "Travelling";
        case SpeedClass::Pinned: return "Pinned";
        case SpeedClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

inline Verdict verdict_from_string(std::string_view s) {
    if (s == "ProvenPinned") return Verdict::ProvenPinned;
    if (s == "ProvenTravelling") return Verdict::ProvenTravelling;
    if (s == "Undetermined") return Verdict::Undetermined;
    if (s == "OutsideDomain") return Verdict::OutsideDomain;
    throw std::invalid_argument("unknown criterion token '" + std::string(s) + "'");
}

inline SpeedClass speed_class_from_string(std::string_view s) {
    if (s == "Travelling") return SpeedClass::Travelling;
    if (s == "Pinned") return SpeedClass::Pinned;
    if (s == "Inconclusive") return SpeedClass::Inconclusive;
    throw std::invalid_argument("unknown sim_class token '" + std::string(s) + "'");
}

/// Parameter-region scan: every cell gets a root count and a criterion
/// verdict; cells are simulated according to the policy (OnUndetermined
/// simulates only abstaining cells inside Omega_-, optionally capped by a
/// seeded random budget). Deterministic for a fixed configuration: cells are
/// independent work items collected by grid index, not completion order.
/// A criterion/simulation contradiction aborts the scan.
inline RegionGrid scan(double a_min, double a_max, double d_min, double d_max, int resolution,
                       const ScanOptions& opt = {}) {
    if (!(a_min > 0.0 && a_max < 1.0 && a_min <= a_max))
        throw std::invalid_argument("scan: a-range must lie within (0,1)");
    if (!(d_min > 0.0 && d_max <= 0.07 && d_min <= d_max))
        throw std::invalid_argument("scan: d-range must lie within (0, 0.07]");
    if (!(resolution >= 1 && resolution <= 512))
        throw std::invalid_argument("scan: resolution must be in 1..512");
    if (resolution > 1 && !(a_min < a_max && d_min < d_max))
        throw std::invalid_argument("scan: axes must be strictly increasing");

    RegionGrid grid;
    grid.a_axis = detail::linspace(a_min, a_max, resolution);
    grid.d_axis = detail::linspace(d_min, d_max, resolution);
    grid.cells.assign(std::size_t(resolution) * resolution, {});

    std::vector<double> gamma_by_a(resolution, 0.0);
    if (opt.with_gamma)
        detail::parallel_for(resolution, opt.threads,
                             [&](std::size_t ia) { gamma_by_a[ia] = gamma_fn(grid.a_axis[ia]); });

    detail::parallel_for(grid.cells.size(), opt.threads, [&](std::size_t idx) {
        const std::size_t ia = idx / grid.d_axis.size();
        const std::size_t id = idx % grid.d_axis.size();
        const Params p(grid.a_axis[ia], grid.d_axis[id]);
        CellRecord& cell = grid.cells[idx];
        try {
            const auto roots = solve_equilibria(p);
            cell.root_count = int(roots.size());
            cell.criterion = detail::classify_given_roots(p, roots, false).verdict;
        } catch (const std::exception&) {
            cell.criterion = Verdict::OutsideDomain;
        }
        if (opt.with_gamma) cell.gamma = gamma_by_a[ia];
    });

    if (opt.simulate != SimulatePolicy::Never) {
        std::vector<std::size_t> candidates;
        for (std::size_t idx = 0; idx < grid.cells.size(); ++idx) {
            const Verdict v = grid.cells[idx].criterion;
            const bool in_region = v != Verdict::OutsideDomain;
            if (!in_region) continue;
            if (opt.simulate == SimulatePolicy::Always || v == Verdict::Undetermined)
                candidates.push_back(idx);
        }
        if (opt.sim_budget >= 0 && candidates.size() > std::size_t(opt.sim_budget)) {
            std::mt19937_64 rng(opt.seed);
            std::shuffle(candidates.begin(), candidates.end(), rng);
            candidates.resize(opt.sim_budget);
            std::sort(candidates.begin(), candidates.end());
        }
        detail::parallel_for(candidates.size(), opt.threads, [&](std::size_t k) {
            const std::size_t idx = candidates[k];
            const std::size_t ia = idx / grid.d_axis.size();
            const std::size_t id = idx % grid.d_axis.size();
            const Params p(grid.a_axis[ia], grid.d_axis[id]);
            CellRecord& cell = grid.cells[idx];
            try {
                const SimConfig cfg = make_config(p, opt.sim_N, opt.sim_t_end);
                auto ic = build_ic(IcKind::BichromaticFront, p, cfg, cfg.N / 2.0, 8.0);
                const auto traj =
                    integrate(std::move(ic), p, cfg, ghosts_for(IcKind::BichromaticFront, p, cfg));
                const auto est = estimate_speed(traj, p);
                cell.sim_speed = est.c;
                cell.sim_class = est.classification;
            } catch (const OutOfDomain&) {
                // no bichromatic pattern to simulate; leave the cell unsimulated
            } catch (const NoInterface&) {
                cell.sim_class = SpeedClass::Inconclusive;
            }
        });
    }

    for (std::size_t idx = 0; idx < grid.cells.size(); ++idx) {
        const CellRecord& cell = grid.cells[idx];
        if (!cell.sim_class) continue;
        const bool clash =
            (cell.criterion == Verdict::ProvenPinned && *cell.sim_class == SpeedClass::Travelling) ||
            (cell.criterion == Verdict::ProvenTravelling && *cell.sim_class == SpeedClass::Pinned);
        if (clash) {
            const std::size_t ia = idx / grid.d_axis.size();
            const std::size_t id = idx % grid.d_axis.size();
            std::ostringstream msg;
            msg << "scan: criterion/simulation contradiction at a=" << format_double(grid.a_axis[ia])
                << " d=" << format_double(grid.d_axis[id]) << " criterion=" << to_string(cell.criterion)
                << " sim=" << to_string(*cell.sim_class)
                << " c=" << (cell.sim_speed ? format_double(*cell.sim_speed) : "-");
            throw std::runtime_error(msg.str());
        }
    }
    return grid;
}

/// CSV schema, one row per cell (row-major a-then-d):
/// a,d,root_count,criterion,gamma,sim_speed,sim_class with empty fields for
/// absent values and shortest round-trip decimals for floats.
inline void write_csv(const RegionGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + path.string() + "'");
    out << "a,d,root_count,criterion,gamma,sim_speed,sim_class\n";
    for (std::size_t ia = 0; ia < grid.a_axis.size(); ++ia) {
        for (std::size_t id = 0; id < grid.d_axis.size(); ++id) {
            const CellRecord& c = grid.at(ia, id);
            out << format_double(grid.a_axis[ia]) << ',' << format_double(grid.d_axis[id]) << ',';
            if (c.root_count) out << *c.root_count;
            out << ',' << to_string(c.criterion) << ',';
            if (c.gamma) out << format_double(*c.gamma);
            out << ',';
            if (c.sim_speed) out << format_double(*c.sim_speed);
            out << ',';
            if (c.sim_class) out << to_string(*c.sim_class);
            out << '\n';
        }
    }
    out.flush();
    if (!out) throw std::runtime_error("write_csv: I/O failure writing '" + path.string() + "'");
}

inline RegionGrid read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "a,d,root_count,criterion,gamma,sim_speed,sim_class")
        throw std::runtime_error("read_csv: bad header in '" + path.string() + "'");
    RegionGrid grid;
    std::vector<CellRecord> cells;
    std::vector<double> a_of_row, d_of_row;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ',') {
                f.emplace_back(line.substr(start, i - start));
                start = i + 1;
            }
        if (f.size() != 7) throw std::runtime_error("read_csv: bad row '" + line + "'");
        a_of_row.push_back(parse_double(f[0]));
        d_of_row.push_back(parse_double(f[1]));
        CellRecord c;
        if (!f[2].empty()) c.root_count = std::stoi(f[2]);
        c.criterion = verdict_from_string(f[3]);
        if (!f[4].empty()) c.gamma = parse_double(f[4]);
        if (!f[5].empty()) c.sim_speed = parse_double(f[5]);
        if (!f[6].empty()) c.sim_class = speed_class_from_string(f[6]);
        cells.push_back(c);
    }
    // reconstruct the axes from the row-major layout
    for (const double d : d_of_row) {
        if (!grid.d_axis.empty() && d == grid.d_axis.front()) break;
        grid.d_axis.push_back(d);
    }
    const std::size_t nd = grid.d_axis.empty() ? 1 : grid.d_axis.size();
    for (std::size_t i = 0; i < a_of_row.size(); i += nd) grid.a_axis.push_back(a_of_row[i]);
    if (grid.a_axis.size() * nd != cells.size())
        throw std::runtime_error("read_csv: grid is not rectangular");
    grid.cells = std::move(cells);
    return grid;
}

}  // namespace bichrom
