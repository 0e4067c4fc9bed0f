#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bichrom/cubic.hpp"
#include "bichrom/equilibria.hpp"
#include "bichrom/numerics.hpp"
#include "bichrom/params.hpp"
#include "bichrom/wave_criteria.hpp"

namespace bichrom {

enum class BoundaryKind { ClampedToLimits };

/// Fixed-step explicit integration setup. Boundaries are clamped to the
/// limiting patterns through ghost values.
struct SimConfig {
    int N = 512;
    double dt = 0.1;
    double t_end = 2000.0;
    BoundaryKind boundary = BoundaryKind::ClampedToLimits;
    int record_stride = 100;
};

/// Explicit-stability step bound; the problem is non-stiff at d <= 1/16.
inline double stable_dt(double d) { return std::min(0.1, 0.2 / (4.0 * d + 1.0)); }

inline SimConfig make_config(const Params& p, int N = 512, double t_end = 2000.0,
                             int record_stride = 100) {
    SimConfig c;
    c.N = N;
    c.dt = stable_dt(p.d);
    c.t_end = t_end;
    c.record_stride = record_stride;
    return c;
}

struct LatticeState {
    double t = 0.0;
    std::vector<double> u;
};

/// Ghost values clamped to the limiting patterns at both ends.
struct Ghosts {
    double left = 0.0;
    double right = 0.0;
};

inline void rhs_into(const std::vector<double>& u, const Params& p, const Ghosts& g,
                     std::vector<double>& out) {
    const int N = int(u.size());
    out.resize(N);
    for (int j = 0; j < N; ++j) {
        const double um = j == 0 ? g.left : u[j - 1];
        const double up = j == N - 1 ? g.right : u[j + 1];
        out[j] = p.d * (um - 2.0 * u[j] + up) + eval_g(u[j], p.a);
    }
}

/// Right-hand side of the lattice equation with clamped ghost values.
inline std::vector<double> rhs(const LatticeState& s, const Params& p, const Ghosts& g) {
    std::vector<double> out;
    rhs_into(s.u, p, g, out);
    return out;
}

/// Classical fixed-step RK4 integration, recording every record_stride steps
/// plus the final state. Throws BlowUp when any |u_j| exceeds 2.
inline std::vector<LatticeState> integrate(LatticeState state, const Params& p,
                                           const SimConfig& cfg, const Ghosts& ghosts) {
    if (cfg.N < 128 || cfg.N % 2 != 0)
        throw std::invalid_argument("integrate: config requires even N >= 128");
    if (!(cfg.dt > 0.0 && cfg.dt <= stable_dt(p.d) + 1e-12))
        throw std::invalid_argument("integrate: dt exceeds the stability bound 0.2/(4d+1)");
    if (int(state.u.size()) != cfg.N)
        throw std::invalid_argument("integrate: state size does not match config");
    const long nsteps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    const double t0 = state.t;
    std::vector<LatticeState> traj;
    traj.reserve(std::size_t(nsteps / std::max(1, cfg.record_stride)) + 2);
    traj.push_back(state);

    const int N = cfg.N;
    std::vector<double> k1, k2, k3, k4, tmp(N);
    const auto check = [&](const std::vector<double>& u) {
        for (const double x : u)
            if (!(std::abs(x) <= 2.0)) throw BlowUp("integrate: |u_j| > 2, reduce dt");
    };
    for (long step = 1; step <= nsteps; ++step) {
        const double h = cfg.dt;
        rhs_into(state.u, p, ghosts, k1);
        for (int j = 0; j < N; ++j) tmp[j] = state.u[j] + 0.5 * h * k1[j];
        rhs_into(tmp, p, ghosts, k2);
        for (int j = 0; j < N; ++j) tmp[j] = state.u[j] + 0.5 * h * k2[j];
        rhs_into(tmp, p, ghosts, k3);
        for (int j = 0; j < N; ++j) tmp[j] = state.u[j] + h * k3[j];
        rhs_into(tmp, p, ghosts, k4);
        for (int j = 0; j < N; ++j)
            state.u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        state.t = t0 + double(step) * h;
        if (step % std::max(1, cfg.record_stride) == 0 || step == nsteps) {
            check(state.u);
            if (traj.back().t != state.t) traj.push_back(state);
        }
    }
    return traj;
}

enum class IcKind { BichromaticFront, MonochromaticFront, Plateau };

namespace detail {

inline double tanh_ramp(double x, double width) { return 0.5 * (1.0 + std::tanh(x / width)); }

/// 0 -> pattern -> 1 arrangement with interfaces at c1 < c2.
inline LatticeState plateau_ic(const Params& p, int N, double c1, double c2, double width) {
    const auto pat = bichromatic_pattern(p);
    LatticeState s{0.0, std::vector<double>(N)};
    for (int j = 0; j < N; ++j) {
        const double pj = j % 2 == 0 ? pat.first : pat.second;
        const double s1 = tanh_ramp(j - c1, width);
        const double s2 = tanh_ramp(j - c2, width);
        s.u[j] = (1.0 - s2) * s1 * pj + s2;
    }
    return s;
}

}  // namespace detail

/// Canned initial conditions. BichromaticFront: the
/// 2-periodic pattern multiplied by a hyperbolic tangent ramp.
/// MonochromaticFront: the scalar 0 -> 1 ramp. Plateau: the colliding-front
/// arrangement 0 -> pattern -> 1 (interfaces at center -+ N/6... center).
inline LatticeState build_ic(IcKind kind, const Params& p, const SimConfig& cfg, double center,
                             double width) {
    if (!(width > 0.0)) throw std::invalid_argument("build_ic: width must be positive");
    switch (kind) {
        case IcKind::BichromaticFront: {
            const auto pat = bichromatic_pattern(p);
            LatticeState s{0.0, std::vector<double>(cfg.N)};
            for (int j = 0; j < cfg.N; ++j) {
                const double pj = j % 2 == 0 ? pat.first : pat.second;
                s.u[j] = pj * detail::tanh_ramp(j - center, width);
            }
            return s;
        }
        case IcKind::MonochromaticFront: {
            LatticeState s{0.0, std::vector<double>(cfg.N)};
            for (int j = 0; j < cfg.N; ++j) s.u[j] = detail::tanh_ramp(j - center, width);
            return s;
        }
        case IcKind::Plateau:
            return detail::plateau_ic(p, cfg.N, center - cfg.N / 6.0, center, width);
    }
    throw std::invalid_argument("build_ic: unknown kind");
}

/// Ghost values matching the limiting patterns of each initial condition.
inline Ghosts ghosts_for(IcKind kind, const Params& p, const SimConfig& cfg) {
    switch (kind) {
        case IcKind::BichromaticFront: {
            const auto pat = bichromatic_pattern(p);
            return {0.0, cfg.N % 2 == 0 ? pat.first : pat.second};
        }
        case IcKind::MonochromaticFront:
        case IcKind::Plateau:
            return {0.0, 1.0};
    }
    throw std::invalid_argument("ghosts_for: unknown kind");
}

enum class SpeedClass { Travelling, Pinned, Inconclusive };

struct SpeedEstimate {
    double c = 0.0;
    double r_squared = 0.0;
    double displacement = 0.0;
    double slope_stderr = 0.0;
    SpeedClass classification = SpeedClass::Inconclusive;
};

/// Interface position: linear interpolation of the first upward crossing of
/// the threshold on the even sublattice.
inline double interface_position(const LatticeState& s, double threshold) {
    const int N = int(s.u.size());
    for (int j = 0; j + 2 < N; j += 2) {
        if (s.u[j] < threshold && s.u[j + 2] >= threshold)
            return j + 2.0 * (threshold - s.u[j]) / (s.u[j + 2] - s.u[j]);
    }
    throw NoInterface("interface_position: no upward crossing on the even sublattice");
}

/// Least-squares front speed after discarding the first quarter of the
/// trajectory as transient. Pinned: |c| < 1e-4 and total displacement under
/// one site. Travelling: |c| > 1e-3 with r^2 > 0.99.
inline SpeedEstimate estimate_speed(const std::vector<LatticeState>& traj, const Params& p,
                                    std::optional<double> threshold = {}) {
    const double thr = threshold ? *threshold : 0.5 * bichromatic_pattern(p).first;
    const std::size_t skip = traj.size() / 4;
    if (traj.size() < skip + 20)
        throw std::invalid_argument("estimate_speed: need >= 20 samples after the transient");
    std::vector<double> t, pos;
    t.reserve(traj.size() - skip);
    pos.reserve(traj.size() - skip);
    for (std::size_t i = skip; i < traj.size(); ++i) {
        t.push_back(traj[i].t);
        pos.push_back(interface_position(traj[i], thr));
    }
    const auto fit = num::fit_line(t, pos);
    SpeedEstimate est;
    est.c = fit.slope;
    est.r_squared = fit.r_squared;
    est.slope_stderr = fit.slope_stderr;
    est.displacement = pos.back() - pos.front();
    if (std::abs(est.c) < 1e-4 && std::abs(est.displacement) < 1.0)
        est.classification = SpeedClass::Pinned;
    else if (std::abs(est.c) > 1e-3 && est.r_squared > 0.99)
        est.classification = SpeedClass::Travelling;
    else
        est.classification = SpeedClass::Inconclusive;
    return est;
}

/// Speed of the upper front (pattern -> 1): run the upper-front initial
/// condition, then map states through u_j -> 1 - u_{N-1-j}, which turns the
/// trajectory into a lower-front run at (1 - a, d); negate the fitted speed.
inline SpeedEstimate estimate_upper_speed(const Params& p, const SimConfig& cfg, double center,
                                          double width) {
    const auto pat = bichromatic_pattern(p);
    LatticeState s{0.0, std::vector<double>(cfg.N)};
    for (int j = 0; j < cfg.N; ++j) {
        const double pj = j % 2 == 0 ? pat.first : pat.second;
        s.u[j] = pj + (1.0 - pj) * detail::tanh_ramp(j - center, width);
    }
    auto traj = integrate(std::move(s), p, cfg, {pat.second, 1.0});
    for (auto& st : traj) {
        std::vector<double> y(st.u.size());
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = 1.0 - st.u[y.size() - 1 - j];
        st.u = std::move(y);
    }
    SpeedEstimate est = estimate_speed(traj, Params(1.0 - p.a, p.d));
    est.c = -est.c;
    est.displacement = -est.displacement;
    return est;
}

struct CollisionReport {
    std::vector<double> times;
    std::vector<int> buffer_widths;
    double final_residual = 0.0;
    bool monochromatic_outcome = false;
    LatticeState final_state;
};

/// Longest run of sites showing the 2-periodic signature:
/// |u_{j+2} - u_j| < 1e-3 while |u_{j+1} - u_j| > 0.1.
inline int pattern_zone_width(const LatticeState& s) {
    const int N = int(s.u.size());
    int best = 0, run = 0;
    for (int j = 0; j + 2 < N; ++j) {
        const bool periodic2 =
            std::abs(s.u[j + 2] - s.u[j]) < 1e-3 && std::abs(s.u[j + 1] - s.u[j]) > 0.1;
        run = periodic2 ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

/// Sup-norm distance to the nearest non-decreasing profile.
inline double monotone_defect(const std::vector<double>& u) {
    double runmax = -1e300, defect = 0.0;
    for (const double x : u) {
        runmax = std::max(runmax, x);
        defect = std::max(defect, runmax - x);
    }
    return defect;
}

/// Colliding-fronts experiment: a 0 / pattern / 1 plateau whose two
/// bichromatic interfaces move toward each other; reports the width of the
/// periodic buffer per sample and whether the final state is a monochromatic
/// 0 -> 1 front. Requires ProvenTravelling at (a, d) and (1-a, d) unless the
/// caller overrides.
inline CollisionReport run_collision(const Params& p, const SimConfig& cfg,
                                     double buffer_sites = 48.0, double width = 4.0,
                                     bool override_criteria = false) {
    if (!override_criteria) {
        if (classify(p).verdict != Verdict::ProvenTravelling ||
            classify(Params(1.0 - p.a, p.d)).verdict != Verdict::ProvenTravelling)
            throw OutOfDomain("run_collision: travelling not proven on both sides (override to force)");
    }
    const double mid = cfg.N / 2.0;
    LatticeState ic =
        detail::plateau_ic(p, cfg.N, mid - buffer_sites / 2.0, mid + buffer_sites / 2.0, width);
    const auto traj = integrate(std::move(ic), p, cfg, {0.0, 1.0});
    CollisionReport rep;
    for (const auto& s : traj) {
        rep.times.push_back(s.t);
        rep.buffer_widths.push_back(pattern_zone_width(s));
    }
    rep.final_state = traj.back();
    std::vector<double> F;
    rhs_into(rep.final_state.u, p, {0.0, 1.0}, F);
    for (const double f : F) rep.final_residual = std::max(rep.final_residual, std::abs(f));
    const auto& u = rep.final_state.u;
    rep.monochromatic_outcome =
        monotone_defect(u) <= 1e-4 && u.front() <= 2e-4 && u.back() >= 1.0 - 2e-4;
    return rep;
}

}  // namespace bichrom
