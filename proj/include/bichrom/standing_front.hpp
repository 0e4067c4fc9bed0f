#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bichrom/cubic.hpp"
#include "bichrom/equilibria.hpp"
#include "bichrom/params.hpp"
#include "bichrom/wave_criteria.hpp"

namespace bichrom {

/// Orbit of the planar two-reflection recurrence: pairs (u_i, v_i) extracted
/// from a standing profile at even/odd sites.
struct PlanarOrbit {
    std::vector<std::pair<double, double>> points;
    Params params;
};

/// A solution of the truncated stationary lattice system with clamped ends.
struct StandingProfile {
    std::vector<double> u;
    Params params;
    double residual_norm;
};

/// One step of the recurrence: u_{i+1} = 2 m(v_i) - u_i first, then
/// v_{i+1} = 2 m(u_{i+1}) - v_i.
inline std::pair<double, double> reflection_step(std::pair<double, double> pt, const Params& p) {
    const double u_next = 2.0 * m_map(pt.second, p) - pt.first;
    const double v_next = 2.0 * m_map(u_next, p) - pt.second;
    return {u_next, v_next};
}

/// Algebraic inverse of reflection_step (v first, then u, signs reversed).
inline std::pair<double, double> reflection_step_inverse(std::pair<double, double> pt, const Params& p) {
    const double v_prev = 2.0 * m_map(pt.first, p) - pt.second;
    const double u_prev = 2.0 * m_map(v_prev, p) - pt.first;
    return {u_prev, v_prev};
}

namespace detail {

/// Residual of the stationary lattice equation with Dirichlet ghost values.
inline void stationary_residual(const std::vector<double>& u, const Params& p, double left,
                                double right, std::vector<double>& F) {
    const int N = int(u.size());
    F.resize(N);
    for (int j = 0; j < N; ++j) {
        const double um = j == 0 ? left : u[j - 1];
        const double up = j == N - 1 ? right : u[j + 1];
        F[j] = p.d * (um - 2.0 * u[j] + up) + eval_g(u[j], p.a);
    }
}

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Thomas solve for a tridiagonal system with constant off-diagonals;
/// diag and rhs are overwritten. Returns false on a vanishing pivot.
inline bool thomas_solve(std::vector<double>& diag, double off, std::vector<double>& rhs) {
    const int n = int(diag.size());
    for (int i = 1; i < n; ++i) {
        if (std::abs(diag[i - 1]) < 1e-300) return false;
        const double w = off / diag[i - 1];
        diag[i] -= w * off;
        rhs[i] -= w * rhs[i - 1];
    }
    if (std::abs(diag[n - 1]) < 1e-300) return false;
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
    return true;
}

/// Damped Newton on the stationary system. Empty result when the iteration
/// stalls (ten halvings without residual decrease) or the budget runs out.
inline std::optional<StandingProfile> newton_standing(std::vector<double> u, const Params& p,
                                                      double left, double right) {
    std::vector<double> F, Ft, diag, step, trial;
    stationary_residual(u, p, left, right, F);
    double res = sup_norm(F);
    const int N = int(u.size());
    for (int it = 0; it < 100 && res >= 1e-12; ++it) {
        diag.resize(N);
        for (int j = 0; j < N; ++j) diag[j] = eval_g(u[j], p.a, 1) - 2.0 * p.d;
        step = F;
        for (auto& s : step) s = -s;
        if (!thomas_solve(diag, p.d, step)) return std::nullopt;
        double lambda = 1.0;
        bool accepted = false;
        for (int t = 0; t < 10; ++t) {
            trial = u;
            for (int j = 0; j < N; ++j) trial[j] += lambda * step[j];
            stationary_residual(trial, p, left, right, Ft);
            const double tres = sup_norm(Ft);
            if (tres < res) {
                u.swap(trial);
                F.swap(Ft);
                res = tres;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    if (!(res < 1e-10)) return std::nullopt;
    return StandingProfile{std::move(u), p, res};
}

}  // namespace detail

/// Newton solve of the N-site stationary system, clamped to 0 on the left
/// and to the 2-periodic pattern (u_B, v_B) on the right, seeded with a step
/// profile at N/2 (+ seed_shift). An empty result is evidence (not proof)
/// that no standing front exists near this seed.
inline std::optional<StandingProfile> find_standing_front(const Params& p, int N,
                                                          int seed_shift = 0) {
    if (N < 64 || N % 2 != 0)
        throw std::invalid_argument("find_standing_front: N must be even and >= 64");
    if (classify(p).verdict == Verdict::OutsideDomain)
        throw OutOfDomain("find_standing_front: (a,d) outside the nine-root region");
    const auto [uB, vB] = branch_point(BranchLabel::B, p);
    const auto pattern = [&](int j) { return j % 2 == 0 ? uB : vB; };
    std::vector<double> seed(N);
    const int jump = N / 2 + seed_shift;
    for (int j = 0; j < N; ++j) seed[j] = j < jump ? 0.0 : pattern(j);
    return detail::newton_standing(std::move(seed), p, 0.0, pattern(N));
}

/// Extract the planar pairs (u_i, v_i) = (profile_{2i}, profile_{2i+1}).
inline PlanarOrbit orbit_from_profile(const StandingProfile& prof) {
    if (!(prof.residual_norm < 1e-8))
        throw std::invalid_argument("orbit_from_profile: profile residual too large");
    PlanarOrbit orbit{{}, prof.params};
    const int N = int(prof.u.size());
    orbit.points.reserve(N / 2);
    for (int i = 0; 2 * i + 1 < N; ++i) orbit.points.emplace_back(prof.u[2 * i], prof.u[2 * i + 1]);
    return orbit;
}

}  // namespace bichrom
