#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bichrom/lattice_sim.hpp"
#include "bichrom/standing_front.hpp"
#include "test_oracles.hpp"

using namespace bichrom;

namespace {

LatticeState tiled_pattern(const Params& p, int N) {
    const auto pat = bichromatic_pattern(p);
    LatticeState s{0.0, std::vector<double>(N)};
    for (int j = 0; j < N; ++j) s.u[j] = j % 2 == 0 ? pat.first : pat.second;
    return s;
}

Ghosts pattern_ghosts(const Params& p, int N) {
    const auto pat = bichromatic_pattern(p);
    return {N % 2 == 0 ? pat.second : pat.first, N % 2 == 0 ? pat.first : pat.second};
}

double sup_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

}  // namespace

TEST_CASE("rhs vanishes on equilibria") {
    const Params p(0.45, 0.02);
    {
        LatticeState zero{0.0, std::vector<double>(128, 0.0)};
        for (const double f : rhs(zero, p, {0.0, 0.0})) CHECK(f == 0.0);
    }
    {
        const auto s = tiled_pattern(p, 128);
        for (const double f : rhs(s, p, pattern_ghosts(p, 128)))
            CHECK(std::abs(f) < 1e-10);
    }
    {
        // constant 1/2 at a = 1/2: g(1/2; 1/2) = 0 and the Laplacian vanishes
        const Params ph(0.5, 0.03);
        LatticeState s{0.0, std::vector<double>(128, 0.5)};
        for (const double f : rhs(s, ph, {0.5, 0.5})) CHECK(f == 0.0);
    }
}

TEST_CASE("integrate preserves equilibria and the sanity band") {
    const Params p(0.45, 0.02);
    const SimConfig cfg = make_config(p, 128, 100.0, 50);
    {
        auto traj = integrate(tiled_pattern(p, 128), p, cfg, pattern_ghosts(p, 128));
        CHECK(sup_diff(traj.front().u, traj.back().u) < 1e-9);
        CHECK(traj.back().t >= cfg.t_end - cfg.dt);
    }
    for (const double level : {0.0, p.a, 1.0}) {
        LatticeState s{0.0, std::vector<double>(128, level)};
        const auto traj = integrate(s, p, cfg, {level, level});
        CHECK(sup_diff(traj.front().u, traj.back().u) < 1e-9);
    }
    {
        // random IC in [0,1]^N stays within [-0.05, 1.05]
        auto rng = oracle::rng(41);
        std::uniform_real_distribution<double> uu(0.0, 1.0);
        LatticeState s{0.0, std::vector<double>(128)};
        for (auto& x : s.u) x = uu(rng);
        const auto traj = integrate(std::move(s), p, cfg, {0.0, 1.0});
        for (const auto& st : traj)
            for (const double x : st.u) {
                CHECK(x > -0.05);
                CHECK(x < 1.05);
            }
    }
}

TEST_CASE("RK4 step-halving changes the result below 1e-6") {
    const Params p(0.4, 0.03);
    LatticeState s{0.0, std::vector<double>(128)};
    for (int j = 0; j < 128; ++j) s.u[j] = 0.5 + 0.4 * std::sin(0.21 * j);
    SimConfig cfg = make_config(p, 128, 10.0, 1000000);
    const auto coarse = integrate(s, p, cfg, {0.5, 0.5});
    cfg.dt *= 0.5;
    const auto fine = integrate(s, p, cfg, {0.5, 0.5});
    CHECK(sup_diff(coarse.back().u, fine.back().u) < 1e-6);
}

TEST_CASE("integrate validates its configuration") {
    const Params p(0.4, 0.03);
    SimConfig cfg = make_config(p, 128, 1.0);
    cfg.dt = 1.0;  // above the stability bound
    LatticeState s{0.0, std::vector<double>(128, 0.0)};
    CHECK_THROWS_AS(integrate(s, p, cfg, {0.0, 0.0}), std::invalid_argument);
    SimConfig small = make_config(p, 64, 1.0);
    CHECK_THROWS_AS(integrate(LatticeState{0.0, std::vector<double>(64, 0.0)}, p, small, {0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("build_ic limits and center value") {
    const Params p(0.45, 0.02);
    const SimConfig cfg = make_config(p, 256, 1.0);
    const auto pat = bichromatic_pattern(p);
    const auto s = build_ic(IcKind::BichromaticFront, p, cfg, 128.0, 6.0);
    CHECK(std::abs(s.u[0]) < 1e-6);
    CHECK(std::abs(s.u[1]) < 1e-6);
    CHECK(s.u[254] == doctest::Approx(pat.first).epsilon(1e-6));
    CHECK(s.u[255] == doctest::Approx(pat.second).epsilon(1e-6));
    CHECK(s.u[128] == doctest::Approx(pat.first / 2.0).epsilon(1e-12));  // tanh(0) = 0

    const auto mono = build_ic(IcKind::MonochromaticFront, p, cfg, 128.0, 6.0);
    CHECK(mono.u[0] < 1e-6);
    CHECK(mono.u[255] > 1.0 - 1e-6);
    CHECK(mono.u[128] == doctest::Approx(0.5).epsilon(1e-12));

    // bichromatic kinds require branch B
    CHECK_THROWS_AS(build_ic(IcKind::BichromaticFront, Params(0.52, 0.0415), cfg, 128.0, 6.0),
                    OutOfDomain);
}

TEST_CASE("order preservation: componentwise-ordered ICs stay ordered") {
    const Params p(0.4, 0.04);
    const SimConfig cfg = make_config(p, 128, 50.0, 100);
    auto rng = oracle::rng(43);
    std::uniform_real_distribution<double> uu(0.0, 0.5), bump(0.0, 0.5);
    for (int k = 0; k < 5; ++k) {
        LatticeState lo{0.0, std::vector<double>(128)}, hi{0.0, std::vector<double>(128)};
        for (int j = 0; j < 128; ++j) {
            lo.u[j] = uu(rng);
            hi.u[j] = lo.u[j] + bump(rng);
        }
        const auto tl = integrate(lo, p, cfg, {0.0, 0.0});
        const auto th = integrate(hi, p, cfg, {0.0, 0.0});
        REQUIRE(tl.size() == th.size());
        for (std::size_t i = 0; i < tl.size(); ++i)
            for (int j = 0; j < 128; ++j) CHECK(tl[i].u[j] <= th[i].u[j] + 1e-9);
    }
}

TEST_CASE("estimate_speed on a stationary profile is pinned with c ~ 0") {
    const Params p(0.45, 0.02);
    const auto prof = find_standing_front(p, 256);
    REQUIRE(prof.has_value());
    const SimConfig cfg = make_config(p, 256, 300.0, 10);
    const auto pat = bichromatic_pattern(p);
    const auto traj =
        integrate(LatticeState{0.0, prof->u}, p, cfg, {0.0, 256 % 2 == 0 ? pat.first : pat.second});
    const auto est = estimate_speed(traj, p);
    CHECK(std::abs(est.c) < 1e-12);
    CHECK(est.classification == SpeedClass::Pinned);
    CHECK(std::abs(est.displacement) < 1e-9);
}

TEST_CASE("bichromatic front speeds: pinned at (0.45, 0.02), travelling near the cusp") {
    {
        const Params p(0.45, 0.02);
        const SimConfig cfg = make_config(p, 256, 600.0, 100);
        auto ic = build_ic(IcKind::BichromaticFront, p, cfg, 128.0, 8.0);
        const auto traj = integrate(std::move(ic), p, cfg, ghosts_for(IcKind::BichromaticFront, p, cfg));
        const auto est = estimate_speed(traj, p);
        CHECK(est.classification == SpeedClass::Pinned);
        CHECK(std::abs(est.c) < 1e-4);
    }
    {
        const Params p(0.5, 0.0415);
        const SimConfig cfg = make_config(p, 256, 600.0, 100);
        auto ic = build_ic(IcKind::BichromaticFront, p, cfg, 96.0, 8.0);
        const auto traj = integrate(std::move(ic), p, cfg, ghosts_for(IcKind::BichromaticFront, p, cfg));
        const auto est = estimate_speed(traj, p);
        CHECK(est.classification == SpeedClass::Travelling);
        CHECK(est.c > 1e-3);
        CHECK(est.r_squared > 0.99);
        // lower bichromatic fronts never travel left
        CHECK(est.c >= -1e-4);
    }
}

TEST_CASE("speed monotonicity in a at fixed d = 0.034") {
    // both points lie inside Omega_bc here; the larger a travels, the smaller pins
    const SimConfig cfg = make_config(Params(0.5, 0.034), 384, 1200.0, 100);
    auto run = [&](double a) {
        const Params p(a, 0.034);
        auto ic = build_ic(IcKind::BichromaticFront, p, cfg, 192.0, 8.0);
        const auto traj = integrate(std::move(ic), p, cfg, ghosts_for(IcKind::BichromaticFront, p, cfg));
        return estimate_speed(traj, p);
    };
    const auto lo = run(0.50);
    const auto hi = run(0.52);
    CHECK(hi.c > lo.c);
    CHECK(hi.c - lo.c > 3.0 * lo.slope_stderr);
    CHECK(hi.c - lo.c > 3.0 * hi.slope_stderr);
}

TEST_CASE("upper/lower speed symmetry at (0.48, 0.034)") {
    const Params up_params(0.48, 0.034);
    const SimConfig cfg = make_config(up_params, 384, 1200.0, 100);
    const auto up = estimate_upper_speed(up_params, cfg, 192.0, 8.0);
    const Params low_params(0.52, 0.034);
    auto ic = build_ic(IcKind::BichromaticFront, low_params, cfg, 192.0, 8.0);
    const auto traj =
        integrate(std::move(ic), low_params, cfg, ghosts_for(IcKind::BichromaticFront, low_params, cfg));
    const auto low = estimate_speed(traj, low_params);
    CHECK(up.c < 0.0);
    CHECK(std::abs(up.c - (-low.c)) <= 0.02 * std::abs(low.c));
}

TEST_CASE("monochromatic front at (0.3, 0.1): pinned or invading from the right") {
    const Params p(0.3, 0.1);
    const SimConfig cfg = make_config(p, 256, 400.0, 50);
    auto ic = build_ic(IcKind::MonochromaticFront, p, cfg, 128.0, 6.0);
    const auto traj = integrate(std::move(ic), p, cfg, ghosts_for(IcKind::MonochromaticFront, p, cfg));
    const auto est = estimate_speed(traj, p, 0.5);
    // for a < 1/2 the state 1 is preferred: the interface pins or moves left
    CHECK(est.c <= 1e-4);
}

TEST_CASE("pattern zone detector") {
    // monotone data has no 2-periodic zone
    LatticeState mono{0.0, std::vector<double>(128)};
    for (int j = 0; j < 128; ++j) mono.u[j] = j / 127.0;
    CHECK(pattern_zone_width(mono) == 0);
    // a tiled pattern block is detected
    const Params p(0.45, 0.02);
    const auto pat = bichromatic_pattern(p);
    LatticeState mixed{0.0, std::vector<double>(128, 0.0)};
    for (int j = 40; j < 80; ++j) mixed.u[j] = j % 2 == 0 ? pat.first : pat.second;
    const int width = pattern_zone_width(mixed);
    CHECK(width > 30);
    CHECK(width <= 40);
}

TEST_CASE("collision with both sides pinned keeps the buffer width") {
    const Params p(0.45, 0.02);  // (0.55, 0.02) is pinned too, by symmetry
    const SimConfig cfg = make_config(p, 256, 400.0, 50);
    const auto rep = run_collision(p, cfg, 48.0, 4.0, /*override_criteria=*/true);
    const int w0 = rep.buffer_widths[rep.buffer_widths.size() / 10 + 1];
    for (std::size_t i = rep.buffer_widths.size() / 10 + 1; i < rep.buffer_widths.size(); ++i)
        CHECK(std::abs(rep.buffer_widths[i] - w0) <= 2);
    CHECK_FALSE(rep.monochromatic_outcome);
}

TEST_CASE("run_collision precondition") {
    const Params p(0.45, 0.02);  // pinned on both sides: not provably travelling
    const SimConfig cfg = make_config(p, 256, 10.0, 50);
    CHECK_THROWS_AS(run_collision(p, cfg, 48.0, 4.0), OutOfDomain);
}
