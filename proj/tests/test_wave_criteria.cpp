#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bichrom/wave_criteria.hpp"
#include "test_oracles.hpp"

using namespace bichrom;

namespace {
const Params kCusp(0.5, 1.0 / 24.0);
}

TEST_CASE("v_bot_top: defining equation, ordering, d -> 0 limits") {
    {
        const Params p(0.45, 1e-4);
        const auto [vb, vt] = v_bot_top(p);
        CHECK(vb < 0.02);                                  // v_bot -> 0
        CHECK(vt == doctest::Approx(0.45).epsilon(2e-2));  // v_top -> a
        const double uB = branch_point(BranchLabel::B, p).first;
        CHECK(std::abs(m_map(vb, p) - uB) < 1e-11);
        CHECK(std::abs(m_map(vt, p) - uB) < 1e-11);
    }
    {
        const auto [vb, vt] = v_bot_top(kCusp);
        const double uB = branch_point(BranchLabel::B, kCusp).first;
        CHECK(uB == doctest::Approx(0.5 - std::sqrt(3.0) / 6.0).epsilon(1e-10));
        CHECK(std::abs(m_map(vb, kCusp) - uB) < 1e-11);
        const auto [gm, gp] = gamma_crit(kCusp);
        CHECK(vb < gm);
        CHECK(gm < vt);
        CHECK(vt < gp);
    }
    CHECK_THROWS_AS(v_bot_top(Params(0.5, 0.05)), OutOfDomain);
}

TEST_CASE("u_top closed form at the cusp and the direct formula elsewhere") {
    const double expect = 0.5 - 4.0 / 9.0 * std::sqrt(2.0) + std::sqrt(3.0) / 6.0;
    CHECK(u_top(kCusp) == doctest::Approx(expect).epsilon(1e-10));

    // direct formula comparison: u_top = 2 m(gamma+) - u_B
    const Params p(0.45, 1e-4);
    const auto [gm, gp] = gamma_crit(p);
    const double uB = branch_point(BranchLabel::B, p).first;
    CHECK(u_top(p) == doctest::Approx(2.0 * m_map(gp, p) - uB).epsilon(1e-14));

    // near a = 1: u_top(a, d_-(a)) = (1-a)^2/4 + O((1-a)^3)
    const double a = 0.95;
    const double ut = u_top(Params(a, d_minus(a)));
    const double lead = 0.25 * (1.0 - a) * (1.0 - a);
    CHECK(std::abs(ut - lead) < 4.0 * (1.0 - a) * (1.0 - a) * (1.0 - a));
}

TEST_CASE("reflect_v identities and monotonicity") {
    const Params p(0.4, 0.015);
    const auto [uB, vB] = branch_point(BranchLabel::B, p);
    CHECK(reflect_v(uB, p) == doctest::Approx(vB).epsilon(1e-11));
    CHECK(reflect_v(0.0, p) == doctest::Approx(-vB).epsilon(1e-13));
    CHECK(reflect_v(u_top(kCusp), kCusp) == doctest::Approx(0.6286).epsilon(8e-4));
    // strictly increasing on [0, u_B], sampled at 100 points
    double prev = reflect_v(0.0, p);
    for (int i = 1; i <= 100; ++i) {
        const double cur = reflect_v(uB * i / 100.0, p);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("u_inv inverts the increasing segment of m") {
    const Params p = kCusp;
    CHECK(u_inv(0.0, p) == 0.0);
    const auto [uB, vB] = branch_point(BranchLabel::B, p);
    const auto [vb, vt] = v_bot_top(p);
    CHECK(u_inv(uB, p) == doctest::Approx(vb).epsilon(1e-10));
    const double mid = u_inv(uB / 2.0, p);
    CHECK(std::abs(m_map(mid, p) - uB / 2.0) < 1e-11);
    CHECK(mid <= vb);
    CHECK_THROWS_AS(u_inv(uB + 0.1, p), OutOfDomain);
}

TEST_CASE("u_bot solves reflect_v = u_inv and sits below u_top near the fold") {
    for (double a : {0.5, 0.55, 0.7, 0.95}) {
        const Params p(a, d_minus(a));
        const double ub = u_bot(p);
        const double uB = branch_point(BranchLabel::B, p).first;
        CHECK(ub >= 0.0);
        CHECK(ub <= uB);
        CHECK(std::abs(reflect_v(ub, p) - u_inv(ub, p)) < 1e-10);
        CHECK(ub < u_top(p));  // travelling near d_-(a) for a in [1/2, 1)
    }
}

TEST_CASE("gamma_fn positive on the verified range") {
    CHECK(gamma_fn(0.5) > 0.0);
    CHECK(gamma_fn(0.95) > 0.0);
    CHECK(gamma_fn(0.99) > 0.0);
    // below the verified range the value is computed but carries no sign claim
    CHECK(std::isfinite(gamma_fn(0.3)));
}

TEST_CASE("gamma continuity across a = 1/2 (step 1e-3)") {
    std::vector<double> gam;
    for (int i = -10; i <= 10; ++i) gam.push_back(gamma_fn(0.5 + 1e-3 * i));
    std::vector<double> jumps;
    for (std::size_t i = 1; i < gam.size(); ++i) jumps.push_back(std::abs(gam[i] - gam[i - 1]));
    std::vector<double> sorted = jumps;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (const double j : jumps) CHECK(j <= 10.0 * median + 1e-12);
}

TEST_CASE("classify verdicts at the reference points") {
    CHECK(classify(Params(0.45, 0.02)).verdict == Verdict::ProvenPinned);
    CHECK(classify(Params(0.5, 0.0415)).verdict == Verdict::ProvenTravelling);
    CHECK(classify(Params(0.5, 0.0415)).quick_reflection_test);
    CHECK(classify(Params(0.5, 0.05)).verdict == Verdict::OutsideDomain);
    CHECK(classify(Params(0.5, 0.0)).verdict == Verdict::OutsideDomain);
    // boundary-degenerate folds into OutsideDomain
    CHECK(classify(Params(0.5, d_minus(0.5))).verdict == Verdict::OutsideDomain);
    // report fields present inside Omega_-
    const auto rep = classify(Params(0.45, 0.02));
    CHECK(rep.in_omega_minus);
    REQUIRE(rep.v_bot.has_value());
    REQUIRE(rep.v_top.has_value());
    REQUIRE(rep.u_top.has_value());
    REQUIRE(rep.u_bot.has_value());
    CHECK(*rep.v_bot < *rep.v_top);
}

TEST_CASE("ordering chain 0 < v_bot < gamma- < v_top < gamma+ < v_B at 50 random points") {
    auto rng = oracle::rng(21);
    std::uniform_real_distribution<double> ua(0.05, 0.95), ufrac(0.05, 0.95);
    for (int k = 0; k < 50; ++k) {
        const double a = ua(rng);
        const Params p(a, std::max(1e-5, ufrac(rng) * d_minus(a)));
        const auto [gm, gp] = gamma_crit(p);
        const auto [vb, vt] = v_bot_top(p);
        const double vB = branch_point(BranchLabel::B, p).second;
        CHECK(0.0 < vb);
        CHECK(vb < gm);
        CHECK(gm < vt);
        CHECK(vt < gp);
        CHECK(gp < vB);
    }
}

TEST_CASE("classify is total over the parameter plane") {
    auto rng = oracle::rng(23);
    std::uniform_real_distribution<double> ua(0.002, 0.998), ud(0.0, 0.07);
    for (int k = 0; k < 1000; ++k) {
        const auto rep = classify(Params(ua(rng), ud(rng)));
        if (rep.verdict == Verdict::ProvenPinned) CHECK(rep.params.d <= pinned_bound(rep.params.a));
        if (rep.verdict == Verdict::ProvenTravelling) {
            REQUIRE(rep.u_bot.has_value());
            REQUIRE(rep.u_top.has_value());
            CHECK(*rep.u_bot < *rep.u_top);
        }
        if (!rep.in_omega_minus) CHECK(rep.verdict == Verdict::OutsideDomain);
    }
}

TEST_CASE("criteria never conflict on a 100x100 scan of Omega_-") {
    // no (a, d) may satisfy both the pinning bound and the travelling test
    for (int ia = 0; ia < 100; ++ia) {
        const double a = 0.005 + 0.99 * ia / 99.0;
        for (int id = 0; id < 100; ++id) {
            const double d = 0.00045 + (0.045 - 0.00045) * id / 99.0;
            const CriterionReport rep = classify(Params(a, d));
            if (!rep.in_omega_minus || !rep.u_bot || !rep.u_top) continue;
            const bool pinned = d <= pinned_bound(a);
            const bool travelling = *rep.u_bot < *rep.u_top;
            CHECK_FALSE((pinned && travelling));
        }
    }
}
