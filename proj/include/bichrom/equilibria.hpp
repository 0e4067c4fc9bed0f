#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "bichrom/cubic.hpp"
#include "bichrom/numerics.hpp"
#include "bichrom/params.hpp"

namespace bichrom {

enum class BranchLabel { Zero, Mono_a, One, A, B, C, D, SwappedA, SwappedB, SwappedC, SwappedD };

enum class Stability { StableNode, Saddle, UnstableNode, Degenerate };

/// A root (u, v) of G(u, v; a, d) = 0 with its branch label and the linear
/// stability class of the reduced two-component system.
struct Equilibrium {
    double u;
    double v;
    BranchLabel branch;
    Stability stability;
};

struct BifurcationCurves {
    double a;
    double d_minus;
    double d_plus;
};

struct Jacobian2 {
    double a00, a01, a10, a11;
    double det() const { return a00 * a11 - a01 * a10; }
    double trace() const { return a00 + a11; }
};

/// D_{1,2} G(u, v; a, d) = [[g'(u) - 2d, 2d], [2d, g'(v) - 2d]].
inline Jacobian2 jacobian_G(double u, double v, const Params& p) {
    return {eval_g(u, p.a, 1) - 2.0 * p.d, 2.0 * p.d, 2.0 * p.d, eval_g(v, p.a, 1) - 2.0 * p.d};
}

inline Stability stability_class(const Jacobian2& J) {
    const double det = J.det();
    if (std::abs(det) <= 1e-10) return Stability::Degenerate;
    if (det < 0.0) return Stability::Saddle;
    return J.trace() < 0.0 ? Stability::StableNode : Stability::UnstableNode;
}

/// Upper bifurcation curve d_+(a) = g'(a; a) / 4 = a (1 - a) / 4, where the
/// last bichromatic pair merges into (a, a).
inline double d_plus(double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("d_plus: a must lie in [0,1]");
    return a * (1.0 - a) / 4.0;
}

namespace detail {

inline double vd_curve(double u, double a, double d) { return u - eval_g(u, a) / (2.0 * d); }

struct MinScan {
    double arg;    // argmin of v_+ - v_d on [0, a]
    double value;  // minimum value
    double sens;   // |d/dd (v_+ - v_d)| at the argmin
};

/// Minimum of h(u) = v_+(u) - v_d(u) over [0, a]: grid scan plus golden
/// refinement. The sign of this minimum decides whether the branches B and C
/// exist (negative below d_-(a), positive above), and its sensitivity to d
/// converts the value into a distance estimate from the fold.
inline MinScan min_h_plus(double a, double d, int n = 1600) {
    const auto h = [&](double u) { return v_branches(u, a).second - vd_curve(u, a, d); };
    double best = h(0.0);
    double bestu = 0.0;
    int besti = 0;
    for (int i = 1; i <= n; ++i) {
        const double u = a * double(i) / double(n);
        const double val = h(u);
        if (val < best) {
            best = val;
            bestu = u;
            besti = i;
        }
    }
    const double lo = a * double(std::max(0, besti - 2)) / double(n);
    const double hi = a * double(std::min(n, besti + 2)) / double(n);
    const double uref = num::golden_min(h, lo, hi, 1e-13 * std::max(a, 1e-6));
    const double vref = h(uref);
    if (vref < best) {
        best = vref;
        bestu = uref;
    }
    return {bestu, best, std::abs(eval_g(bestu, a)) / (2.0 * d * d)};
}

/// Polish a bichromatic root with a full 2x2 Newton iteration on G = 0.
/// Near-singular Jacobians (tangencies) leave the input untouched.
inline std::pair<double, double> newton_G(double u, double v, double a, double d) {
    for (int it = 0; it < 30; ++it) {
        const double f1 = 2.0 * d * (v - u) + eval_g(u, a);
        const double f2 = 2.0 * d * (u - v) + eval_g(v, a);
        if (std::abs(f1) < 1e-15 && std::abs(f2) < 1e-15) break;
        const double j00 = eval_g(u, a, 1) - 2.0 * d;
        const double j11 = eval_g(v, a, 1) - 2.0 * d;
        const double det = j00 * j11 - 4.0 * d * d;
        if (std::abs(det) < 1e-11) break;
        const double du = (f1 * j11 - f2 * 2.0 * d) / det;
        const double dv = (f2 * j00 - f1 * 2.0 * d) / det;
        u -= du;
        v -= dv;
        if (std::abs(du) + std::abs(dv) < 1e-16) break;
    }
    return {u, v};
}

struct BichromRoots {
    double dist_dminus = std::numeric_limits<double>::infinity();  // estimated |d - d_-(a)|
    bool below_dminus = false;                                     // min(v_+ - v_d) <= 0
    std::pair<double, double> tangentBC{};                         // B = C collision representative
    std::optional<std::pair<double, double>> B, C;                 // v_+ intersections
    std::optional<std::pair<double, double>> AD;                   // v_- intersection (A below d_-, D above)
};

/// All bichromatic roots with v > u at (a, d), a <= 1/2, d > 0, found as the
/// intersections of the balance curves v_-/v_+ with the m-map curve v_d on
/// [0, a].
inline BichromRoots bichromatic_roots(double a, double d, int n = 1600) {
    BichromRoots out;
    const auto hplus = [&](double u) { return v_branches(u, a).second - vd_curve(u, a, d); };
    const MinScan ms = min_h_plus(a, d, n);
    out.dist_dminus = std::abs(ms.value) / std::max(ms.sens, 1e-30);
    out.below_dminus = ms.value <= 0.0;
    out.tangentBC = {ms.arg, 0.5 * (v_branches(ms.arg, a).second + vd_curve(ms.arg, a, d))};
    if (ms.value < 0.0) {
        // two transversal intersections straddle the minimum; h > 0 at both
        // interval ends since v_+(0) = v_+(a) = 1
        const double xtol = 1e-15 * std::max(a, 1e-6);
        const double uB = num::bisect(hplus, 0.0, ms.arg, xtol);
        const double uC = num::bisect(hplus, ms.arg, a, xtol);
        out.B = newton_G(uB, vd_curve(uB, a, d), a, d);
        out.C = newton_G(uC, vd_curve(uC, a, d), a, d);
    }
    // v_- intersection: h_-(a) = 0 identically (the diagonal root (a,a)); the
    // interior branch root is the left-most zero on [0, a).
    const auto hminus = [&](double u) { return v_branches(u, a).first - vd_curve(u, a, d); };
    const double ucap = a * (1.0 - 1e-9);
    double prev = hminus(0.0);  // = a > 0
    for (int i = 1; i <= n; ++i) {
        const double u = ucap * double(i) / double(n);
        const double cur = hminus(u);
        if ((prev > 0.0 && cur <= 0.0) || (prev < 0.0 && cur >= 0.0)) {
            const double ulo = ucap * double(i - 1) / double(n);
            const double uAD = num::bisect(hminus, ulo, u, 1e-15 * std::max(a, 1e-6));
            out.AD = newton_G(uAD, vd_curve(uAD, a, d), a, d);
            break;
        }
        prev = cur;
    }
    return out;
}

inline std::pair<double, double> reflect_root(std::pair<double, double> r) {
    return {1.0 - r.second, 1.0 - r.first};
}

/// Sharp location of the B = C collision (tangency of v_+ and the m-map
/// curve) for d at or near d_-(a). The raw argmin of v_+ - v_d is noise
/// limited, so refine via the sign change of the closed-form derivative; at
/// a = 1/2 the tangency sits exactly at the kink u_min(a).
inline std::pair<double, double> fold_point(double a, double d, double arg_hint) {
    // v taken from the v_+ branch alone: unlike v_d it does not inherit the
    // extreme d-sensitivity of the m-map near the fold
    const auto point_at = [&](double u) { return std::pair{u, v_branches(u, a).second}; };
    if (std::abs(a - 0.5) < 1e-12) return point_at(critical_points(a).u_min);
    const auto dh = [&](double u) {
        return v_branch_deriv(u, a, VBranch::plus) - (1.0 - eval_g(u, a, 1) / (2.0 * d));
    };
    try {
        double w = std::max(a * 1e-3, 1e-9);
        double lo = std::max(a * 1e-9, arg_hint - w);
        double hi = std::min(a * (1.0 - 1e-9), arg_hint + w);
        for (int k = 0; k < 24 && dh(lo) >= 0.0 && lo > a * 2e-9; ++k) {
            w *= 2.0;
            lo = std::max(a * 1e-9, arg_hint - w);
        }
        w = std::max(a * 1e-3, 1e-9);
        for (int k = 0; k < 24 && dh(hi) <= 0.0 && hi < a * (1.0 - 2e-9); ++k) {
            w *= 2.0;
            hi = std::min(a * (1.0 - 1e-9), arg_hint + w);
        }
        if (dh(lo) < 0.0 && dh(hi) > 0.0) return point_at(num::bisect(dh, lo, hi, 0.0));
    } catch (const SingularDerivative&) {
        // fall through to the argmin hint
    }
    return point_at(arg_hint);
}

}  // namespace detail

/// Lower bifurcation curve d_-(a): the supremum of coupling strengths at
/// which the balance curve v_+ still intersects the m-map curve on [0, a].
/// Located by bisection on the sign of min_u (v_+(u) - v_d(u)), which is
/// strictly increasing in d; the returned bracket is tighter than 1e-9.
/// Symmetric under a -> 1 - a.
inline double d_minus(double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("d_minus: a must lie in (0,1)");
    const double ar = std::min(a, 1.0 - a);

    static std::map<double, double> cache;
    static std::mutex cache_mtx;
    {
        std::lock_guard lock(cache_mtx);
        if (const auto it = cache.find(ar); it != cache.end()) return it->second;
    }

    const double hi0 = d_plus(ar);
    double lo = hi0 * 1e-9;
    double hi = hi0;
    if (!(detail::min_h_plus(ar, lo).value < 0.0))
        throw std::runtime_error("d_minus: lower bracket has no intersection deficit");
    if (!(detail::min_h_plus(ar, hi).value > 0.0))
        throw std::runtime_error("d_minus: upper bracket still intersects");
    // relative tolerance: quantities evaluated at d = d_-(a) (m-map values,
    // branch B at the fold) amplify any offset in d by up to ~1/d^2
    const double xtol = std::max(1e-14, hi0 * 1e-10);
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (detail::min_h_plus(ar, mid).value < 0.0 ? lo : hi) = mid;
    }
    const double result = 0.5 * (lo + hi);
    std::lock_guard lock(cache_mtx);
    cache.emplace(ar, result);
    return result;
}

/// Both bifurcation curves at one a.
inline BifurcationCurves bifurcation_curves(double a) { return {a, d_minus(a), d_plus(a)}; }

/// All roots of G(u, v; a, d) = 0 in [0,1]^2 with branch labels and
/// stability classes. Counts follow the 9/5/3 cascade in d; parameter points
/// within the boundary tolerance of d_-(a) or d_+(a) are refused with
/// BoundaryDegenerate. Points with a > 1/2 are handled through the
/// (u, v) -> (1 - v, 1 - u) reflection.
inline std::vector<Equilibrium> solve_equilibria(const Params& p) {
    if (!(p.d > 0.0)) throw std::invalid_argument("solve_equilibria: requires d > 0");
    const bool refl = p.a > 0.5;
    const double ar = refl ? 1.0 - p.a : p.a;
    const double d = p.d;

    if (std::abs(d - d_plus(ar)) <= tol::boundary_d)
        throw BoundaryDegenerate("solve_equilibria: d within tolerance of d_+(a)");
    const auto br = detail::bichromatic_roots(ar, d);
    if (br.dist_dminus <= tol::boundary_d)
        throw BoundaryDegenerate("solve_equilibria: d within tolerance of d_-(a)");

    std::vector<std::pair<double, double>> upper;  // v > u roots at (ar, d)
    if (br.below_dminus) {
        if (!br.B || !br.C)
            throw std::runtime_error("solve_equilibria: missing v_+ intersections below d_-");
        upper.push_back(*br.B);
        upper.push_back(*br.C);
    }
    if (br.AD) upper.push_back(*br.AD);

    std::vector<std::pair<double, double>> all = {{0.0, 0.0}, {ar, ar}, {1.0, 1.0}};
    for (const auto& r : upper) {
        all.push_back(r);
        all.emplace_back(r.second, r.first);
    }
    if (refl)
        for (auto& r : all) r = detail::reflect_root(r);

    std::sort(all.begin(), all.end());
    // dedup radius 1e-7 in sup-norm
    std::vector<std::pair<double, double>> uniq;
    for (const auto& r : all) {
        bool dup = false;
        for (const auto& q : uniq)
            if (std::abs(q.first - r.first) <= 1e-7 && std::abs(q.second - r.second) <= 1e-7) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(r);
    }
    if (uniq.size() != 3 && uniq.size() != 5 && uniq.size() != 9)
        throw BoundaryDegenerate("solve_equilibria: degenerate root configuration");

    // label: diagonal roots by value; off-diagonal v > u roots by the ordering
    // u_A < u_B < u_C (three) or the single surviving branch D; mirrors swapped
    std::vector<Equilibrium> out;
    out.reserve(uniq.size());
    std::vector<std::pair<double, double>> vu;
    for (const auto& r : uniq)
        if (r.second > r.first) vu.push_back(r);
    std::sort(vu.begin(), vu.end());
    const auto upper_label = [&](const std::pair<double, double>& r) {
        if (vu.size() == 1) return BranchLabel::D;
        const std::size_t idx = std::lower_bound(vu.begin(), vu.end(), r) - vu.begin();
        return idx == 0 ? BranchLabel::A : (idx == 1 ? BranchLabel::B : BranchLabel::C);
    };
    const auto swapped_of = [](BranchLabel l) {
        switch (l) {
            case BranchLabel::A: return BranchLabel::SwappedA;
            case BranchLabel::B: return BranchLabel::SwappedB;
            case BranchLabel::C: return BranchLabel::SwappedC;
            default: return BranchLabel::SwappedD;
        }
    };
    for (const auto& r : uniq) {
        BranchLabel label;
        if (std::abs(r.first - r.second) <= 1e-9) {
            label = r.first < 0.5 * p.a             ? BranchLabel::Zero
                    : (r.first > 0.5 * (1.0 + p.a)) ? BranchLabel::One
                                                    : BranchLabel::Mono_a;
        } else if (r.second > r.first) {
            label = upper_label(r);
        } else {
            label = swapped_of(upper_label({r.second, r.first}));
        }
        out.push_back({r.first, r.second, label, stability_class(jacobian_G(r.first, r.second, p))});
    }
    return out;
}

/// One branch of the equilibrium diagram on the closure of its domain:
/// A/B/C on closure(Omega_-), D on closure(Omega_+). At d = d_-(a) the
/// colliding pair B = C is returned as the tangency point of v_+ and the
/// m-map curve.
inline std::pair<double, double> branch_point(BranchLabel br, const Params& p) {
    if (br != BranchLabel::A && br != BranchLabel::B && br != BranchLabel::C && br != BranchLabel::D)
        throw std::invalid_argument("branch_point: label must be A, B, C or D");
    if (p.a > 0.5) {
        const BranchLabel mirrored = br == BranchLabel::A   ? BranchLabel::C
                                     : br == BranchLabel::C ? BranchLabel::A
                                                            : br;
        return detail::reflect_root(branch_point(mirrored, Params(1.0 - p.a, p.d)));
    }
    const double a = p.a, d = p.d;
    if (d == 0.0) {
        switch (br) {
            case BranchLabel::A: return {0.0, a};
            case BranchLabel::B: return {0.0, 1.0};
            case BranchLabel::C: return {a, 1.0};
            default: throw OutOfDomain("branch_point: D is defined for d_-(a) <= d <= d_+(a)");
        }
    }
    const auto roots = detail::bichromatic_roots(a, d);
    const bool near_fold = roots.dist_dminus <= tol::boundary_d;
    if (br == BranchLabel::D) {
        if (d > d_plus(a) + tol::boundary_d)
            throw OutOfDomain("branch_point: d above d_+(a)");
        if (roots.below_dminus && !near_fold)
            throw OutOfDomain("branch_point: D requires d >= d_-(a)");
        if (!roots.AD) {
            if (d >= d_plus(a) - 1e-6) return {a, a};  // branch has merged into the diagonal
            throw std::runtime_error("branch_point: v_- intersection not found");
        }
        return *roots.AD;
    }
    if (!roots.below_dminus && !near_fold)
        throw OutOfDomain("branch_point: (a,d) outside the closure of Omega_-");
    if (br == BranchLabel::A) {
        if (!roots.AD) throw std::runtime_error("branch_point: v_- intersection not found");
        return *roots.AD;
    }
    if (near_fold) return detail::fold_point(a, d, roots.tangentBC.first);
    return br == BranchLabel::B ? *roots.B : *roots.C;
}

/// 2-periodic pattern used for simulations: the stable bichromatic branch B,
/// defined on the closure of Omega_-. Throws OutOfDomain beyond d_-(a).
inline std::pair<double, double> bichromatic_pattern(const Params& p) {
    return branch_point(BranchLabel::B, p);
}

// ---------------------------------------------------------------------------
// Asymptotics of d_-(a) near the corner (0,0) and the cusp (1/2, 1/24)
// ---------------------------------------------------------------------------

enum class AsymptoticsKind { CornerA0, Cusp };

struct AsymptoticsSample {
    double x;          // a (corner) or d (cusp)
    double computed;   // d_-(a) resp. a_-(d)
    double expansion;  // leading-order expansion value
    double error;
    double ratio;      // error / a^5 resp. error / (1/24 - d)^2
};

struct AsymptoticsReport {
    AsymptoticsKind kind;
    std::vector<AsymptoticsSample> samples;
    double reference_ratio = 0.0;  // ratio at the largest sample
    bool pass = false;             // no blow-up: every ratio <= 3 x reference
};

/// Inverse of d_-(a) on the rising flank a in (0, 1/2).
inline double a_minus_inverse(double d) {
    if (!(d > 0.0 && d < 1.0 / 24.0)) throw std::invalid_argument("a_minus_inverse: d in (0, 1/24)");
    double lo = 1e-3, hi = 0.5;
    if (d_minus(lo) >= d) throw std::invalid_argument("a_minus_inverse: d below the bracket");
    return num::bisect([&](double a) { return d_minus(a) - d; }, lo, hi, 1e-10);
}

/// Check the stated expansions of d_-(a) against the bisection values:
/// corner: d_-(a) = a^2/8 + a^4/32 + O(a^5);
/// cusp:   a_-(d) = 1/2 - sqrt(1152 (1/24 - d)^3) + O((1/24 - d)^2).
/// PASS means the remainder ratios stay bounded (within 3x the ratio at the
/// largest sample) as the expansion point is approached.
inline AsymptoticsReport verify_asymptotics(AsymptoticsKind kind, const std::vector<double>& xs) {
    AsymptoticsReport rep{kind, {}, 0.0, false};
    for (const double x : xs) {
        AsymptoticsSample s{};
        s.x = x;
        if (kind == AsymptoticsKind::CornerA0) {
            if (!(x >= 0.0 && x <= 0.2))
                throw std::invalid_argument("verify_asymptotics: corner samples need a <= 0.2");
            s.computed = x == 0.0 ? 0.0 : d_minus(x);
            s.expansion = x * x / 8.0 + x * x * x * x / 32.0;
            s.error = std::abs(s.computed - s.expansion);
            s.ratio = x > 0.0 ? s.error / std::pow(x, 5) : 0.0;
        } else {
            const double delta = 1.0 / 24.0 - x;
            if (!(delta > 0.0 && delta <= 5e-3))
                throw std::invalid_argument("verify_asymptotics: cusp samples need 1/24 - d in (0, 5e-3]");
            s.computed = a_minus_inverse(x);
            s.expansion = 0.5 - std::sqrt(1152.0 * delta * delta * delta);
            s.error = std::abs(s.computed - s.expansion);
            s.ratio = s.error / (delta * delta);
        }
        rep.samples.push_back(s);
    }
    if (rep.samples.empty()) return rep;
    // reference sample: largest a (corner) resp. largest 1/24 - d (cusp)
    const auto ref = (kind == AsymptoticsKind::CornerA0)
                         ? std::max_element(rep.samples.begin(), rep.samples.end(),
                                            [](const auto& l, const auto& r) { return l.x < r.x; })
                         : std::min_element(rep.samples.begin(), rep.samples.end(),
                                            [](const auto& l, const auto& r) { return l.x < r.x; });
    rep.reference_ratio = ref->ratio;
    rep.pass = std::all_of(rep.samples.begin(), rep.samples.end(), [&](const auto& s) {
        return s.ratio <= 3.0 * rep.reference_ratio + 1e-12;
    });
    return rep;
}

}  // namespace bichrom
