#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "bichrom/cubic.hpp"
#include "bichrom/equilibria.hpp"
#include "bichrom/numerics.hpp"
#include "bichrom/params.hpp"

namespace bichrom {

enum class Verdict { ProvenPinned, ProvenTravelling, Undetermined, OutsideDomain };

/// Outcome of the analytic pinning/travelling tests at one (a, d).
struct CriterionReport {
    Params params;
    bool in_omega_minus = false;
    std::optional<double> v_bot, v_top, u_top, u_bot;
    std::optional<double> gamma_at_dminus;
    // the cheaper sufficient test v_r(u_top) > v_bot already proves travelling
    bool quick_reflection_test = false;
    Verdict verdict = Verdict::OutsideDomain;

    explicit CriterionReport(const Params& p) : params(p) {}
};

/// Pinning bound for lower fronts: c(a, d) = 0 whenever d <= (1 - a)^2 / 8.
inline double pinned_bound(double a) { return (1.0 - a) * (1.0 - a) / 8.0; }

namespace detail {

/// Workspace around the stable bichromatic branch B at one (a, d).
struct WaveFrame {
    Params p;
    double u_B, v_B;
    double gamma_minus, gamma_plus;
};

inline WaveFrame wave_frame_from(const Params& p, std::pair<double, double> B) {
    const auto [gm, gp] = gamma_crit(p);
    return {p, B.first, B.second, gm, gp};
}

inline WaveFrame wave_frame(const Params& p) {
    if (!(p.d > 0.0)) throw OutOfDomain("wave criteria require d > 0");
    return wave_frame_from(p, branch_point(BranchLabel::B, p));
}

/// Root of m(v) = u_B below gamma_-, where m is strictly increasing.
inline double v_bot_of(const WaveFrame& f) {
    const auto g = [&](double v) { return m_map(v, f.p) - f.u_B; };
    double r = num::bisect(g, 0.0, f.gamma_minus, 0.0);
    for (int i = 0; i < 4; ++i) {
        const double fv = g(r);
        const double fp = m_map_deriv(r, f.p);
        if (std::abs(fv) < 1e-14 || std::abs(fp) < 1e-9) break;
        r -= fv / fp;
    }
    return r;
}

/// Root of m(v) = u_B on (gamma_-, gamma_+), where m is strictly decreasing.
inline double v_top_of(const WaveFrame& f) {
    const auto g = [&](double v) { return m_map(v, f.p) - f.u_B; };
    double r = num::bisect(g, f.gamma_minus, f.gamma_plus, 0.0);
    for (int i = 0; i < 4; ++i) {
        const double fv = g(r);
        const double fp = m_map_deriv(r, f.p);
        if (std::abs(fv) < 1e-14 || std::abs(fp) < 1e-9) break;
        r -= fv / fp;
    }
    return r;
}

inline double u_top_of(const WaveFrame& f) { return 2.0 * m_map(f.gamma_plus, f.p) - f.u_B; }

inline double reflect_v_of(const WaveFrame& f, double u) { return 2.0 * m_map(u, f.p) - f.v_B; }

/// Inverse of m on [0, v_bot]; maps [0, u_B] back into [0, v_bot].
inline double u_inv_of(const WaveFrame& f, double v_bot, double u) {
    const double uc = std::clamp(u, 0.0, f.u_B);
    const auto g = [&](double v) { return m_map(v, f.p) - uc; };
    if (g(v_bot) <= 0.0) return v_bot;  // u at the top of the segment, up to roundoff
    return num::bisect(g, 0.0, v_bot, 0.0);
}

/// Right-most solution of reflect_v(u) = u_inv(u) on [0, u_B]: global scan
/// for sign changes, then bisection on the last bracket.
inline double u_bot_of(const WaveFrame& f, double v_bot, int n = 4000) {
    const auto delta = [&](double u) { return reflect_v_of(f, u) - u_inv_of(f, v_bot, u); };
    double lo = 0.0, hi = f.u_B;
    double prev = delta(0.0);  // = -v_B < 0
    bool found = false;
    for (int i = 1; i <= n; ++i) {
        const double u = f.u_B * double(i) / double(n);
        const double cur = delta(u);
        if ((prev <= 0.0 && cur >= 0.0) || (prev >= 0.0 && cur <= 0.0)) {
            lo = f.u_B * double(i - 1) / double(n);
            hi = u;
            found = true;
        }
        prev = cur;
    }
    if (!found) throw std::runtime_error("u_bot: no crossing of the reflection curves");
    return num::bisect(delta, lo, hi, 0.0);
}

}  // namespace detail

/// The two solutions of m(v) = u_B(a, d) below gamma_{c;+}: v_bot below
/// gamma_{c;-} and v_top between the critical points.
inline std::pair<double, double> v_bot_top(const Params& p) {
    const auto f = detail::wave_frame(p);
    return {detail::v_bot_of(f), detail::v_top_of(f)};
}

/// u_top(a, d) = 2 m(gamma_{c;+}) - u_B: the horizontal reflection of the
/// branch-B level through the m-map curve at its local minimum.
inline double u_top(const Params& p) { return detail::u_top_of(detail::wave_frame(p)); }

/// Vertical reflection of the line v = v_B through the m-map curve,
/// v_r(u) = 2 m(u) - v_B; strictly increasing on [0, u_B].
inline double reflect_v(double u, const Params& p) {
    return detail::reflect_v_of(detail::wave_frame(p), u);
}

/// Inverse of the increasing segment of m: for u in [0, u_B] the unique
/// v in [0, v_bot] with m(v) = u.
inline double u_inv(double u, const Params& p) {
    const auto f = detail::wave_frame(p);
    if (!(u >= -1e-12 && u <= f.u_B + 1e-12))
        throw OutOfDomain("u_inv: argument must lie in [0, u_B]");
    return detail::u_inv_of(f, detail::v_bot_of(f), u);
}

/// u_bot(a, d) = max{ u in [0, u_B] : reflect_v(u) = u_inv(u) }.
inline double u_bot(const Params& p) {
    const auto f = detail::wave_frame(p);
    return detail::u_bot_of(f, detail::v_bot_of(f));
}

/// Gamma(a) = u_top(a, d_-(a)) - u_bot(a, d_-(a)), evaluated on the
/// continuously extended branch B at the fold.
inline double gamma_fn(double a) {
    const Params p(a, d_minus(a));
    const auto f = detail::wave_frame(p);
    const double vb = detail::v_bot_of(f);
    return detail::u_top_of(f) - detail::u_bot_of(f, vb);
}

namespace detail {

inline CriterionReport classify_given_roots(const Params& p, const std::vector<Equilibrium>& roots,
                                            bool with_gamma) {
    CriterionReport rep{p};
    if (roots.size() != 9) {
        rep.verdict = Verdict::OutsideDomain;
        return rep;
    }
    rep.in_omega_minus = true;
    bool filled = false;
    try {
        const Equilibrium* B = nullptr;
        for (const auto& r : roots)
            if (r.branch == BranchLabel::B) B = &r;
        if (B == nullptr) throw std::runtime_error("classify: no branch B among 9 roots");
        const WaveFrame f = wave_frame_from(p, {B->u, B->v});
        const double vb = v_bot_of(f);
        rep.v_bot = vb;
        rep.v_top = v_top_of(f);
        rep.u_top = u_top_of(f);
        rep.u_bot = u_bot_of(f, vb);
        rep.quick_reflection_test = reflect_v_of(f, *rep.u_top) > vb;
        filled = true;
    } catch (const std::exception&) {
        // keep whatever was filled; verdict falls back to Undetermined below
    }
    if (p.d <= pinned_bound(p.a))
        rep.verdict = Verdict::ProvenPinned;
    else if (filled && *rep.u_bot < *rep.u_top)
        rep.verdict = Verdict::ProvenTravelling;
    else
        rep.verdict = Verdict::Undetermined;
    if (with_gamma) rep.gamma_at_dminus = gamma_fn(p.a);
    return rep;
}

}  // namespace detail

/// Analytic verdict at one (a, d): OutsideDomain unless nine equilibria
/// exist; ProvenPinned if d <= (1-a)^2/8; else ProvenTravelling if
/// u_bot < u_top; else Undetermined.
inline CriterionReport classify(const Params& p, bool with_gamma = false) {
    std::vector<Equilibrium> roots;
    try {
        roots = solve_equilibria(p);
    } catch (const BoundaryDegenerate&) {
        return CriterionReport{p};
    } catch (const std::invalid_argument&) {
        return CriterionReport{p};
    }
    return detail::classify_given_roots(p, roots, with_gamma);
}

}  // namespace bichrom
