#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "bichrom/params.hpp"

namespace bichrom {

/// The cubic nonlinearity g(u; a) = u (1 - u)(u - a) and its derivatives;
/// order selects g, g', g'' or g'''. Note g'''(u; a) = -6 for all u.
inline double eval_g(double u, double a, int order = 0) {
    switch (order) {
        case 0: return u * (1.0 - u) * (u - a);
        case 1: return -3.0 * u * u + 2.0 * (1.0 + a) * u - a;
        case 2: return -6.0 * u + 2.0 * (1.0 + a);
        case 3: return -6.0;
        default: throw std::invalid_argument("eval_g: order must be in 0..3");
    }
}

/// Critical structure of the cubic: g'(u_min) = g'(u_max) = 0 and
/// g''(u_infl) = 0, with u_min < u_infl < u_max.
struct CubicCriticalPoints {
    double u_min;
    double u_infl;
    double u_max;
};

inline CubicCriticalPoints critical_points(double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("critical_points: a must lie in (0,1)");
    const double infl = (a + 1.0) / 3.0;
    const double off = std::sqrt(1.0 - a * (1.0 - a)) / 3.0;
    return {infl - off, infl, infl + off};
}

namespace detail {

/// All real roots of the monic cubic x^3 + b x^2 + c x + e, ascending.
/// Returns the count (1 or 3); a double root is reported twice. Roots are
/// Newton-polished on the exact polynomial.
inline int solve_cubic(double b, double c, double e, std::array<double, 3>& out) {
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + e;
    const double shift = -b / 3.0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;  // > 0: single real root
    // discriminant roundoff scale; |disc| below it means a double root
    const double eps = 1e-14 * (0.25 * q * q + std::abs(p * p * p) / 27.0);
    int n = 0;
    if (p == 0.0 && q == 0.0) {
        out[0] = out[1] = out[2] = shift;  // triple root
        n = 3;
    } else if (std::abs(disc) <= eps && p < 0.0) {
        // double root t2 = t3 = -3q/(2p), simple root t1 = 3q/p
        const double td = -1.5 * q / p;
        const double ts = 3.0 * q / p;
        out[0] = std::min(ts, td) + shift;
        out[1] = td + shift;
        out[2] = std::max(ts, td) + shift;
        n = 3;
    } else if (disc > 0.0 || p >= 0.0) {
        const double s = std::sqrt(std::max(disc, 0.0));
        // pick the non-cancelling cube root first
        const double w = (q >= 0.0) ? std::cbrt(-0.5 * q - s) : std::cbrt(-0.5 * q + s);
        const double t = (w != 0.0) ? w - p / (3.0 * w) : 0.0;
        out[0] = t + shift;
        n = 1;
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        constexpr double two_pi_3 = 2.0943951023931953;
        out[0] = m * std::cos(phi - 2.0 * two_pi_3) + shift;
        out[1] = m * std::cos(phi - two_pi_3) + shift;
        out[2] = m * std::cos(phi) + shift;
        std::sort(out.begin(), out.end());
        n = 3;
    }
    for (int i = 0; i < n; ++i) {
        double x = out[i];
        for (int it = 0; it < 4; ++it) {
            const double f = ((x + b) * x + c) * x + e;
            const double fp = (3.0 * x + 2.0 * b) * x + c;
            if (f == 0.0 || std::abs(fp) < 1e-14) break;
            const double step = f / fp;
            x -= step;
            if (std::abs(step) < 1e-17 * (1.0 + std::abs(x))) break;
        }
        out[i] = x;
    }
    if (n == 3) std::sort(out.begin(), out.end());
    return n;
}

}  // namespace detail

enum class VBranch { minus, plus };

/// Balance curves v_-(u) <= v_+(u) in [a, 1] solving g(v; a) = -g(u; a),
/// defined for 0 <= u <= a <= 1/2. At a tangential contact (a = 1/2,
/// u = u_min) both outputs coincide. Roots come from the closed-form cubic
/// solver and are Newton-polished; a near-singular contact is snapped to the
/// critical point of g instead.
inline std::pair<double, double> v_branches(double u, double a) {
    constexpr double slack = 1e-12;
    if (!(a > 0.0 && a <= 0.5 + slack))
        throw OutOfDomain("v_branches: requires 0 < a <= 1/2 (use the a -> 1-a symmetry upstream)");
    if (!(u >= -slack && u <= a + slack)) throw OutOfDomain("v_branches: requires 0 <= u <= a");
    a = std::min(a, 0.5);
    u = std::clamp(u, 0.0, a);

    const double gu = eval_g(u, a);
    std::array<double, 3> r{};
    const int n = detail::solve_cubic(-(1.0 + a), a, -gu, r);

    double lo = 0.0, hi = 0.0;
    int kept = 0;
    for (int i = 0; i < n; ++i) {
        if (r[i] >= a - 1e-8 && r[i] <= 1.0 + 1e-8) {
            const double v = std::clamp(r[i], a, 1.0);
            if (kept == 0) {
                lo = hi = v;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            ++kept;
        }
    }
    if (kept == 0) throw std::runtime_error("v_branches: no balance root in [a,1]");
    if (kept == 1) {
        // tangential contact: the double root sits at the local maximum of g
        const double umax = critical_points(a).u_max;
        if (std::abs(eval_g(umax, a) + gu) < 1e-10) lo = hi = umax;
    }

    const auto polish = [&](double v) {
        for (int it = 0; it < 6; ++it) {
            const double f = eval_g(v, a) + gu;
            const double fp = eval_g(v, a, 1);
            if (std::abs(f) < 1e-16 || std::abs(fp) < 1e-9) break;
            v -= f / fp;
        }
        return std::clamp(v, a, 1.0);
    };
    return {polish(lo), polish(hi)};
}

/// Closed-form derivative v_pm'(u) = -g'(u; a) / g'(v_pm(u); a). Signals a
/// singularity where the denominator vanishes (e.g. u = u_min at a = 1/2).
inline double v_branch_deriv(double u, double a, VBranch which) {
    const auto [vm, vp] = v_branches(u, a);
    const double v = (which == VBranch::minus) ? vm : vp;
    const double denom = eval_g(v, a, 1);
    if (std::abs(denom) < 1e-9)
        throw SingularDerivative("v_branch_deriv: g'(v_pm(u); a) = 0 at this point");
    return -eval_g(u, a, 1) / denom;
}

/// Scalar reflection map m(x) = x - g(x; a) / (2d). Its fixed points are
/// exactly the roots of g; its graph intersections with the balance curves
/// give the bichromatic equilibria.
inline double m_map(double x, const Params& p) {
    if (!(p.d > 0.0)) throw OutOfDomain("m_map: requires d > 0");
    return x - eval_g(x, p.a) / (2.0 * p.d);
}

inline double m_map_deriv(double x, const Params& p) {
    if (!(p.d > 0.0)) throw OutOfDomain("m_map_deriv: requires d > 0");
    return 1.0 - eval_g(x, p.a, 1) / (2.0 * p.d);
}

/// Local extrema gamma_{c;-} < gamma_{c;+} of the reflection map,
/// (a+1)/3 -+ (1/3) sqrt(a^2 - a + 1 - 6d). The map decreases strictly
/// between them and increases outside.
inline std::pair<double, double> gamma_crit(double a, double d) {
    const double disc = a * a - a + 1.0 - 6.0 * d;
    if (disc < 0.0) throw OutOfDomain("gamma_crit: discriminant a^2 - a + 1 - 6d is negative");
    const double center = (a + 1.0) / 3.0;
    const double off = std::sqrt(disc) / 3.0;
    return {center - off, center + off};
}

inline std::pair<double, double> gamma_crit(const Params& p) { return gamma_crit(p.a, p.d); }

}  // namespace bichrom
