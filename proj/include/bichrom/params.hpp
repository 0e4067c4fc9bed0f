#pragma once

#include <stdexcept>
#include <string>

namespace bichrom {

/// Point (a, d) in parameter space: detuning a of the cubic nonlinearity
/// g(u; a) = u (1 - u)(u - a) and coupling strength d >= 0 of the lattice
/// equation.
struct Params {
    double a;
    double d;

    Params(double a_in, double d_in) : a(a_in), d(d_in) {
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("Params: a must lie in (0,1), got " + std::to_string(a_in));
        if (!(d >= 0.0))
            throw std::invalid_argument("Params: d must be nonnegative, got " + std::to_string(d_in));
    }
};

/// Requested quantity is not defined at this parameter point.
struct OutOfDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// (a, d) lies within the boundary tolerance of a bifurcation curve, where
/// root counts are degenerate and callers get an explicit refusal instead of
/// an unstable answer.
struct BoundaryDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A closed-form derivative hit a vanishing denominator.
struct SingularDerivative : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A lattice profile has no threshold crossing to track.
struct NoInterface : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time integration escaped the invariant region; the step size is too large.
struct BlowUp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace tol {
// degenerate zone around d_-(a) and d_+(a)
inline constexpr double boundary_d = 1e-7;
}  // namespace tol

}  // namespace bichrom
