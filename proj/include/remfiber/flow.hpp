#pragma once

// Gradient-type flows of a polynomial: v = grad p / |grad p|^2 moves p at
// unit rate, its rescaling p v multiplies p by e^sigma.

#include "remfiber/numeric.hpp"
#include "remfiber/polynomial.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace remfiber {

enum class FlowKind { Gradient, Scaled };

enum class FlowStatus { Ok, CriticalPoint, Nonconvergence };

const char* to_string(FlowStatus s);

struct FlowStep {
    double sigma = 0.0;
    Point x;
    double value = 0.0;  // p(x)
};

struct FlowTrajectory {
    FlowKind kind = FlowKind::Gradient;
    Point start;
    Point end;
    double s = 0.0;
    double tol = 0.0;
    /// Accepted steps including sigma = 0; sigma is monotone.
    std::vector<FlowStep> steps;
    /// max over steps of |p(x) - p0 - sigma| (Gradient) or
    /// |p(x) - e^sigma p0| (Scaled).
    double drift = 0.0;
    FlowStatus status = FlowStatus::Ok;
    std::string message;

    bool ok() const { return status == FlowStatus::Ok; }
};

inline constexpr double kCriticalGradient = 1e-8;

/// Integrates one trajectory with the Dormand-Prince 5(4) pair and PI step
/// control (absolute and relative tolerance `tol`). Aborts, without
/// throwing, near critical points (|grad p| < 1e-8) or when the drift
/// exceeds 100 tol (times e^sigma for the scaled flow).
FlowTrajectory integrate_flow(const ScalarField& field, FlowKind kind, const Point& start, double s, double tol);

/// Flows each point for time s along v. Requires p(x) > 0 at every start,
/// tol > 0, and s > -p(x) when s is negative; violations throw.
std::vector<FlowTrajectory> transport(const Polynomial& p, std::span<const Point> points, double s, double tol);
/// Same for the scaled field p v.
std::vector<FlowTrajectory> scaled_transport(const Polynomial& p, std::span<const Point> points, double s,
                                             double tol);

/// End point of one trajectory; throws when the trajectory aborts.
Point flow_map(const ScalarField& field, FlowKind kind, const Point& x, double s, double tol);

struct SemigroupCheck {
    bool holds = false;
    /// compose(p, g) - a^k p in the variables x1..xn, a.
    Polynomial residual;
    int exponent = 0;  // k = m / w
};

/// g holds polynomials in x1..xn and a trailing parameter a standing for
/// e^{w s}. Checks g_s^* p = e^{m s} p exactly, i.e. p o g = a^{m/w} p.
/// Rejects m/w that is not a nonnegative integer.
SemigroupCheck verify_semigroup(const Polynomial& p, std::span<const Polynomial> g, const Rational& m,
                                const Rational& w);

/// Columns: trajectory, sigma, x1..xn, p.
void write_trajectories_csv(std::ostream& out, std::span<const FlowTrajectory> trajectories);

}  // namespace remfiber
