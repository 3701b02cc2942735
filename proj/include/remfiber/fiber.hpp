#pragma once

// Point samples of the real level set F_t = p^{-1}(t).

#include "remfiber/numeric.hpp"
#include "remfiber/polynomial.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <utility>
#include <vector>

namespace remfiber {

/// Deterministic uniform doubles from one 64-bit seed. The conversion is
/// spelled out so samples are identical across standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

private:
    std::mt19937_64 engine_;
};

enum class FiberVerdict { Nonempty, PresumedEmpty };

const char* to_string(FiberVerdict v);

struct SamplingMetadata {
    double box_radius = 0.0;
    int attempts = 0;  // Newton seeds drawn
    std::uint64_t seed = 0;
    int newton_points = 0;
    int duplicates_removed = 0;
    int marching_points = 0;
    int marching_segments = 0;
    int grid_points = 0;  // found by the fallback grid-line scan
    /// Set when the emptiness heuristic ran: min and max of p on the scan grid.
    double scan_min = 0.0;
    double scan_max = 0.0;
    bool scanned = false;
};

struct FiberSample {
    Polynomial p;
    double t = 0.0;
    std::vector<Point> points;
    /// max |p(x_i) - t| over stored points; 0 for an empty sample.
    double residual_bound = 0.0;
    FiberVerdict verdict = FiberVerdict::Nonempty;
    SamplingMetadata meta;

    int n_vars() const { return p.n_vars(); }
    bool empty() const { return points.empty(); }
    /// The first `count` points (all if fewer).
    FiberSample truncated(std::size_t count) const;
};

inline constexpr double kNewtonResidual = 1e-10;
inline constexpr double kResidualBound = 1e-8;

/// Seeds Newton's method uniformly in [-R, R]^n and keeps converged points
/// (|p - t| <= 1e-10, inside the 2R box), deduplicated on a grid of
/// spacing R/sqrt(N). For n = 2 also adds marching-squares edge crossings.
/// When nothing converges, runs the emptiness heuristic; throws a
/// nonconvergence error if the heuristic cannot rule the fiber out and no
/// fallback point is found.
FiberSample sample_fiber(const Polynomial& p, double t, double R, int N, std::uint64_t seed);

/// 2 (1 + |t|)^{1/m} for p homogeneous of degree m >= 1; throws a config
/// error otherwise (the radius must then be supplied).
double default_box_radius(const Polynomial& p, double t);

/// Components of the graph joining points at distance <= eps.
int connected_components(const FiberSample& fs, double eps);
int connected_components(const std::vector<Point>& points, double eps);

double median_nearest_neighbor(const std::vector<Point>& points);

/// (eps, components) for eps = multiplier * base.
std::vector<std::pair<double, int>> component_sweep(const FiberSample& fs, double base,
                                                    const std::vector<double>& multipliers);

/// One point per row: coordinates then residual.
void write_points_csv(std::ostream& out, const FiberSample& fs);

}  // namespace remfiber
