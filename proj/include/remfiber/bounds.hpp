#pragma once

// Empirical gradient bounds at infinity: the minimum of |grad p| |x| on
// level sets, and power-law fits of the resulting curves.

#include "remfiber/numeric.hpp"
#include "remfiber/polynomial.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace remfiber {

struct GradNormMin {
    /// sqrt of the best |grad p|^2 |x|^2 found: an upper bound on the
    /// constrained minimum, not a certificate.
    double value = 0.0;
    Point argmin;
    /// max |p(x) - t| over all accepted iterates.
    double max_violation = 0.0;
    int restarts = 0;
    int projected_starts = 0;
};

struct GradNormOptions {
    std::optional<double> box_radius;  // required for non-homogeneous p
    int max_iterations = 500;
};

/// Multistart projected gradient with Armijo backtracking on p = t. Start j
/// is sample j of a fixed 256-seed fiber sample (perturbed once the sample
/// is exhausted), so adding restarts never raises the result.
GradNormMin levelset_min_gradnorm(const Polynomial& p, double t, int restarts, std::uint64_t seed,
                                  const GradNormOptions& opts = {});

struct FitOptions {
    std::size_t min_samples = 5;
    double min_decades = 1.0;
};

struct PuiseuxFit {
    double c = 0.0;
    double alpha = 0.0;
    /// max relative deviation |c r^alpha / value - 1| over the fitted samples.
    double quality = 0.0;
    std::size_t used = 0;
};

/// Least-squares line through (log r, log value) over the upper half of
/// the log r range (at least two samples).
PuiseuxFit fit_puiseux_exponent(std::span<const std::pair<double, double>> samples, const FitOptions& opts = {});

enum class BoundVerdict { BoundHolds, BoundSuspect };

const char* to_string(BoundVerdict v);

struct BoundEstimate {
    double T = 0.0;
    double c = 0.0;
    /// Exponent of g(t) against t; NaN when the fit was impossible.
    double alpha = 0.0;
    double fit_quality = 0.0;
    /// (t, g(t)) for every nonempty level of the grid.
    std::vector<std::pair<double, double>> samples;
    std::vector<double> empty_levels;
    /// (r, t(r)) with t(r) = max over |x| = r of min(p, 1 / (|grad p| |x|)).
    std::vector<std::pair<double, double>> profile;
    double profile_alpha = 0.0;
    BoundVerdict verdict = BoundVerdict::BoundHolds;
    std::vector<std::string> notes;
};

struct ThresholdOptions {
    int restarts = 32;
    std::optional<double> box_radius;
    int profile_directions = 512;
};

BoundEstimate threshold_estimate(const Polynomial& p, std::span<const double> t_grid,
                                 std::span<const double> r_grid, std::uint64_t seed,
                                 const ThresholdOptions& opts = {});

nlohmann::json to_json(const BoundEstimate& est);

}  // namespace remfiber
