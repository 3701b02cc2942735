#pragma once

// Vietoris-Rips persistence over the field with two elements, and the
// reduced Betti numbers of a fiber sample read off from it.

#include "remfiber/fiber.hpp"

#include "json.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace remfiber {

struct Bar {
    double birth = 0.0;
    double death = INFINITY;  // infinite: survives to the cap (essential)

    bool essential() const { return std::isinf(death); }
    friend bool operator==(const Bar&, const Bar&) = default;
    friend auto operator<=>(const Bar&, const Bar&) = default;
};

struct PersistenceDiagram {
    int max_dim = 0;
    double cap = 0.0;
    /// bars[d] for d = 0..max_dim; zero-length bars are omitted.
    std::vector<std::vector<Bar>> bars;
    std::size_t input_points = 0;
    std::size_t complex_vertices = 0;  // landmarks actually used
    double covering_radius = 0.0;      // of the landmarks over the input
    std::size_t simplices = 0;

    int essential_count(int dim) const;
};

struct RipsOptions {
    /// Landmarks are added until every input point lies within
    /// cover_fraction * cap of one.
    double cover_fraction = 0.15;
    std::size_t min_landmarks = 48;
    std::size_t max_landmarks = 400;
    std::size_t max_points = 5000;
};

/// Greedy farthest-point ordering starting at point 0; stops once the
/// covering radius reaches `cover` (after at least min_count points)
/// or at max_count points. Returns the chosen indices and covering radius.
std::pair<std::vector<std::size_t>, double> maxmin_landmarks(std::span<const Point> points, double cover,
                                                             std::size_t min_count, std::size_t max_count);

/// Rips filtration of the (landmark) point cloud up to `cap`, with
/// simplices through dimension max_dim + 1, reduced with the clearing
/// optimization. Bars alive at the cap are essential.
PersistenceDiagram rips_persistence(std::span<const Point> points, int max_dim, double cap,
                                    const RipsOptions& opts = {});
PersistenceDiagram rips_persistence(const FiberSample& fs, int max_dim, double cap,
                                    const RipsOptions& opts = {});

/// 1.5 x the largest minimum-spanning-tree edge, over the max_landmarks
/// maxmin landmarks, that is within 10x the median MST edge: large enough
/// to bridge sampling gaps, small enough to keep separated pieces apart.
/// Never below 5x the landmark covering radius.
double suggest_rips_cap(std::span<const Point> points, const RipsOptions& opts = {});

/// Median nearest-neighbor distance among the landmarks rips_persistence
/// would use at this cap. Unlike the raw sample, the landmarks are evenly
/// spread, so this is a usable link radius scale.
double landmark_spacing(std::span<const Point> points, double cap, const RipsOptions& opts = {});

/// Reduced Betti numbers indexed k = -1, 0, ..., n-1 (entry k+1).
struct ReducedBetti {
    std::vector<int> betti;

    int at(int k) const { return betti.at(static_cast<std::size_t>(k + 1)); }
};

/// Empty fiber: (1, 0, ..., 0). Otherwise beta_{-1} = 0, beta_0 = essential
/// 0-bars - 1, beta_k = essential k-bars; dimensions above the diagram's
/// max_dim are reported as 0.
ReducedBetti reduced_betti(const FiberSample& fs, const std::optional<PersistenceDiagram>& pd);

/// Entry k+1 of the result is beta_k, for k = -1..n-1.
std::vector<int> predicted_tempered_dims(const ReducedBetti& rb);

nlohmann::json to_json(const PersistenceDiagram& pd);

}  // namespace remfiber
