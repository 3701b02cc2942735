#pragma once

// End-to-end runs: configuration, orchestration of the modules, and the
// comparison of fiber-side and algebraic-side dimensions.

#include "remfiber/polynomial.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace remfiber {

struct SemigroupConfig {
    std::vector<std::string> g;  // components in x1..xn and a
    std::string weight = "1";    // a stands for e^{weight * s}
    std::string m = "1";         // g_s^* p = e^{m s} p
};

struct RunConfig {
    std::string polynomial;
    int n_vars = 0;
    double t = 1.0;

    bool fiber = true;
    bool algebraic = true;
    bool flow = true;
    bool phi = true;
    bool bounds = true;

    int D_max = 8;
    int N = 1500;
    std::uint64_t seed = 1;
    int max_dim = -1;  // -1: min(n - 1, 2)
    std::optional<double> box_radius;
    std::optional<double> rips_cap;

    double flow_time = 3.0;
    double flow_tol = 1e-8;
    int flow_points = 50;

    std::string phi_form;  // empty: x1*dx2 (x1 when n = 1)
    int phi_points = 10;
    double quad_tol = 1e-12;
    double fd_step = 1e-4;
    double probe_s_cap = 5.0;

    std::vector<double> t_grid{1, 2, 4, 8};
    std::vector<double> r_grid{1, 2, 4, 8, 16, 32};
    int restarts = 32;

    std::optional<SemigroupConfig> semigroup;
    std::string output_dir = "remfiber_out";

    /// Unknown keys and ill-typed values are configuration errors.
    static RunConfig from_json(const nlohmann::json& j);
    /// Every field, defaults included.
    nlohmann::json to_json() const;
    void validate() const;
};

struct GateVerdict {
    std::string label;  // "theorem-backed" or "conjecture-mode"
    bool homogeneous = false;
    std::optional<int> degree;
    bool t_positive = false;
    std::vector<std::string> notes;
    std::vector<std::string> warnings;
};

/// theorem-backed iff p is homogeneous and t > 0. `semigroup_verified`
/// reports the outcome of an exact semigroup check, when one was supplied.
GateVerdict check_homogeneous_gate(const Polynomial& p, double t, std::optional<bool> semigroup_verified = {});

struct ComparisonRow {
    int k = 0;  // cohomological degree
    std::optional<int> predicted;
    std::optional<int> algebraic;
};

struct RunResult {
    nlohmann::json report;
    std::vector<ComparisonRow> rows;
    std::optional<bool> agreement;
    std::vector<std::string> warnings;
};

/// Runs the enabled modes in dependency order. With write_artifacts the
/// output directory receives report.json, fiber_points.csv,
/// trajectories.csv, cohomology_ladder.json, bounds.json (and
/// decay_table.csv), each only when its mode ran.
RunResult run(const RunConfig& config, bool write_artifacts = true);

/// Byte-stable serialization used for report.json.
std::string dump_report(const nlohmann::json& report);

/// 0 ok, 2 configuration or domain error, 3 nonconvergence, 4 internal.
int exit_code_for(const std::exception& e);

}  // namespace remfiber
