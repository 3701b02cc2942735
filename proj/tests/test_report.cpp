#include "doctest.h"

#include "remfiber/error.hpp"
#include "remfiber/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace remfiber;
using nlohmann::json;

namespace {

Polynomial P(const char* text, int n) { return parse_polynomial(text, n); }

RunConfig config(const char* poly, int n, double t = 1.0) {
    RunConfig cfg;
    cfg.polynomial = poly;
    cfg.n_vars = n;
    cfg.t = t;
    return cfg;
}

int count_containing(const std::vector<std::string>& list, const std::string& needle) {
    return static_cast<int>(
        std::count_if(list.begin(), list.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; }));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_SUITE("report_cli") {

TEST_CASE("gate verdicts over the four combinations") {
    GateVerdict g = check_homogeneous_gate(P("x1^2 + x2^2", 2), 1.0);
    CHECK(g.label == "theorem-backed");
    CHECK(g.warnings.empty());
    g = check_homogeneous_gate(P("x1^2 + x2^2", 2), -1.0);
    CHECK(g.label == "conjecture-mode");
    CHECK(count_containing(g.warnings, "t > 0") == 1);
    g = check_homogeneous_gate(P("x1^2 - x1 - x2", 2), 1.0);
    CHECK(g.label == "conjecture-mode");
    CHECK(count_containing(g.warnings, "non-homogeneous") == 1);
    g = check_homogeneous_gate(P("x1^2 - x1 - x2", 2), -1.0);
    CHECK(g.label == "conjecture-mode");
    CHECK_FALSE(g.t_positive);
    CHECK_FALSE(g.homogeneous);

    g = check_homogeneous_gate(P("x1^2 - x1 - x2", 2), 1.0, true);
    CHECK(g.label == "conjecture-mode");
    CHECK(count_containing(g.notes, "partially verified") == 1);
    g = check_homogeneous_gate(P("x1^2 - x1 - x2", 2), 1.0, false);
    CHECK(count_containing(g.warnings, "fails") == 1);

    // Constants are not homogeneous of positive degree.
    CHECK(check_homogeneous_gate(P("4", 2), 1.0).label == "conjecture-mode");
}

TEST_CASE("configuration parsing and errors") {
    json j = {{"polynomial", "x1^2 + x2^2"}, {"n_vars", 2}, {"t", 1.5}, {"seed", 9}};
    RunConfig cfg = RunConfig::from_json(j);
    CHECK(cfg.t == 1.5);
    CHECK(cfg.seed == 9);
    CHECK(cfg.D_max == 8);
    CHECK(RunConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());

    try {
        RunConfig::from_json({{"polynomial", "x1"}, {"n_vars", 1}, {"tee", 1}});
        FAIL("unknown key accepted");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == 2);
    }
    try {
        RunConfig::from_json({{"polynomial", "x1"}, {"n_vars", "one"}});
        FAIL("ill-typed value accepted");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == 2);
    }
    CHECK_THROWS_AS(config("x1", 5).validate(), Error);
    RunConfig none = config("x1", 1);
    none.fiber = none.algebraic = none.flow = none.phi = none.bounds = false;
    CHECK_THROWS_AS(none.validate(), Error);
    try {
        run(config("x1 +", 1), false);
        FAIL("parse error not raised");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == 2);
    }
}

TEST_CASE("exit codes by error kind") {
    CHECK(exit_code_for(config_error("x")) == 2);
    CHECK(exit_code_for(domain_error("x")) == 2);
    CHECK(exit_code_for(nonconvergence_error("x")) == 3);
    CHECK(exit_code_for(std::runtime_error("x")) == 4);
}

TEST_CASE("circle run agrees and writes every artifact") {
    RunConfig cfg = config("x1^2 + x2^2", 2);
    const auto dir = std::filesystem::temp_directory_path() / "remfiber_test_circle";
    std::filesystem::remove_all(dir);
    cfg.output_dir = dir.string();
    const RunResult r = run(cfg);
    REQUIRE(r.agreement.has_value());
    CHECK(*r.agreement);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[2].predicted == 1);
    CHECK(r.rows[2].algebraic == 1);
    CHECK(r.report["gate"]["label"] == "theorem-backed");
    CHECK(r.report["fiber"]["reduced_betti"] == json({0, 0, 1}));
    CHECK(r.report["fiber"]["components"]["count"] == 1);
    CHECK(r.report["fiber"]["components"]["sweep"].size() == 5);
    CHECK(r.report["comparison"]["agreement"] == true);
    CHECK_FALSE(r.report["comparison"].contains("divergence_note"));
    for (const char* f : {"report.json", "fiber_points.csv", "trajectories.csv", "cohomology_ladder.json",
                          "bounds.json", "decay_table.csv"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    CHECK(slurp(dir / "report.json") == dump_report(r.report));
    for (const auto& entry : r.report["provenance"]) {
        CHECK(entry.contains("module"));
        CHECK(entry.contains("params"));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("hyperbola run reports the expected divergence") {
    RunConfig cfg = config("x1^2 - x2^2", 2);
    cfg.flow = cfg.phi = cfg.bounds = false;
    const RunResult r = run(cfg, false);
    REQUIRE(r.agreement.has_value());
    CHECK_FALSE(*r.agreement);
    CHECK(r.report["fiber"]["predicted_dims"] == json({0, 1, 0}));
    CHECK(r.report["algebraic"]["dims"] == json({0, 0, 1}));
    CHECK(r.report["fiber"]["components"]["count"] == 2);
    const std::string note = r.report["comparison"]["divergence_note"];
    CHECK(note.find("complex") != std::string::npos);
    CHECK(note.find("real") != std::string::npos);
}

TEST_CASE("empty fiber run warns exactly once") {
    RunConfig cfg = config("-(x1^2 + x2^2)", 2);
    const RunResult r = run(cfg, false);
    CHECK(r.report["fiber"]["predicted_dims"] == json({1, 0, 0}));
    std::vector<std::string> warnings = r.report["warnings"];
    CHECK(count_containing(warnings, "presumed empty") == 1);
    for (std::size_t i = 0; i < warnings.size(); ++i)
        for (std::size_t j = i + 1; j < warnings.size(); ++j) CHECK(warnings[i] != warnings[j]);
    CHECK(r.report["flow"].contains("skipped"));
}

TEST_CASE("non-homogeneous run with the semigroup supplied") {
    RunConfig cfg = config("x1^2 - x1 - x2", 2, 5.0);
    cfg.box_radius = 6.0;
    cfg.flow = cfg.phi = false;
    cfg.bounds = false;
    cfg.semigroup = SemigroupConfig{{"a*x1", "a^2*x1 - a*x1 + a^2*x2"}, "1/2", "1"};
    const RunResult r = run(cfg, false);
    CHECK(r.report["semigroup"]["holds"] == true);
    CHECK(r.report["semigroup"]["residual"] == "0");
    CHECK(r.report["gate"]["label"] == "conjecture-mode");
    std::vector<std::string> warnings = r.report["warnings"];
    CHECK(count_containing(warnings, "non-homogeneous") == 1);
}

TEST_CASE("reports are byte-identical for identical configs") {
    RunConfig cfg = config("x1^2 + x2^2 + x1*x2", 2, 2.0);
    cfg.bounds = false;
    cfg.N = 400;
    const std::string a = dump_report(run(cfg, false).report);
    const std::string b = dump_report(run(cfg, false).report);
    CHECK(a == b);
    cfg.seed = 2;
    CHECK(dump_report(run(cfg, false).report) != a);
}

}  // TEST_SUITE
