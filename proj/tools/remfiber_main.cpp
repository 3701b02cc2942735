// remfiber_run run --config cfg.json [--t 2 --seed 7 ...]

#include "remfiber/error.hpp"
#include "remfiber/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace {

// Knobs that may override the config file; unset ones leave it alone.
struct Overrides {
    std::optional<std::string> polynomial, phi_form, output_dir;
    std::optional<int> n_vars, D_max, N, max_dim, flow_points, phi_points, restarts;
    std::optional<double> t, box_radius, rips_cap, flow_time, flow_tol, quad_tol, fd_step, probe_s_cap;
    std::optional<std::uint64_t> seed;
    std::optional<bool> fiber, algebraic, flow, phi, bounds;
    std::optional<std::vector<double>> t_grid, r_grid;
};

template <class T>
void apply(nlohmann::json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twisted cohomology vs remote fiber laboratory"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "Run the configured modes and write the report");
    std::string config_path;
    bool quiet = false;
    Overrides o;
    run->add_option("--config", config_path, "Flat JSON configuration file")->required();
    run->add_flag("--quiet", quiet, "Do not print the report to stdout");
    run->add_option("--polynomial", o.polynomial);
    run->add_option("--n-vars", o.n_vars);
    run->add_option("--t", o.t);
    run->add_option("--fiber", o.fiber);
    run->add_option("--algebraic", o.algebraic);
    run->add_option("--flow", o.flow);
    run->add_option("--phi", o.phi);
    run->add_option("--bounds", o.bounds);
    run->add_option("--D-max", o.D_max);
    run->add_option("--N", o.N);
    run->add_option("--seed", o.seed);
    run->add_option("--max-dim", o.max_dim);
    run->add_option("--box-radius", o.box_radius);
    run->add_option("--rips-cap", o.rips_cap);
    run->add_option("--flow-time", o.flow_time);
    run->add_option("--flow-tol", o.flow_tol);
    run->add_option("--flow-points", o.flow_points);
    run->add_option("--phi-form", o.phi_form);
    run->add_option("--phi-points", o.phi_points);
    run->add_option("--quad-tol", o.quad_tol);
    run->add_option("--fd-step", o.fd_step);
    run->add_option("--probe-s-cap", o.probe_s_cap);
    run->add_option("--t-grid", o.t_grid);
    run->add_option("--r-grid", o.r_grid);
    run->add_option("--restarts", o.restarts);
    run->add_option("--output-dir", o.output_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        std::ifstream in(config_path);
        if (!in) throw remfiber::config_error("cannot open config file " + config_path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw remfiber::config_error(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw remfiber::config_error("config must be a JSON object");
        apply(j, "polynomial", o.polynomial);
        apply(j, "n_vars", o.n_vars);
        apply(j, "t", o.t);
        apply(j, "fiber", o.fiber);
        apply(j, "algebraic", o.algebraic);
        apply(j, "flow", o.flow);
        apply(j, "phi", o.phi);
        apply(j, "bounds", o.bounds);
        apply(j, "D_max", o.D_max);
        apply(j, "N", o.N);
        apply(j, "seed", o.seed);
        apply(j, "max_dim", o.max_dim);
        apply(j, "box_radius", o.box_radius);
        apply(j, "rips_cap", o.rips_cap);
        apply(j, "flow_time", o.flow_time);
        apply(j, "flow_tol", o.flow_tol);
        apply(j, "flow_points", o.flow_points);
        apply(j, "phi_form", o.phi_form);
        apply(j, "phi_points", o.phi_points);
        apply(j, "quad_tol", o.quad_tol);
        apply(j, "fd_step", o.fd_step);
        apply(j, "probe_s_cap", o.probe_s_cap);
        apply(j, "t_grid", o.t_grid);
        apply(j, "r_grid", o.r_grid);
        apply(j, "restarts", o.restarts);
        apply(j, "output_dir", o.output_dir);

        const auto cfg = remfiber::RunConfig::from_json(j);
        const auto result = remfiber::run(cfg);
        if (!quiet) std::cout << remfiber::dump_report(result.report);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return remfiber::exit_code_for(e);
    }
}
