#include "remfiber/report.hpp"

#include "remfiber/bounds.hpp"
#include "remfiber/error.hpp"
#include "remfiber/fiber.hpp"
#include "remfiber/flow.hpp"
#include "remfiber/persistence.hpp"
#include "remfiber/phi.hpp"
#include "remfiber/twisted_cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace remfiber {

namespace {

using nlohmann::json;

template <class T>
void read_field(const json& j, const char* key, T& out) {
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(std::string("config field '") + key + "' has the wrong type");
    }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    read_field(j, key, v);
    out = v;
}

std::string rational_text(const json& v, const char* key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) {
        mpq_class q(v.get<double>());
        return q.get_str();
    }
    throw config_error(std::string("semigroup field '") + key + "' must be a rational number or string");
}

Rational parse_rational(const std::string& text, const char* key) {
    mpq_class q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0) {
        throw config_error(std::string("semigroup field '") + key + "' is not a rational: " + text);
    }
    q.canonicalize();
    return q;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool increasing(const std::vector<double>& g) {
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) return false;
    return true;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw config_error("config must be a JSON object");
    static const std::set<std::string> known = {
        "polynomial", "n_vars",     "t",          "fiber",       "algebraic",  "flow",     "phi",
        "bounds",     "D_max",      "N",          "seed",        "max_dim",    "box_radius", "rips_cap",
        "flow_time",  "flow_tol",   "flow_points", "phi_form",   "phi_points", "quad_tol", "fd_step",
        "probe_s_cap", "t_grid",    "r_grid",     "restarts",    "semigroup",  "output_dir"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw config_error("unknown config field '" + key + "'");
    }
    RunConfig c;
    if (!j.contains("polynomial")) throw config_error("config needs 'polynomial'");
    if (!j.contains("n_vars")) throw config_error("config needs 'n_vars'");
    read_field(j, "polynomial", c.polynomial);
    read_field(j, "n_vars", c.n_vars);
    if (j.contains("t")) read_field(j, "t", c.t);
    if (j.contains("fiber")) read_field(j, "fiber", c.fiber);
    if (j.contains("algebraic")) read_field(j, "algebraic", c.algebraic);
    if (j.contains("flow")) read_field(j, "flow", c.flow);
    if (j.contains("phi")) read_field(j, "phi", c.phi);
    if (j.contains("bounds")) read_field(j, "bounds", c.bounds);
    if (j.contains("D_max")) read_field(j, "D_max", c.D_max);
    if (j.contains("N")) read_field(j, "N", c.N);
    if (j.contains("seed")) read_field(j, "seed", c.seed);
    if (j.contains("max_dim")) read_field(j, "max_dim", c.max_dim);
    if (j.contains("box_radius")) read_optional(j, "box_radius", c.box_radius);
    if (j.contains("rips_cap")) read_optional(j, "rips_cap", c.rips_cap);
    if (j.contains("flow_time")) read_field(j, "flow_time", c.flow_time);
    if (j.contains("flow_tol")) read_field(j, "flow_tol", c.flow_tol);
    if (j.contains("flow_points")) read_field(j, "flow_points", c.flow_points);
    if (j.contains("phi_form")) read_field(j, "phi_form", c.phi_form);
    if (j.contains("phi_points")) read_field(j, "phi_points", c.phi_points);
    if (j.contains("quad_tol")) read_field(j, "quad_tol", c.quad_tol);
    if (j.contains("fd_step")) read_field(j, "fd_step", c.fd_step);
    if (j.contains("probe_s_cap")) read_field(j, "probe_s_cap", c.probe_s_cap);
    if (j.contains("t_grid")) read_field(j, "t_grid", c.t_grid);
    if (j.contains("r_grid")) read_field(j, "r_grid", c.r_grid);
    if (j.contains("restarts")) read_field(j, "restarts", c.restarts);
    if (j.contains("output_dir")) read_field(j, "output_dir", c.output_dir);
    if (j.contains("semigroup") && !j.at("semigroup").is_null()) {
        const json& s = j.at("semigroup");
        if (!s.is_object() || !s.contains("g")) throw config_error("semigroup needs a 'g' list");
        for (const auto& [key, value] : s.items()) {
            if (key != "g" && key != "weight" && key != "m") {
                throw config_error("unknown semigroup field '" + key + "'");
            }
        }
        SemigroupConfig sg;
        read_field(s, "g", sg.g);
        if (s.contains("weight")) sg.weight = rational_text(s.at("weight"), "weight");
        if (s.contains("m")) sg.m = rational_text(s.at("m"), "m");
        c.semigroup = sg;
    }
    return c;
}

json RunConfig::to_json() const {
    json sg = nullptr;
    if (semigroup) sg = {{"g", semigroup->g}, {"weight", semigroup->weight}, {"m", semigroup->m}};
    return {{"polynomial", polynomial},
            {"n_vars", n_vars},
            {"t", t},
            {"fiber", fiber},
            {"algebraic", algebraic},
            {"flow", flow},
            {"phi", phi},
            {"bounds", bounds},
            {"D_max", D_max},
            {"N", N},
            {"seed", seed},
            {"max_dim", max_dim},
            {"box_radius", optional_json(box_radius)},
            {"rips_cap", optional_json(rips_cap)},
            {"flow_time", flow_time},
            {"flow_tol", flow_tol},
            {"flow_points", flow_points},
            {"phi_form", phi_form},
            {"phi_points", phi_points},
            {"quad_tol", quad_tol},
            {"fd_step", fd_step},
            {"probe_s_cap", probe_s_cap},
            {"t_grid", t_grid},
            {"r_grid", r_grid},
            {"restarts", restarts},
            {"semigroup", sg},
            {"output_dir", output_dir}};
}

void RunConfig::validate() const {
    if (polynomial.empty()) throw config_error("empty polynomial");
    if (n_vars < 1 || n_vars > 4) throw config_error("n_vars must be between 1 and 4");
    if (!(fiber || algebraic || flow || phi || bounds)) throw config_error("no mode enabled");
    if (!std::isfinite(t)) throw config_error("t must be finite");
    if (D_max < 0) throw config_error("D_max must be nonnegative");
    if (N < 1) throw config_error("N must be positive");
    if (max_dim < -1 || max_dim > 2) throw config_error("max_dim must be -1 (auto), 0, 1 or 2");
    if (box_radius && !(*box_radius > 0)) throw config_error("box_radius must be positive");
    if (rips_cap && !(*rips_cap > 0)) throw config_error("rips_cap must be positive");
    if (!(flow_tol > 0) || !(quad_tol > 0) || !(fd_step > 0)) throw config_error("tolerances must be positive");
    if (!std::isfinite(flow_time)) throw config_error("flow_time must be finite");
    if (flow_points < 1 || phi_points < 1) throw config_error("flow_points and phi_points must be positive");
    if (!(probe_s_cap > 0)) throw config_error("probe_s_cap must be positive");
    if (bounds) {
        if (t_grid.empty() || !increasing(t_grid)) throw config_error("t_grid must be nonempty and increasing");
        if (r_grid.empty() || !increasing(r_grid) || !(r_grid.front() > 0)) {
            throw config_error("r_grid must be nonempty, positive and increasing");
        }
        if (restarts < 8) throw config_error("restarts must be at least 8");
    }
    if (output_dir.empty()) throw config_error("output_dir must be nonempty");
}

GateVerdict check_homogeneous_gate(const Polynomial& p, double t, std::optional<bool> semigroup_verified) {
    GateVerdict g;
    g.degree = p.is_zero() ? std::nullopt : homogeneity_degree(p);
    g.homogeneous = g.degree && *g.degree >= 1;
    g.t_positive = t > 0;
    const bool backed = g.homogeneous && g.t_positive;
    g.label = backed ? "theorem-backed" : "conjecture-mode";
    if (backed) {
        g.notes.push_back("p is homogeneous of degree " + std::to_string(*g.degree) +
                          " and t > 0: the real-fiber isomorphism is proven in this case");
    } else if (g.homogeneous) {
        g.warnings.push_back("homogeneous p but t <= 0: the proven isomorphism requires t > 0; running in "
                             "conjecture-mode");
    } else {
        g.warnings.push_back("non-homogeneous input: running in conjecture-mode");
    }
    if (semigroup_verified) {
        if (*semigroup_verified) {
            g.notes.push_back("supplied semigroup satisfies g_s^* p = e^{ms} p exactly: semigroup-criterion "
                              "hypotheses partially verified");
        } else {
            g.warnings.push_back("supplied semigroup fails the exact identity g_s^* p = e^{ms} p");
        }
    }
    return g;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::Config:
            case ErrorKind::Domain: return 2;
            case ErrorKind::Nonconvergence: return 3;
            case ErrorKind::Internal: return 4;
        }
    }
    if (dynamic_cast<const json::exception*>(&e)) return 2;
    return 4;
}

namespace {

struct Warnings {
    std::vector<std::string> list;
    void add(const std::string& w) {
        if (std::find(list.begin(), list.end(), w) == list.end()) list.push_back(w);
    }
};

json provenance(const std::string& module, const std::string& op, json params) {
    return {{"module", module}, {"operation", op}, {"params", std::move(params)}};
}

json fiber_meta(const SamplingMetadata& m) {
    return {{"box_radius", m.box_radius},
            {"attempts", m.attempts},
            {"seed", m.seed},
            {"newton_points", m.newton_points},
            {"duplicates_removed", m.duplicates_removed},
            {"marching_points", m.marching_points},
            {"marching_segments", m.marching_segments},
            {"grid_points", m.grid_points},
            {"scanned", m.scanned},
            {"scan_min", m.scanned ? json(m.scan_min) : json(nullptr)},
            {"scan_max", m.scanned ? json(m.scan_max) : json(nullptr)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path.string());
    out << text;
}

}  // namespace

RunResult run(const RunConfig& cfg, bool write_artifacts) {
    cfg.validate();
    const int n = cfg.n_vars;
    const Polynomial p = parse_polynomial(cfg.polynomial, n);
    if (p.is_zero()) throw config_error("the zero polynomial is not allowed");

    std::filesystem::path out_dir(cfg.output_dir);
    if (write_artifacts) std::filesystem::create_directories(out_dir);

    RunResult result;
    Warnings warnings;
    json report;
    json prov = json::array();
    report["config"] = cfg.to_json();
    report["polynomial"] = to_string(p);

    // Exact semigroup check, when supplied.
    std::optional<bool> semigroup_ok;
    if (cfg.semigroup) {
        const std::vector<std::string> params{"a"};
        std::vector<Polynomial> g;
        for (const auto& text : cfg.semigroup->g) g.push_back(parse_polynomial(text, n, params));
        const Rational w = parse_rational(cfg.semigroup->weight, "weight");
        const Rational m = parse_rational(cfg.semigroup->m, "m");
        const SemigroupCheck check = verify_semigroup(p, g, m, w);
        semigroup_ok = check.holds;
        const auto names = default_variable_names(n, n + 1);
        report["semigroup"] = {{"holds", check.holds},
                               {"exponent", check.exponent},
                               {"residual", to_string(check.residual, names)}};
        prov.push_back(provenance("flow_engine", "verify_semigroup",
                                  {{"g", cfg.semigroup->g}, {"weight", cfg.semigroup->weight}, {"m", cfg.semigroup->m}}));
    }

    const GateVerdict gate = check_homogeneous_gate(p, cfg.t, semigroup_ok);
    for (const auto& w : gate.warnings) warnings.add(w);
    report["gate"] = {{"label", gate.label},
                      {"homogeneous", gate.homogeneous},
                      {"degree", gate.degree ? json(*gate.degree) : json(nullptr)},
                      {"t_positive", gate.t_positive},
                      {"notes", gate.notes}};
    prov.push_back(provenance("report_cli", "check_homogeneous_gate", {{"t", cfg.t}}));

    // Algebraic side.
    std::optional<std::vector<int>> algebraic;
    if (cfg.algebraic) {
        const CohomologyReport rep = stabilize(p, cfg.D_max);
        algebraic = rep.dims;
        if (!rep.stabilized) warnings.add("truncation ladder did not stabilize by D_max = " + std::to_string(cfg.D_max));
        const int jac = jacobian_quotient_dim(p, cfg.D_max);
        report["algebraic"] = {{"dims", rep.dims},
                               {"stabilized", rep.stabilized},
                               {"D_max", cfg.D_max},
                               {"jacobian_quotient_dim", jac},
                               {"ladder_levels", rep.ladder.size()}};
        prov.push_back(provenance("twisted_cohomology", "stabilize", {{"D_max", cfg.D_max}}));
        prov.push_back(provenance("twisted_cohomology", "jacobian_quotient_dim", {{"D", cfg.D_max}}));
        if (write_artifacts) write_text(out_dir / "cohomology_ladder.json", dump_report(to_json(rep)));
    }

    // Fiber side; flow and phi reuse the sample.
    std::optional<FiberSample> fs;
    std::optional<std::vector<int>> predicted;
    if (cfg.fiber || cfg.flow || cfg.phi) {
        const double R = cfg.box_radius ? *cfg.box_radius : default_box_radius(p, cfg.t);
        fs = sample_fiber(p, cfg.t, R, cfg.N, cfg.seed);
        prov.push_back(provenance("fiber_topology", "sample_fiber",
                                  {{"t", cfg.t}, {"box_radius", R}, {"N", cfg.N}, {"seed", cfg.seed}}));
    }
    if (cfg.fiber) {
        json fj;
        fj["verdict"] = to_string(fs->verdict);
        fj["points"] = fs->points.size();
        fj["residual_bound"] = fs->residual_bound;
        fj["sampling"] = fiber_meta(fs->meta);
        std::optional<PersistenceDiagram> pd;
        if (fs->verdict == FiberVerdict::PresumedEmpty) {
            warnings.add("fiber presumed empty: no point found and the grid scan stays away from t");
        } else {
            const RipsOptions ropts;
            const FiberSample used = fs->truncated(ropts.max_points);
            const double cap = cfg.rips_cap ? *cfg.rips_cap : suggest_rips_cap(used.points, ropts);
            const int max_dim = cfg.max_dim >= 0 ? cfg.max_dim : std::min(n - 1, 2);
            pd = rips_persistence(used, max_dim, cap, ropts);
            const std::vector<double> multipliers{1, 2, 3, 5, 10};
            json sweep = json::array();
            int default_count = 0;
            double default_eps = 0.0;
            const auto rows = component_sweep(used, landmark_spacing(used.points, cap, ropts), multipliers);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                sweep.push_back({{"multiplier", multipliers[i]}, {"eps", rows[i].first}, {"components", rows[i].second}});
                if (multipliers[i] == 3) {
                    default_eps = rows[i].first;
                    default_count = rows[i].second;
                }
            }
            fj["components"] = {{"eps", default_eps}, {"count", default_count}, {"sweep", sweep}};
            prov.push_back(provenance("fiber_topology", "connected_components",
                                      {{"eps", "3 x median nearest-neighbor distance of the landmarks"}}));
            std::vector<int> essential;
            for (int d = 0; d <= max_dim; ++d) essential.push_back(pd->essential_count(d));
            fj["rips"] = to_json(*pd);
            fj["rips"]["essential"] = essential;
            prov.push_back(provenance("fiber_topology", "rips_persistence", {{"cap", cap}, {"max_dim", max_dim}}));
        }
        const ReducedBetti rb = reduced_betti(*fs, pd);
        predicted = predicted_tempered_dims(rb);
        fj["reduced_betti"] = rb.betti;
        fj["predicted_dims"] = *predicted;
        report["fiber"] = fj;
        prov.push_back(provenance("fiber_topology", "reduced_betti", json::object()));
        if (write_artifacts) {
            std::ofstream out(out_dir / "fiber_points.csv", std::ios::binary);
            write_points_csv(out, *fs);
        }
    }

    // Comparison table.
    json rows = json::array();
    for (int k = 0; k <= n; ++k) {
        ComparisonRow row{k, {}, {}};
        if (predicted) row.predicted = (*predicted)[k];
        if (algebraic) row.algebraic = (*algebraic)[k];
        result.rows.push_back(row);
        json r = {{"k", k},
                  {"predicted", row.predicted ? json(*row.predicted) : json(nullptr)},
                  {"algebraic", row.algebraic ? json(*row.algebraic) : json(nullptr)}};
        r["agree"] = (row.predicted && row.algebraic) ? json(*row.predicted == *row.algebraic) : json(nullptr);
        rows.push_back(r);
    }
    json comparison = {{"rows", rows},
                       {"sources",
                        {{"predicted", "fiber_topology.reduced_betti, shifted by one degree"},
                         {"algebraic", "twisted_cohomology.stabilize"}}}};
    if (predicted && algebraic) {
        result.agreement = *predicted == *algebraic;
        comparison["agreement"] = *result.agreement;
        if (!*result.agreement) {
            comparison["divergence_note"] =
                "expected divergence, not an error: the algebraic twisted cohomology of polynomial forms "
                "computes the reduced cohomology of the complex generic fiber, while the predicted dimensions "
                "come from the real level set p = t";
        }
    } else {
        comparison["agreement"] = nullptr;
    }
    report["comparison"] = comparison;

    const bool sample_nonempty = fs && fs->verdict == FiberVerdict::Nonempty;

    // Flow transport.
    if (cfg.flow) {
        json fj;
        if (!sample_nonempty || !(cfg.t > 0)) {
            fj["skipped"] = "flow needs a nonempty fiber at a level t > 0";
        } else {
            const std::size_t count = std::min<std::size_t>(cfg.flow_points, fs->points.size());
            const std::vector<Point> starts(fs->points.begin(), fs->points.begin() + count);
            const auto trajectories = transport(p, starts, cfg.flow_time, cfg.flow_tol);
            int ok = 0;
            double drift = 0.0, endpoint = 0.0;
            for (const auto& tr : trajectories) {
                if (!tr.ok()) continue;
                ++ok;
                drift = std::max(drift, tr.drift);
                endpoint = std::max(endpoint, std::abs(p.evaluate(tr.end) - cfg.t - cfg.flow_time));
            }
            const int aborted = static_cast<int>(trajectories.size()) - ok;
            if (aborted > 0) warnings.add(std::to_string(aborted) + " flow trajectories aborted");
            fj["trajectories"] = trajectories.size();
            fj["accepted"] = ok;
            fj["max_drift"] = drift;
            fj["max_endpoint_error"] = endpoint;

            // Semigroup property along the first trajectory.
            const ScalarField field(p);
            const double half = 0.5 * cfg.flow_time;
            try {
                const Point whole = flow_map(field, FlowKind::Gradient, starts[0], cfg.flow_time, cfg.flow_tol);
                const Point mid = flow_map(field, FlowKind::Gradient, starts[0], half, cfg.flow_tol);
                const Point two = flow_map(field, FlowKind::Gradient, mid, half, cfg.flow_tol);
                fj["semigroup_discrepancy"] = distance(whole, two);
            } catch (const Error& e) {
                fj["semigroup_discrepancy"] = nullptr;
                warnings.add(std::string("flow semigroup check skipped: ") + e.what());
            }
            if (gate.homogeneous) {
                // Scaled flow for time m ln 2 doubles x.
                const double sigma = *gate.degree * std::log(2.0);
                try {
                    const Point y = flow_map(field, FlowKind::Scaled, starts[0], sigma, cfg.flow_tol);
                    Point twice = starts[0];
                    for (double& v : twice) v *= 2.0;
                    fj["scaling_discrepancy"] = distance(y, twice);
                } catch (const Error& e) {
                    fj["scaling_discrepancy"] = nullptr;
                    warnings.add(std::string("scaled flow check skipped: ") + e.what());
                }
            }
            prov.push_back(provenance("flow_engine", "transport",
                                      {{"s", cfg.flow_time}, {"tol", cfg.flow_tol}, {"points", count}}));
            if (write_artifacts) {
                std::ofstream out(out_dir / "trajectories.csv", std::ios::binary);
                write_trajectories_csv(out, trajectories);
            }
        }
        report["flow"] = fj;
    }

    // Phi map.
    if (cfg.phi) {
        json pj;
        if (!gate.homogeneous || !(cfg.t > 0) || !sample_nonempty) {
            pj["skipped"] = "the phi map is evaluated for homogeneous p, t > 0 and a nonempty fiber";
        } else {
            const std::string text = !cfg.phi_form.empty() ? cfg.phi_form : (n >= 2 ? "x1*dx2" : "x1");
            const PolyForm omega = parse_form(text, n);
            const double lift = std::pow(2.0, 1.0 / *gate.degree);
            std::vector<Point> pts;
            for (std::size_t i = 0; i < std::min<std::size_t>(cfg.phi_points, fs->points.size()); ++i) {
                Point x = fs->points[i];
                for (double& v : x) v *= lift;
                pts.push_back(x);
            }
            const PhiEvaluation ev = phi_eval(omega, p, pts[0], cfg.t, cfg.quad_tol);
            const double residual = phi_cochain_residual(omega, p, pts, cfg.t, cfg.quad_tol, cfg.fd_step);
            pj["form"] = to_string(omega);
            pj["level"] = 2.0 * cfg.t;
            pj["evaluation"] = to_json(ev);
            pj["cochain_residual"] = residual;
            pj["points"] = pts.size();
            prov.push_back(provenance("flow_engine", "phi_cochain_residual",
                                      {{"quad_tol", cfg.quad_tol}, {"h", cfg.fd_step}, {"level", 2.0 * cfg.t}}));
            try {
                const DecayTable table = probe_flow_decay(omega, p, pts[0], cfg.probe_s_cap);
                pj["decay"] = {{"evidence", table.evidence}, {"local_exponents", table.local_exponents}};
                if (write_artifacts) {
                    std::ofstream out(out_dir / "decay_table.csv", std::ios::binary);
                    write_decay_csv(out, table);
                }
                prov.push_back(provenance("flow_engine", "probe_flow_decay", {{"s_cap", cfg.probe_s_cap}}));
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::Internal) throw;
                warnings.add(std::string("decay probe skipped: ") + e.what());
            }
        }
        report["phi"] = pj;
    }

    // Bounds at infinity.
    if (cfg.bounds) {
        json bj;
        try {
            const BoundEstimate est =
                threshold_estimate(p, cfg.t_grid, cfg.r_grid, cfg.seed, {cfg.restarts, cfg.box_radius});
            bj = to_json(est);
            if (est.verdict == BoundVerdict::BoundSuspect) warnings.add("gradient bound at infinity suspect");
            prov.push_back(provenance("infinity_bounds", "threshold_estimate",
                                      {{"t_grid", cfg.t_grid}, {"r_grid", cfg.r_grid}, {"restarts", cfg.restarts},
                                       {"seed", cfg.seed}}));
            if (write_artifacts) write_text(out_dir / "bounds.json", dump_report(bj));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Domain) throw;
            bj = {{"skipped", e.what()}};
            warnings.add(std::string("bounds skipped: ") + e.what());
        }
        report["bounds"] = bj;
    }

    result.warnings = warnings.list;
    report["warnings"] = warnings.list;
    report["provenance"] = prov;
    result.report = report;
    if (write_artifacts) write_text(out_dir / "report.json", dump_report(report));
    return result;
}

}  // namespace remfiber
