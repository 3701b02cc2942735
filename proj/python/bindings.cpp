#include "remfiber/bounds.hpp"
#include "remfiber/error.hpp"
#include "remfiber/fiber.hpp"
#include "remfiber/flow.hpp"
#include "remfiber/persistence.hpp"
#include "remfiber/phi.hpp"
#include "remfiber/report.hpp"
#include "remfiber/twisted_cohomology.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace remfiber;

namespace {

Rational rational(const std::string& text) {
    Rational q(text);
    q.canonicalize();
    return q;
}

FiberSample sample(const std::string& poly, int n, double t, int N, std::uint64_t seed,
                   std::optional<double> box_radius) {
    const Polynomial p = parse_polynomial(poly, n);
    return sample_fiber(p, t, box_radius ? *box_radius : default_box_radius(p, t), N, seed);
}

}  // namespace

PYBIND11_MODULE(_remfiber, m) {
    m.doc() = "Twisted de Rham cohomology and remote-fiber laboratory";
    py::register_exception<Error>(m, "RemfiberError", PyExc_RuntimeError);

    m.def("canonical", [](const std::string& poly, int n) { return to_string(parse_polynomial(poly, n)); },
          py::arg("poly"), py::arg("n_vars"));

    m.def(
        "stabilize_json",
        [](const std::string& poly, int n, int D_max) {
            return to_json(stabilize(parse_polynomial(poly, n), D_max)).dump();
        },
        py::arg("poly"), py::arg("n_vars"), py::arg("D_max"));

    m.def(
        "jacobian_quotient_dim",
        [](const std::string& poly, int n, int D) { return jacobian_quotient_dim(parse_polynomial(poly, n), D); },
        py::arg("poly"), py::arg("n_vars"), py::arg("D"));

    m.def(
        "sample_fiber",
        [](const std::string& poly, int n, double t, int N, std::uint64_t seed, std::optional<double> box_radius) {
            const FiberSample fs = sample(poly, n, t, N, seed, box_radius);
            py::dict d;
            d["points"] = fs.points;
            d["verdict"] = to_string(fs.verdict);
            d["residual_bound"] = fs.residual_bound;
            return d;
        },
        py::arg("poly"), py::arg("n_vars"), py::arg("t"), py::arg("N") = 1500, py::arg("seed") = 1,
        py::arg("box_radius") = py::none());

    m.def(
        "reduced_betti",
        [](const std::string& poly, int n, double t, int N, std::uint64_t seed, std::optional<double> box_radius,
           std::optional<double> cap) {
            const FiberSample fs = sample(poly, n, t, N, seed, box_radius);
            std::optional<PersistenceDiagram> pd;
            if (fs.verdict == FiberVerdict::Nonempty) {
                const double c = cap ? *cap : suggest_rips_cap(fs.points);
                pd = rips_persistence(fs, std::min(n - 1, 2), c);
            }
            return reduced_betti(fs, pd).betti;
        },
        py::arg("poly"), py::arg("n_vars"), py::arg("t"), py::arg("N") = 1500, py::arg("seed") = 1,
        py::arg("box_radius") = py::none(), py::arg("cap") = py::none());

    m.def(
        "transport",
        [](const std::string& poly, int n, const std::vector<Point>& points, double s, double tol, bool scaled) {
            const Polynomial p = parse_polynomial(poly, n);
            const auto trs = scaled ? scaled_transport(p, points, s, tol) : transport(p, points, s, tol);
            py::list out;
            for (const auto& tr : trs) {
                py::dict d;
                d["end"] = tr.end;
                d["drift"] = tr.drift;
                d["status"] = to_string(tr.status);
                d["steps"] = tr.steps.size();
                out.append(d);
            }
            return out;
        },
        py::arg("poly"), py::arg("n_vars"), py::arg("points"), py::arg("s"), py::arg("tol") = 1e-8,
        py::arg("scaled") = false);

    m.def(
        "verify_semigroup",
        [](const std::string& poly, int n, const std::vector<std::string>& g, const std::string& m_,
           const std::string& w) {
            const std::vector<std::string> params{"a"};
            std::vector<Polynomial> comps;
            for (const auto& gi : g) comps.push_back(parse_polynomial(gi, n, params));
            const SemigroupCheck c =
                verify_semigroup(parse_polynomial(poly, n), comps, rational(m_), rational(w));
            const auto names = default_variable_names(n, n + 1);
            return py::make_tuple(c.holds, to_string(c.residual, names));
        },
        py::arg("poly"), py::arg("n_vars"), py::arg("g"), py::arg("m"), py::arg("w"));

    m.def(
        "phi_eval",
        [](const std::string& form, const std::string& poly, int n, const Point& x, double t, double quad_tol) {
            const PhiEvaluation ev = phi_eval(parse_form(form, n), parse_polynomial(poly, n), x, t, quad_tol);
            return to_json(ev).dump();
        },
        py::arg("form"), py::arg("poly"), py::arg("n_vars"), py::arg("x"), py::arg("t"),
        py::arg("quad_tol") = 1e-12);

    m.def(
        "phi_cochain_residual",
        [](const std::string& form, const std::string& poly, int n, const std::vector<Point>& points, double t,
           double quad_tol, double h) {
            return phi_cochain_residual(parse_form(form, n), parse_polynomial(poly, n), points, t, quad_tol, h);
        },
        py::arg("form"), py::arg("poly"), py::arg("n_vars"), py::arg("points"), py::arg("t"),
        py::arg("quad_tol") = 1e-12, py::arg("h") = 1e-4);

    m.def(
        "levelset_min_gradnorm",
        [](const std::string& poly, int n, double t, int restarts, std::uint64_t seed,
           std::optional<double> box_radius) {
            return levelset_min_gradnorm(parse_polynomial(poly, n), t, restarts, seed, GradNormOptions{box_radius})
                .value;
        },
        py::arg("poly"), py::arg("n_vars"), py::arg("t"), py::arg("restarts") = 32, py::arg("seed") = 1,
        py::arg("box_radius") = py::none());

    m.def(
        "fit_puiseux_exponent",
        [](const std::vector<std::pair<double, double>>& samples, std::size_t min_samples, double min_decades) {
            const PuiseuxFit f = fit_puiseux_exponent(samples, FitOptions{min_samples, min_decades});
            return py::make_tuple(f.c, f.alpha, f.quality);
        },
        py::arg("samples"), py::arg("min_samples") = 5, py::arg("min_decades") = 1.0);

    m.def(
        "run_json",
        [](const std::string& config, bool write_artifacts) {
            const auto cfg = RunConfig::from_json(nlohmann::json::parse(config));
            return dump_report(run(cfg, write_artifacts).report);
        },
        py::arg("config"), py::arg("write_artifacts") = false);
}
