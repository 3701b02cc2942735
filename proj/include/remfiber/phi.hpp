#pragma once

// Pointwise values of the map omega -> (e^{-p} omega, Phi_2 omega), where
// Phi_2 omega = -int_1^infty mu_s^*(e^{-p} i_R omega) ds/s and mu_s(x) = s x,
// for homogeneous p on the region p > t.

#include "remfiber/flow.hpp"
#include "remfiber/form.hpp"

#include "json.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace remfiber {

struct PhiComponent {
    IndexSet subset = 0;
    double value = 0.0;
};

struct PhiEvaluation {
    Point x;
    double quad_tol = 0.0;
    /// Integration runs over u = log s in [0, u_max]; s_max = e^{u_max}.
    double u_max = 0.0;
    double s_max = 1.0;
    /// max over components of |integrand| at u_max.
    double tail_integrand = 0.0;
    /// Components of Phi_2 omega (degree k-1, lexicographic subsets); empty
    /// for a 0-form.
    std::vector<PhiComponent> phi2;
    /// Components of e^{-p} omega (degree k).
    std::vector<PhiComponent> phi1;

    double phi2_at(IndexSet s) const;
    double phi1_at(IndexSet s) const;
};

/// Component `subset` of mu_s^*(e^{-p} i_R omega) at x: the integrand of
/// Phi_2 against ds/s (without the leading minus sign).
double phi_integrand(const PolyForm& omega, const Polynomial& p, const Point& x, double s, IndexSet subset);

/// Requires p homogeneous of degree m >= 1 and p(x) > t > 0.
PhiEvaluation phi_eval(const PolyForm& omega, const Polynomial& p, const Point& x, double t, double quad_tol);

/// max over points and components of |Phi_2(d_p omega) + d Phi_2 omega -
/// e^{-p} omega|, with d Phi_2 omega from five-point central differences
/// of step h.
double phi_cochain_residual(const PolyForm& omega, const Polynomial& p, std::span<const Point> points, double t,
                            double quad_tol, double h);

struct DecayRow {
    double sigma = 0.0;
    /// Components of g_sigma^*(e^{-p} i_v omega) at x, v the scaled flow
    /// field p grad p / |grad p|^2.
    std::vector<double> components;
    double magnitude = 0.0;  // max |component|
};

struct DecayTable {
    Point x;
    std::vector<IndexSet> subsets;
    std::vector<DecayRow> rows;
    /// d log|I| / d log sigma between consecutive nonzero rows.
    std::vector<double> local_exponents;
    std::string evidence;
};

struct ProbeOptions {
    int grid_points = 12;  // geometric grid on (0, s_cap]
    double flow_tol = 1e-12;
};

/// Diagnostic only: tabulates g_sigma^*(e^{-p} i_v omega) at x along the
/// scaled flow, pulling back through a forward-difference Jacobian of the
/// flow map.
DecayTable probe_flow_decay(const PolyForm& omega, const Polynomial& p, const Point& x, double s_cap,
                                       const ProbeOptions& opts = {});

void write_decay_csv(std::ostream& out, const DecayTable& table);

nlohmann::json to_json(const PhiEvaluation& ev);
nlohmann::json to_json(const DecayTable& table);

}  // namespace remfiber
