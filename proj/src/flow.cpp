#include "remfiber/flow.hpp"

#include "remfiber/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace remfiber {

const char* to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::Ok: return "ok";
        case FlowStatus::CriticalPoint: return "critical-point";
        case FlowStatus::Nonconvergence: return "nonconvergence";
    }
    return "unknown";
}

namespace {

struct CriticalHit {};

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Rhs {
public:
    Rhs(const ScalarField& f, FlowKind kind) : f_(f), kind_(kind) {}

    Point operator()(const Point& x) const {
        Point g = f_.gradient(x);
        const double g2 = dot(g, g);
        if (!(std::sqrt(g2) >= kCriticalGradient)) throw CriticalHit{};
        const double scale = kind_ == FlowKind::Scaled ? f_.value(x) / g2 : 1.0 / g2;
        for (double& v : g) v *= scale;
        return g;
    }

private:
    const ScalarField& f_;
    FlowKind kind_;
};

Point axpy(const Point& x, double h, std::initializer_list<std::pair<double, const Point*>> terms) {
    Point y = x;
    for (const auto& [a, k] : terms) {
        if (a == 0.0) continue;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += h * a * (*k)[i];
    }
    return y;
}

}  // namespace

FlowTrajectory integrate_flow(const ScalarField& field, FlowKind kind, const Point& start, double s, double tol) {
    FlowTrajectory tr;
    tr.kind = kind;
    tr.start = start;
    tr.end = start;
    tr.s = s;
    tr.tol = tol;
    const double p0 = field.value(start);
    tr.steps.push_back(FlowStep{0.0, start, p0});
    if (s == 0.0) return tr;

    auto expected = [&](double sigma) { return kind == FlowKind::Gradient ? p0 + sigma : std::exp(sigma) * p0; };
    auto bound = [&](double sigma) {
        return kind == FlowKind::Gradient ? 100.0 * tol : 100.0 * tol * std::exp(sigma);
    };

    const Rhs f(field, kind);
    const std::size_t n = start.size();
    const double dir = s > 0 ? 1.0 : -1.0;
    double sigma = 0.0;
    Point x = start;
    double h = dir * std::min(std::abs(s), 0.01);
    double err_prev = 1e-4;
    const int max_steps = 200000;

    try {
        Point k1 = f(x);
        for (int step = 0; step < max_steps; ++step) {
            if (dir * (sigma + h - s) > 0) h = s - sigma;
            const Point k2 = f(axpy(x, h, {{a21, &k1}}));
            const Point k3 = f(axpy(x, h, {{a31, &k1}, {a32, &k2}}));
            const Point k4 = f(axpy(x, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const Point k5 = f(axpy(x, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const Point k6 = f(axpy(x, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const Point y = axpy(x, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            const Point k7 = f(y);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e =
                    h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = tol + tol * std::max(std::abs(x[i]), std::abs(y[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / static_cast<double>(n));

            if (err <= 1.0) {
                sigma = (h == s - sigma) ? s : sigma + h;
                x = y;
                k1 = k7;
                const double value = field.value(x);
                tr.steps.push_back(FlowStep{sigma, x, value});
                tr.drift = std::max(tr.drift, std::abs(value - expected(sigma)));
                if (tr.drift > bound(sigma)) {
                    tr.status = FlowStatus::Nonconvergence;
                    tr.message = "level drift exceeded the tolerance bound";
                    break;
                }
                if (sigma == s) break;
                double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
                factor = std::clamp(factor, 0.2, 5.0);
                h *= factor;
                err_prev = std::max(err, 1e-4);
            } else {
                h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5));
            }
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(sigma))) {
                tr.status = FlowStatus::Nonconvergence;
                tr.message = "step size underflow";
                break;
            }
            if (step + 1 == max_steps) {
                tr.status = FlowStatus::Nonconvergence;
                tr.message = "step budget exhausted";
            }
        }
    } catch (const CriticalHit&) {
        tr.status = FlowStatus::CriticalPoint;
        tr.message = "gradient norm below 1e-8 (critical point proximity)";
    }
    tr.end = x;
    return tr;
}

namespace {

std::vector<FlowTrajectory> transport_all(const Polynomial& p, std::span<const Point> points, double s, double tol,
                                          FlowKind kind) {
    if (!(tol > 0)) throw domain_error("transport: tol must be positive");
    if (!std::isfinite(s)) throw domain_error("transport: flow time must be finite");
    const ScalarField field(p);
    std::vector<FlowTrajectory> out;
    out.reserve(points.size());
    for (const Point& x : points) {
        if (static_cast<int>(x.size()) != p.n_vars()) throw domain_error("transport: point dimension mismatch");
        const double v = field.value(x);
        if (!(v > 0)) throw domain_error("transport: start point must satisfy p(x) > 0");
        if (kind == FlowKind::Gradient && s < 0 && -s >= v) {
            throw domain_error("transport: backward time must stay above the zero level");
        }
        out.push_back(integrate_flow(field, kind, x, s, tol));
    }
    return out;
}

}  // namespace

std::vector<FlowTrajectory> transport(const Polynomial& p, std::span<const Point> points, double s, double tol) {
    return transport_all(p, points, s, tol, FlowKind::Gradient);
}

std::vector<FlowTrajectory> scaled_transport(const Polynomial& p, std::span<const Point> points, double s,
                                             double tol) {
    return transport_all(p, points, s, tol, FlowKind::Scaled);
}

Point flow_map(const ScalarField& field, FlowKind kind, const Point& x, double s, double tol) {
    FlowTrajectory tr = integrate_flow(field, kind, x, s, tol);
    if (tr.status == FlowStatus::CriticalPoint) throw domain_error("flow: " + tr.message);
    if (!tr.ok()) throw nonconvergence_error("flow: " + tr.message);
    return tr.end;
}

SemigroupCheck verify_semigroup(const Polynomial& p, std::span<const Polynomial> g, const Rational& m,
                                const Rational& w) {
    const int n = p.n_vars();
    if (static_cast<int>(g.size()) != n) throw config_error("semigroup: need one component per variable");
    for (const Polynomial& gi : g) {
        if (gi.n_vars() != n + 1) throw config_error("semigroup: components must be polynomials in x1..xn and a");
    }
    if (w <= 0) throw config_error("semigroup: weight w must be positive");
    const Rational k = m / w;
    if (k < 0 || k.get_den() != 1) {
        throw config_error("semigroup: m/w = " + k.get_str() +
                           " is not a nonnegative integer; choose w so that a = e^{ws} has an integral power e^{ms}");
    }
    SemigroupCheck out;
    out.exponent = static_cast<int>(k.get_num().get_si());
    Exponent e(n + 1, 0);
    e[n] = out.exponent;
    out.residual = compose(p, g) - Polynomial::monomial(e, Rational(1)) * p.extended(n + 1);
    out.holds = out.residual.is_zero();
    return out;
}

void write_trajectories_csv(std::ostream& out, std::span<const FlowTrajectory> trajectories) {
    const std::size_t n = trajectories.empty() ? 0 : trajectories.front().start.size();
    out << "trajectory,sigma,";
    for (std::size_t i = 0; i < n; ++i) out << "x" << (i + 1) << ",";
    out << "p\n";
    char buf[64];
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        for (const FlowStep& st : trajectories[t].steps) {
            out << t;
            std::snprintf(buf, sizeof buf, ",%.17g", st.sigma);
            out << buf;
            for (double v : st.x) {
                std::snprintf(buf, sizeof buf, ",%.17g", v);
                out << buf;
            }
            std::snprintf(buf, sizeof buf, ",%.17g\n", st.value);
            out << buf;
        }
    }
}

}  // namespace remfiber
