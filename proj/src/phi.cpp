#include "remfiber/phi.hpp"

#include "remfiber/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <utility>
#include <ostream>

namespace remfiber {

double PhiEvaluation::phi2_at(IndexSet s) const {
    for (const auto& c : phi2)
        if (c.subset == s) return c.value;
    return 0.0;
}

double PhiEvaluation::phi1_at(IndexSet s) const {
    for (const auto& c : phi1)
        if (c.subset == s) return c.value;
    return 0.0;
}

namespace {

// Scaled contraction mu_s^* i_R omega, one polynomial in (x, s) per
// subset of size k-1, plus what is needed to bound it for s >= 1.
struct PhiKernel {
    int n = 0;
    int k = 0;
    int m = 0;
    NumericPolynomial p;
    std::vector<IndexSet> subsets;
    std::vector<NumericPolynomial> eta;
    std::vector<NumericPolynomial> envelope;  // sum |c| |x|^e, s set to 1
    int s_degree = 0;

    PhiKernel(const PolyForm& omega, const Polynomial& poly) : n(poly.n_vars()), k(omega.degree()), p(poly) {
        if (omega.n_vars() != n || omega.n_coeff_vars() != n) {
            throw domain_error("phi: form and polynomial must live on the same space, without parameters");
        }
        const auto deg = homogeneity_degree(poly);
        if (!deg || *deg < 1) throw domain_error("phi: p must be homogeneous of positive degree");
        m = *deg;
        if (k == 0) return;
        subsets = subsets_of_size(n, k - 1);
        const PolyForm pulled = pullback_scaling(interior_product_euler(omega), FormalScaling::uniform(n));
        for (IndexSet s : subsets) {
            const Polynomial c = pulled.is_zero() ? Polynomial(n + 1) : pulled.component(s);
            eta.emplace_back(c);
            Polynomial bound(n);
            for (const auto& [e, coef] : c.terms()) {
                s_degree = std::max(s_degree, e[n]);
                Exponent ex(e.begin(), e.begin() + n);
                bound.add_term(ex, abs(coef));
            }
            envelope.emplace_back(bound);
        }
    }

    // Values per u: the components eta(x, e^u) exp(-e^{mu} p(x)), then the
    // coefficient-free terms e^{ju} exp(-e^{mu} p(x)) for j <= s_degree.
    // The latter only steer mesh refinement, so it cannot stay coarse where
    // a coefficient of eta happens to vanish.
    std::size_t width() const { return eta.size() + static_cast<std::size_t>(s_degree) + 1; }

    void integrand(const Point& xs, double px, double u, std::vector<double>& out) const {
        Point y = xs;
        y.back() = std::exp(u);
        const double w = std::exp(-std::exp(m * u) * px);
        for (std::size_t j = 0; j < eta.size(); ++j) out[j] = w == 0.0 ? 0.0 : eta[j](y) * w;
        for (int j = 0; j <= s_degree; ++j) out[eta.size() + j] = w == 0.0 ? 0.0 : std::exp(j * u) * w;
    }
};

using Leaves = std::vector<std::pair<double, double>>;

struct Quadrature {
    const PhiKernel& K;
    Point xs;
    double px;
    int depth_hits = 0;
    Leaves* leaves = nullptr;  // accepted subintervals, when recording

    using Vec = std::vector<double>;

    Vec f(double u) const {
        Vec out(K.width());
        K.integrand(xs, px, u, out);
        return out;
    }

    static double maxdiff(const Vec& a, const Vec& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
        return d;
    }

    static Vec simpson(double a, double b, const Vec& fa, const Vec& fm, const Vec& fb) {
        Vec s(fa.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = (b - a) / 6.0 * (fa[i] + 4.0 * fm[i] + fb[i]);
        return s;
    }

    Vec adapt(double a, double b, const Vec& fa, const Vec& fm, const Vec& fb, const Vec& whole, double eps,
              int depth) {
        const double m = 0.5 * (a + b);
        const Vec fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
        const Vec left = simpson(a, m, fa, fl, fm), right = simpson(m, b, fm, fr, fb);
        Vec both(left.size());
        for (std::size_t i = 0; i < both.size(); ++i) both[i] = left[i] + right[i];
        const double err = maxdiff(both, whole);
        if (err <= 15.0 * eps || depth <= 0) {
            if (err > 15.0 * eps) ++depth_hits;
            if (leaves) leaves->emplace_back(a, b);
            for (std::size_t i = 0; i < both.size(); ++i) both[i] += (both[i] - whole[i]) / 15.0;
            return both;
        }
        Vec l = adapt(a, m, fa, fl, fm, left, 0.5 * eps, depth - 1);
        const Vec r = adapt(m, b, fm, fr, fb, right, 0.5 * eps, depth - 1);
        for (std::size_t i = 0; i < l.size(); ++i) l[i] += r[i];
        return l;
    }

    Vec integrate(double U, double tol) {
        const int panels = 16;
        Vec total(K.width(), 0.0);
        const double h = U / panels;
        for (int i = 0; i < panels; ++i) {
            const double a = i * h, b = (i + 1) * h;
            const Vec fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
            const Vec piece = adapt(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol / panels, 48);
            for (std::size_t j = 0; j < total.size(); ++j) total[j] += piece[j];
        }
        return total;
    }

    // The same corrected Simpson pairs on a fixed set of subintervals.
    Vec integrate_on(const Leaves& rule) const {
        Vec total(K.width(), 0.0);
        for (const auto& [a, b] : rule) {
            const double m = 0.5 * (a + b);
            const Vec fa = f(a), fl = f(0.5 * (a + m)), fm = f(m), fr = f(0.5 * (m + b)), fb = f(b);
            const Vec whole = simpson(a, b, fa, fm, fb), left = simpson(a, m, fa, fl, fm),
                      right = simpson(m, b, fm, fr, fb);
            for (std::size_t i = 0; i < total.size(); ++i) {
                const double both = left[i] + right[i];
                total[i] += both + (both - whole[i]) / 15.0;
            }
        }
        return total;
    }
};

// Upper end of the u range: past the envelope peak and with the envelope
// below 1e-16.
double truncation_point(const PhiKernel& K, const Point& x, double px) {
    Point ax(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = std::abs(x[i]);
    double C = 0.0;
    for (const auto& e : K.envelope) C = std::max(C, e(ax));
    if (C == 0.0) return 0.0;
    for (double u = 0.0; u < 200.0; u += 0.0625) {
        const double grow = std::exp(K.m * u) * px;
        if (K.m * grow < K.s_degree) continue;
        if (std::log(C) + K.s_degree * u - grow <= std::log(1e-16)) return std::max(u, 0.0625);
    }
    throw nonconvergence_error("phi: could not bound the integrand tail");
}

struct Phi2Value {
    std::vector<double> values;
    double u_max = 0.0;
    double tail = 0.0;
};

Phi2Value phi2_values(const PhiKernel& K, const Point& x, double tol) {
    Phi2Value out;
    out.values.assign(K.eta.size(), 0.0);
    if (K.k == 0) return out;
    const double px = K.p(x);
    if (!(px > 0)) throw domain_error("phi: requires p(x) > 0");
    Point xs = x;
    xs.push_back(1.0);
    out.u_max = truncation_point(K, x, px);
    if (out.u_max == 0.0) return out;
    Quadrature q{K, xs, px};
    const auto integral = q.integrate(out.u_max, tol);
    if (q.depth_hits > 0) throw nonconvergence_error("phi: adaptive quadrature hit its depth limit");
    for (std::size_t j = 0; j < K.eta.size(); ++j) out.values[j] = -integral[j];
    const auto tail = q.f(out.u_max);
    for (std::size_t j = 0; j < K.eta.size(); ++j) out.tail = std::max(out.tail, std::abs(tail[j]));
    return out;
}

// Phi_2 at several nearby points on one rule: every point's adaptive mesh
// over a common range, merged. Finite differences of the results then
// vary smoothly with the point instead of jumping with the mesh.
std::vector<std::vector<double>> phi2_shared_rule(const PhiKernel& K, const std::vector<Point>& ys, double tol) {
    std::vector<std::vector<double>> out(ys.size(), std::vector<double>(K.eta.size(), 0.0));
    if (K.k == 0) return out;
    std::vector<double> px(ys.size());
    double U = 0.0;
    for (std::size_t q = 0; q < ys.size(); ++q) {
        px[q] = K.p(ys[q]);
        if (!(px[q] > 0)) throw domain_error("phi: requires p(x) > 0");
        U = std::max(U, truncation_point(K, ys[q], px[q]));
    }
    if (U == 0.0) return out;
    std::vector<Quadrature> quads;
    Leaves all;
    for (std::size_t q = 0; q < ys.size(); ++q) {
        Point xs = ys[q];
        xs.push_back(1.0);
        quads.push_back(Quadrature{K, xs, px[q]});
        Leaves mine;
        quads.back().leaves = &mine;
        quads.back().integrate(U, tol);
        quads.back().leaves = nullptr;
        if (quads.back().depth_hits > 0) throw nonconvergence_error("phi: adaptive quadrature hit its depth limit");
        all.insert(all.end(), mine.begin(), mine.end());
    }
    std::vector<double> cuts;
    for (const auto& [a, b] : all) {
        cuts.push_back(a);
        cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Leaves rule;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) rule.emplace_back(cuts[i], cuts[i + 1]);
    for (std::size_t q = 0; q < ys.size(); ++q) {
        const auto integral = quads[q].integrate_on(rule);
        for (std::size_t j = 0; j < K.eta.size(); ++j) out[q][j] = -integral[j];
    }
    return out;
}

std::map<IndexSet, double> phi1_values(const PolyForm& omega, const NumericPolynomial& p, const Point& x) {
    std::map<IndexSet, double> out;
    const double w = std::exp(-p(x));
    for (IndexSet s : subsets_of_size(omega.n_vars(), omega.degree())) {
        out[s] = w * omega.component(s).evaluate(x);
    }
    return out;
}

void check_point(const Polynomial& p, const Point& x, double t) {
    if (static_cast<int>(x.size()) != p.n_vars()) throw domain_error("phi: point dimension mismatch");
    if (!(t > 0)) throw domain_error("phi: requires t > 0");
    if (!(p.evaluate(x) > t)) throw domain_error("phi: point lies outside the region p > t");
}

}  // namespace

double phi_integrand(const PolyForm& omega, const Polynomial& p, const Point& x, double s, IndexSet subset) {
    const PolyForm eta = interior_product_euler(omega);
    if (eta.is_zero() || omega.degree() == 0) return 0.0;
    const int k = omega.degree();
    Point sx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sx[i] = s * x[i];
    if (set_size(subset) != k - 1) throw domain_error("phi_integrand: subset has the wrong size");
    return std::pow(s, k - 1) * eta.component(subset).evaluate(sx) * std::exp(-p.evaluate(sx));
}

PhiEvaluation phi_eval(const PolyForm& omega, const Polynomial& p, const Point& x, double t, double quad_tol) {
    if (!(quad_tol > 0)) throw domain_error("phi: quad_tol must be positive");
    const PhiKernel K(omega, p);
    check_point(p, x, t);
    const Phi2Value v = phi2_values(K, x, quad_tol);
    PhiEvaluation ev;
    ev.x = x;
    ev.quad_tol = quad_tol;
    ev.u_max = v.u_max;
    ev.s_max = std::exp(v.u_max);
    ev.tail_integrand = v.tail;
    for (std::size_t j = 0; j < K.subsets.size(); ++j) ev.phi2.push_back({K.subsets[j], v.values[j]});
    for (const auto& [s, val] : phi1_values(omega, K.p, x)) ev.phi1.push_back({s, val});
    for (const auto& c : ev.phi2) {
        if (!std::isfinite(c.value)) throw nonconvergence_error("phi: non-finite value");
    }
    return ev;
}

double phi_cochain_residual(const PolyForm& omega, const Polynomial& p, std::span<const Point> points, double t,
                            double quad_tol, double h) {
    if (!(h > 0)) throw domain_error("phi: finite-difference step must be positive");
    if (!(quad_tol > 0)) throw domain_error("phi: quad_tol must be positive");
    const int n = p.n_vars();
    const int k = omega.degree();
    const PhiKernel A(omega, p);
    const PolyForm dw = twisted_differential(omega, p);
    const bool has_dw = k < n;
    std::optional<PhiKernel> B;
    if (has_dw) B.emplace(dw, p);

    double worst = 0.0;
    for (const Point& x : points) {
        check_point(p, x, t);
        std::map<IndexSet, double> total = phi1_values(omega, A.p, x);
        for (auto& [s, v] : total) v = -v;
        if (has_dw) {
            const Phi2Value b = phi2_values(*B, x, quad_tol);
            for (std::size_t j = 0; j < B->subsets.size(); ++j) total[B->subsets[j]] += b.values[j];
        }
        if (k > 0) {
            const double weights[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
            const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
            for (int i = 0; i < n; ++i) {
                std::vector<Point> ys(4, x);
                for (int q = 0; q < 4; ++q) ys[q][i] += offsets[q] * h;
                const auto vals = phi2_shared_rule(A, ys, quad_tol);
                std::vector<double> deriv(A.subsets.size(), 0.0);
                for (int q = 0; q < 4; ++q)
                    for (std::size_t j = 0; j < deriv.size(); ++j) deriv[j] += weights[q] * vals[q][j] / h;
                const IndexSet bit = IndexSet{1} << i;
                for (std::size_t j = 0; j < A.subsets.size(); ++j) {
                    const int sign = wedge_sign(bit, A.subsets[j]);
                    if (sign != 0) total[bit | A.subsets[j]] += sign * deriv[j];
                }
            }
        }
        for (const auto& [s, v] : total) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

namespace {

double determinant(std::vector<double> a, int n) {
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
            det = -det;
        }
        det *= a[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
        }
    }
    return det;
}

}  // namespace

DecayTable probe_flow_decay(const PolyForm& omega, const Polynomial& p, const Point& x, double s_cap,
                            const ProbeOptions& opts) {
    const int n = p.n_vars();
    if (omega.n_vars() != n || omega.n_coeff_vars() != n) throw domain_error("probe: form/polynomial mismatch");
    if (static_cast<int>(x.size()) != n) throw domain_error("probe: point dimension mismatch");
    if (!(s_cap > 0)) throw domain_error("probe: s_cap must be positive");
    if (opts.grid_points < 2) throw domain_error("probe: need at least two grid points");
    const ScalarField field(p);
    if (!(field.value(x) > 0)) throw domain_error("probe: requires p(x) > 0");

    const int k = omega.degree();
    DecayTable table;
    table.x = x;
    if (k > 0) table.subsets = subsets_of_size(n, k - 1);
    std::vector<std::pair<IndexSet, NumericPolynomial>> comps;
    for (const auto& [s, f] : omega.components()) comps.emplace_back(s, NumericPolynomial(f));

    // e^{-p} i_v omega at y, in the order of table.subsets.
    auto contracted = [&](const Point& y) {
        std::vector<double> out(table.subsets.size(), 0.0);
        Point v = field.gradient(y);
        const double py = field.value(y);
        const double scale = py / dot(v, v);
        for (double& vi : v) vi *= scale;
        const double w = std::exp(-py);
        for (const auto& [I, f] : comps) {
            const double fv = f(y);
            const auto idx = set_indices(I);
            for (std::size_t pos = 0; pos < idx.size(); ++pos) {
                const IndexSet rest = I & ~(IndexSet{1} << idx[pos]);
                const auto it = std::find(table.subsets.begin(), table.subsets.end(), rest);
                out[it - table.subsets.begin()] += (pos % 2 ? -1.0 : 1.0) * v[idx[pos]] * fv * w;
            }
        }
        return out;
    };

    std::vector<double> sigmas{0.0};
    for (int j = 0; j < opts.grid_points; ++j) sigmas.push_back(s_cap * std::pow(2.0, j - (opts.grid_points - 1)));

    const double h = 1e-6 * (1.0 + norm(x));
    for (double sigma : sigmas) {
        DecayRow row;
        row.sigma = sigma;
        row.components.assign(table.subsets.size(), 0.0);
        if (k > 0) {
            const Point gx = flow_map(field, FlowKind::Scaled, x, sigma, opts.flow_tol);
            std::vector<double> jac(n * n);  // jac[r * n + c] = d g_r / d x_c
            for (int c = 0; c < n; ++c) {
                Point xc = x;
                xc[c] += h;
                const Point gc = flow_map(field, FlowKind::Scaled, xc, sigma, opts.flow_tol);
                for (int r = 0; r < n; ++r) jac[r * n + c] = (gc[r] - gx[r]) / h;
            }
            const std::vector<double> eta = contracted(gx);
            const int d = k - 1;
            for (std::size_t J = 0; J < table.subsets.size(); ++J) {
                const auto cols = set_indices(table.subsets[J]);
                double acc = 0.0;
                for (std::size_t L = 0; L < table.subsets.size(); ++L) {
                    if (eta[L] == 0.0) continue;
                    const auto rows = set_indices(table.subsets[L]);
                    std::vector<double> sub(d * d);
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) sub[a * d + b] = jac[rows[a] * n + cols[b]];
                    acc += eta[L] * (d == 0 ? 1.0 : determinant(sub, d));
                }
                row.components[J] = acc;
            }
        }
        for (double c : row.components) row.magnitude = std::max(row.magnitude, std::abs(c));
        table.rows.push_back(std::move(row));
    }

    const DecayRow* first = nullptr;
    const DecayRow* last = nullptr;
    const DecayRow* prev = nullptr;
    for (const DecayRow& r : table.rows) {
        if (r.sigma <= 0 || r.magnitude <= 0) continue;
        if (!first) first = &r;
        if (prev) {
            table.local_exponents.push_back((std::log(r.magnitude) - std::log(prev->magnitude)) /
                                            (std::log(r.sigma) - std::log(prev->sigma)));
        }
        prev = last = &r;
    }
    char buf[256];
    if (!first) {
        table.evidence = "integrand vanishes at every grid point";
    } else {
        std::snprintf(buf, sizeof buf, "max |integrand| %.3e at sigma=%.4g, %.3e at sigma=%.4g", first->magnitude,
                      first->sigma, last->magnitude, last->sigma);
        table.evidence = buf;
        if (!table.local_exponents.empty()) {
            std::snprintf(buf, sizeof buf, "; local exponent d log|I|/d log sigma from %.3g to %.3g",
                          table.local_exponents.front(), table.local_exponents.back());
            table.evidence += buf;
        }
        if (last != &table.rows.back()) table.evidence += "; integrand underflows to 0 beyond the last value";
    }
    return table;
}

void write_decay_csv(std::ostream& out, const DecayTable& table) {
    out << "sigma";
    for (IndexSet s : table.subsets) {
        out << ",";
        const auto idx = set_indices(s);
        if (idx.empty()) out << "1";
        for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "^" : "") << "dx" << (idx[i] + 1);
    }
    out << ",magnitude\n";
    char buf[64];
    for (const DecayRow& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.sigma);
        out << buf;
        for (double c : r.components) {
            std::snprintf(buf, sizeof buf, ",%.17g", c);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", r.magnitude);
        out << buf;
    }
}

namespace {

std::string subset_name(IndexSet s) {
    const auto idx = set_indices(s);
    if (idx.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? "^dx" : "dx") + std::to_string(idx[i] + 1);
    return out;
}

}  // namespace

nlohmann::json to_json(const PhiEvaluation& ev) {
    nlohmann::json phi2 = nlohmann::json::object(), phi1 = nlohmann::json::object();
    for (const auto& c : ev.phi2) phi2[subset_name(c.subset)] = c.value;
    for (const auto& c : ev.phi1) phi1[subset_name(c.subset)] = c.value;
    return {{"x", ev.x},       {"quad_tol", ev.quad_tol}, {"s_max", ev.s_max}, {"tail_integrand", ev.tail_integrand},
            {"phi2", phi2},    {"phi1", phi1}};
}

nlohmann::json to_json(const DecayTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const DecayRow& r : table.rows) {
        rows.push_back({{"sigma", r.sigma}, {"components", r.components}, {"magnitude", r.magnitude}});
    }
    std::vector<std::string> names;
    for (IndexSet s : table.subsets) names.push_back(subset_name(s));
    return {{"x", table.x},
            {"components", names},
            {"rows", rows},
            {"local_exponents", table.local_exponents},
            {"evidence", table.evidence}};
}

}  // namespace remfiber
