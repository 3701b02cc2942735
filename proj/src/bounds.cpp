#include "remfiber/bounds.hpp"

#include "remfiber/error.hpp"
#include "remfiber/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace remfiber {

const char* to_string(BoundVerdict v) {
    return v == BoundVerdict::BoundHolds ? "bound-holds" : "bound-suspect";
}

namespace {

bool project(const ScalarField& field, double t, Point& x) {
    const double target = 1e-13 * std::max(1.0, std::abs(t));
    for (int iter = 0; iter < 60; ++iter) {
        const double r = field.value(x) - t;
        if (std::abs(r) <= target) return true;
        const Point g = field.gradient(x);
        const double g2 = dot(g, g);
        if (g2 < 1e-24) return false;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= r / g2 * g[i];
    }
    return std::abs(field.value(x) - t) <= kNewtonResidual;
}

// |grad p|^2 |x|^2 and its gradient.
double objective(const ScalarField& field, const Point& x, Point* grad) {
    const Point g = field.gradient(x);
    const double g2 = dot(g, g), x2 = dot(x, x);
    if (grad) {
        const std::vector<double> H = field.hessian(x);
        const std::size_t n = x.size();
        grad->assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double hg = 0.0;
            for (std::size_t j = 0; j < n; ++j) hg += H[i * n + j] * g[j];
            (*grad)[i] = 2.0 * x2 * hg + 2.0 * g2 * x[i];
        }
    }
    return g2 * x2;
}

struct LocalResult {
    Point x;
    double value;
    double violation;
};

LocalResult descend(const ScalarField& field, double t, Point x, int max_iterations) {
    LocalResult out{x, objective(field, x, nullptr), std::abs(field.value(x) - t)};
    double fx = out.value;
    double lam = -1.0;
    Point G, y;
    for (int it = 0; it < max_iterations; ++it) {
        objective(field, x, &G);
        const Point g = field.gradient(x);
        const double gn = norm(g);
        if (gn < 1e-14) break;
        const double along = dot(G, g) / (gn * gn);
        Point d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d[i] = -(G[i] - along * g[i]);
        const double dn = norm(d);
        if (dn <= 1e-14 * (1.0 + fx)) break;
        if (lam < 0) lam = 0.1 * (1.0 + norm(x)) / dn;
        double step = lam;
        bool accepted = false;
        double fy = fx;
        while (step * dn >= 1e-16 * (1.0 + norm(x))) {
            y = x;
            for (std::size_t i = 0; i < x.size(); ++i) y[i] += step * d[i];
            if (project(field, t, y)) {
                fy = objective(field, y, nullptr);
                if (fy <= fx - 1e-4 * step * dn * dn) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const double moved = distance(x, y);
        x = y;
        fx = fy;
        out.violation = std::max(out.violation, std::abs(field.value(x) - t));
        lam = 2.0 * step;
        if (moved < 1e-12) break;
    }
    out.x = x;
    out.value = fx;
    return out;
}

}  // namespace

GradNormMin levelset_min_gradnorm(const Polynomial& p, double t, int restarts, std::uint64_t seed,
                                  const GradNormOptions& opts) {
    if (restarts < 8) throw domain_error("levelset_min_gradnorm: need at least 8 restarts");
    const double R = opts.box_radius ? *opts.box_radius : default_box_radius(p, t);
    const FiberSample fs = sample_fiber(p, t, R, 256, seed);
    if (fs.verdict == FiberVerdict::PresumedEmpty || fs.empty()) {
        throw domain_error("levelset_min_gradnorm: empty level set");
    }
    const ScalarField field(p);
    GradNormMin best;
    best.value = INFINITY;
    best.restarts = restarts;
    const std::size_t size = fs.points.size();
    for (int j = 0; j < restarts; ++j) {
        Point x = fs.points[j % size];
        if (static_cast<std::size_t>(j) >= size) {
            SeededRng rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(j + 1)));
            for (double& v : x) v += 0.05 * R * rng.normal();
            if (!project(field, t, x)) continue;
        }
        ++best.projected_starts;
        const LocalResult r = descend(field, t, x, opts.max_iterations);
        best.max_violation = std::max(best.max_violation, r.violation);
        if (r.value < best.value) {
            best.value = r.value;
            best.argmin = r.x;
        }
    }
    if (best.projected_starts == 0) throw nonconvergence_error("levelset_min_gradnorm: no start could be projected");
    best.value = std::sqrt(best.value);
    return best;
}

PuiseuxFit fit_puiseux_exponent(std::span<const std::pair<double, double>> samples, const FitOptions& opts) {
    if (samples.size() < std::max<std::size_t>(opts.min_samples, 2)) {
        throw domain_error("fit_puiseux_exponent: need at least " + std::to_string(opts.min_samples) + " samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].first > 0)) throw domain_error("fit_puiseux_exponent: r must be positive");
        if (!(samples[i].second > 0)) throw domain_error("fit_puiseux_exponent: values must be positive");
        if (i > 0 && !(samples[i].first > samples[i - 1].first)) {
            throw domain_error("fit_puiseux_exponent: r must be strictly increasing");
        }
    }
    const double lo = std::log(samples.front().first), hi = std::log(samples.back().first);
    if ((hi - lo) / std::log(10.0) < opts.min_decades) {
        throw domain_error("fit_puiseux_exponent: samples span less than the required decades in r");
    }
    const double mid = 0.5 * (lo + hi);
    std::size_t first = 0;
    while (first < samples.size() && std::log(samples[first].first) < mid) ++first;
    first = std::min(first, samples.size() - 2);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(samples.size() - first);
    for (std::size_t i = first; i < samples.size(); ++i) {
        const double X = std::log(samples[i].first), Y = std::log(samples[i].second);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
    }
    PuiseuxFit fit;
    fit.used = samples.size() - first;
    fit.alpha = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    fit.c = std::exp((sy - fit.alpha * sx) / k);
    for (std::size_t i = first; i < samples.size(); ++i) {
        const double model = fit.c * std::pow(samples[i].first, fit.alpha);
        fit.quality = std::max(fit.quality, std::abs(model / samples[i].second - 1.0));
    }
    return fit;
}

namespace {

double profile_value(const ScalarField& field, const Point& x) {
    const double px = field.value(x);
    const double gx = norm(field.gradient(x)) * norm(x);
    return gx > 0 ? std::min(px, 1.0 / gx) : px;
}

double sphere_max(const ScalarField& field, double r, int directions, std::uint64_t seed) {
    const int n = field.n_vars();
    if (n == 1) return std::max(profile_value(field, Point{r}), profile_value(field, Point{-r}));
    SeededRng rng(seed);
    auto on_sphere = [&](Point v) {
        const double nv = norm(v);
        for (double& c : v) c *= r / nv;
        return v;
    };
    std::vector<std::pair<double, Point>> starts;
    for (int i = 0; i < directions; ++i) {
        Point v(n);
        for (double& c : v) c = rng.normal();
        if (norm(v) == 0.0) continue;
        v = on_sphere(v);
        starts.emplace_back(profile_value(field, v), v);
    }
    std::sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double best = starts.front().first;
    for (std::size_t s = 0; s < std::min<std::size_t>(8, starts.size()); ++s) {
        auto [val, x] = starts[s];
        double step = 0.1 * r;
        for (int it = 0; it < 200 && step > 1e-10 * r; ++it) {
            Point y = x;
            for (double& c : y) c += step * rng.normal();
            y = on_sphere(y);
            const double vy = profile_value(field, y);
            if (vy > val) {
                val = vy;
                x = y;
                step *= 1.2;
            } else {
                step *= 0.7;
            }
        }
        best = std::max(best, val);
    }
    return best;
}

std::optional<PuiseuxFit> permissive_fit(const std::vector<std::pair<double, double>>& samples) {
    std::vector<std::pair<double, double>> pos;
    for (const auto& s : samples)
        if (s.first > 0 && s.second > 0) pos.push_back(s);
    try {
        return fit_puiseux_exponent(pos, FitOptions{3, 0.5});
    } catch (const Error&) {
        return std::nullopt;
    }
}

void check_grid(std::span<const double> grid, const char* name) {
    if (grid.empty()) throw domain_error(std::string("threshold_estimate: empty ") + name);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw domain_error(std::string("threshold_estimate: ") + name + " must increase");
    }
}

}  // namespace

BoundEstimate threshold_estimate(const Polynomial& p, std::span<const double> t_grid, std::span<const double> r_grid,
                                 std::uint64_t seed, const ThresholdOptions& opts) {
    check_grid(t_grid, "t grid");
    check_grid(r_grid, "r grid");
    if (!(r_grid.front() > 0)) throw domain_error("threshold_estimate: r grid must be positive");

    BoundEstimate est;
    for (double t : t_grid) {
        try {
            const GradNormMin g = levelset_min_gradnorm(p, t, opts.restarts, seed, GradNormOptions{opts.box_radius});
            est.samples.emplace_back(t, g.value);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Domain) throw;
            est.empty_levels.push_back(t);
        }
    }
    if (est.samples.empty()) throw domain_error("threshold_estimate: every level set on the grid is empty");

    est.T = std::numeric_limits<double>::quiet_NaN();
    double tail_min = INFINITY;
    for (std::size_t i = est.samples.size(); i-- > 0;) {
        if (!(est.samples[i].second > 1e-12)) break;
        tail_min = std::min(tail_min, est.samples[i].second);
        est.T = est.samples[i].first;
    }
    est.c = std::isnan(est.T) ? 0.0 : 0.5 * tail_min;

    const auto gfit = permissive_fit(est.samples);
    est.alpha = gfit ? gfit->alpha : std::numeric_limits<double>::quiet_NaN();
    est.fit_quality = gfit ? gfit->quality : std::numeric_limits<double>::quiet_NaN();
    if (!gfit) est.notes.push_back("g(t) exponent not fitted: too few positive samples or too narrow a t range");

    const ScalarField field(p);
    for (double r : r_grid) est.profile.emplace_back(r, sphere_max(field, r, opts.profile_directions, seed));
    const auto pfit = permissive_fit(est.profile);
    est.profile_alpha = pfit ? pfit->alpha : std::numeric_limits<double>::quiet_NaN();
    if (!pfit) est.notes.push_back("t(r) exponent not fitted: too few positive profile values");

    const bool g_falls = gfit && gfit->alpha < -0.05;
    const bool profile_grows = pfit && pfit->alpha > 0.05;
    est.verdict = (std::isnan(est.T) || g_falls || profile_grows) ? BoundVerdict::BoundSuspect
                                                                   : BoundVerdict::BoundHolds;
    if (g_falls) est.notes.push_back("g(t) trends downward in t");
    if (profile_grows) est.notes.push_back("t(r) grows with r, as it would if the gradient bound failed");
    est.notes.push_back("empirical: minima come from multistart local optimization and are upper bounds");
    est.notes.push_back("the semialgebraic set is not constructed; its continuous relaxation is optimized");
    est.notes.push_back("c carries a factor-2 safety margin");
    return est;
}

namespace {

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const BoundEstimate& est) {
    nlohmann::json samples = nlohmann::json::array(), profile = nlohmann::json::array();
    for (const auto& [t, g] : est.samples) samples.push_back({{"t", t}, {"g", g}});
    for (const auto& [r, v] : est.profile) profile.push_back({{"r", r}, {"t_r", v}});
    return {{"T", number_or_null(est.T)},
            {"c", est.c},
            {"alpha", number_or_null(est.alpha)},
            {"fit_quality", number_or_null(est.fit_quality)},
            {"samples", samples},
            {"empty_levels", est.empty_levels},
            {"profile", profile},
            {"profile_alpha", number_or_null(est.profile_alpha)},
            {"verdict", to_string(est.verdict)},
            {"notes", est.notes}};
}

}  // namespace remfiber
