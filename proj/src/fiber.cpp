#include "remfiber/fiber.hpp"

#include "remfiber/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

namespace remfiber {

double SeededRng::normal() {
    // Box-Muller; u1 in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

const char* to_string(FiberVerdict v) {
    return v == FiberVerdict::Nonempty ? "nonempty" : "presumed-empty";
}

FiberSample FiberSample::truncated(std::size_t count) const {
    FiberSample out = *this;
    if (out.points.size() > count) out.points.resize(count);
    out.residual_bound = 0.0;
    const NumericPolynomial f(p);
    for (const auto& x : out.points) out.residual_bound = std::max(out.residual_bound, std::abs(f(x) - t));
    return out;
}

namespace {

// Damped Newton on p(x) = t along the gradient direction.
bool newton_project(const ScalarField& field, double t, Point& x) {
    double r = field.value(x) - t;
    const double target = 1e-13 * std::max(1.0, std::abs(t));
    for (int iter = 0; iter < 80; ++iter) {
        if (std::abs(r) <= target) break;
        const Point g = field.gradient(x);
        const double g2 = dot(g, g);
        if (std::sqrt(g2) < 1e-12) return false;
        double lambda = 1.0;
        bool improved = false;
        Point trial(x.size());
        for (int half = 0; half < 40; ++half) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - lambda * r / g2 * g[i];
            const double rt = field.value(trial) - t;
            if (std::abs(rt) < std::abs(r)) {
                x = trial;
                r = rt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    return std::abs(r) <= kNewtonResidual;
}

bool inside_box(const Point& x, double half_width) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v) <= half_width && std::isfinite(v); });
}

// Bisection for f(a + u (b - a)) = 0 with f(a), f(b) of opposite sign.
Point bisect(const NumericPolynomial& f, double t, Point a, Point b) {
    double fa = f(a) - t;
    Point mid(a.size());
    for (int iter = 0; iter < 200; ++iter) {
        for (std::size_t i = 0; i < a.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
        const double fm = f(mid) - t;
        if (fm == 0.0) return mid;
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (distance(a, b) < 1e-16 * (1.0 + norm(a))) break;
    }
    for (std::size_t i = 0; i < a.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
    return mid;
}

// Marching squares over [-R, R]^2 with G cells per axis; returns the
// contour vertices (one per crossed edge) and the segment count.
std::pair<std::vector<Point>, int> marching_squares(const NumericPolynomial& f, double t, double R, int G) {
    const double h = 2.0 * R / G;
    auto node = [&](int i, int j) { return Point{-R + i * h, -R + j * h}; };
    std::vector<double> v((G + 1) * (G + 1));
    for (int i = 0; i <= G; ++i)
        for (int j = 0; j <= G; ++j) v[i * (G + 1) + j] = f(node(i, j)) - t;
    auto val = [&](int i, int j) { return v[i * (G + 1) + j]; };

    std::vector<Point> out;
    auto crossing = [&](int i0, int j0, int i1, int j1) {
        const double a = val(i0, j0), b = val(i1, j1);
        if ((a > 0) == (b > 0)) return;
        out.push_back(bisect(f, t, node(i0, j0), node(i1, j1)));
    };
    // Each edge once: horizontal edges (i,j)-(i+1,j), vertical (i,j)-(i,j+1).
    for (int i = 0; i <= G; ++i) {
        for (int j = 0; j <= G; ++j) {
            if (i < G) crossing(i, j, i + 1, j);
            if (j < G) crossing(i, j, i, j + 1);
        }
    }
    int segments = 0;
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            const int code = (val(i, j) > 0) | (val(i + 1, j) > 0) << 1 | (val(i + 1, j + 1) > 0) << 2 |
                             (val(i, j + 1) > 0) << 3;
            if (code == 0 || code == 15) continue;
            segments += (code == 5 || code == 10) ? 2 : 1;
        }
    }
    return {out, segments};
}

// Grid scan of the box: visits every node of a G^n lattice.
template <class Visit>
void scan_grid(int n, int G, double R, Visit visit) {
    std::vector<int> idx(n, 0);
    Point x(n);
    const double h = 2.0 * R / (G - 1);
    while (true) {
        for (int i = 0; i < n; ++i) x[i] = -R + idx[i] * h;
        visit(idx, x, h);
        int d = 0;
        while (d < n && ++idx[d] == G) idx[d++] = 0;
        if (d == n) break;
    }
}

}  // namespace

FiberSample sample_fiber(const Polynomial& p, double t, double R, int N, std::uint64_t seed) {
    if (!(R > 0)) throw domain_error("sample_fiber: box radius must be positive");
    if (N < 1) throw domain_error("sample_fiber: need at least one seed");
    const int n = p.n_vars();
    const ScalarField field(p);
    const NumericPolynomial f(p);

    FiberSample fs;
    fs.p = p;
    fs.t = t;
    fs.meta.box_radius = R;
    fs.meta.attempts = N;
    fs.meta.seed = seed;

    SeededRng rng(seed);
    const double res = R / std::sqrt(static_cast<double>(N));
    std::set<std::vector<long long>> cells;
    auto cell_of = [&](const Point& x) {
        std::vector<long long> c(n);
        for (int i = 0; i < n; ++i) c[i] = static_cast<long long>(std::floor(x[i] / res));
        return c;
    };

    for (int k = 0; k < N; ++k) {
        Point x(n);
        for (auto& xi : x) xi = rng.uniform(-R, R);
        if (!newton_project(field, t, x) || !inside_box(x, 2.0 * R)) continue;
        ++fs.meta.newton_points;
        if (!cells.insert(cell_of(x)).second) {
            ++fs.meta.duplicates_removed;
            continue;
        }
        fs.points.push_back(std::move(x));
    }

    if (n == 2) {
        const int G = std::max(16, static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(N)))));
        auto [crossings, segments] = marching_squares(f, t, R, G);
        fs.meta.marching_segments = segments;
        for (auto& x : crossings) {
            if (std::abs(f(x) - t) > kNewtonResidual) {
                // Polish bisection output that landed on a steep edge.
                if (!newton_project(field, t, x)) continue;
            }
            fs.points.push_back(std::move(x));
            ++fs.meta.marching_points;
        }
    }

    if (fs.points.empty()) {
        const int G = n <= 2 ? 101 : (n == 3 ? 31 : 15);
        double lo = INFINITY, hi = -INFINITY;
        scan_grid(n, G, R, [&](const std::vector<int>&, const Point& x, double) {
            const double v = f(x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        });
        fs.meta.scanned = true;
        fs.meta.scan_min = lo;
        fs.meta.scan_max = hi;
        const double gap = 1e-6 * (1.0 + std::abs(t));
        if (lo > t + gap || hi < t - gap) {
            fs.verdict = FiberVerdict::PresumedEmpty;
            return fs;
        }
        // The scan straddles t: bisect along grid lines with a sign change.
        scan_grid(n, G, R, [&](const std::vector<int>& idx, const Point& x, double h) {
            const double a = f(x) - t;
            for (int d = 0; d < n; ++d) {
                if (idx[d] + 1 >= G) continue;
                Point y = x;
                y[d] += h;
                const double b = f(y) - t;
                if ((a > 0) == (b > 0)) continue;
                Point z = bisect(f, t, x, y);
                if (std::abs(f(z) - t) > kNewtonResidual && !newton_project(field, t, z)) continue;
                if (!cells.insert(cell_of(z)).second) continue;
                fs.points.push_back(std::move(z));
                ++fs.meta.grid_points;
            }
        });
        if (fs.points.empty()) {
            throw nonconvergence_error("sample_fiber: no point of the level set found, but the grid scan "
                                       "does not rule out a nonempty fiber");
        }
    }

    for (const auto& x : fs.points) fs.residual_bound = std::max(fs.residual_bound, std::abs(f(x) - t));
    if (fs.residual_bound > kResidualBound) {
        throw Error(ErrorKind::Internal, "sample_fiber: stored point violates the residual bound");
    }
    return fs;
}

double default_box_radius(const Polynomial& p, double t) {
    const auto m = homogeneity_degree(p);
    if (!m || *m < 1) {
        throw config_error("box radius must be supplied for a non-homogeneous polynomial");
    }
    return 2.0 * std::pow(1.0 + std::abs(t), 1.0 / *m);
}

namespace {

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

}  // namespace

int connected_components(const std::vector<Point>& points, double eps) {
    if (points.empty()) throw domain_error("connected_components: empty sample");
    if (!(eps > 0)) throw domain_error("connected_components: eps must be positive");
    DisjointSets ds(points.size());
    int components = static_cast<int>(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (distance(points[i], points[j]) <= eps && ds.unite(static_cast<int>(i), static_cast<int>(j))) {
                --components;
            }
        }
    }
    return components;
}

int connected_components(const FiberSample& fs, double eps) {
    if (fs.verdict == FiberVerdict::PresumedEmpty || fs.empty()) {
        throw domain_error("connected_components: empty fiber sample");
    }
    return connected_components(fs.points, eps);
}

double median_nearest_neighbor(const std::vector<Point>& points) {
    if (points.size() < 2) return 0.0;
    std::vector<double> nn(points.size(), INFINITY);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = distance(points[i], points[j]);
            nn[i] = std::min(nn[i], d);
            nn[j] = std::min(nn[j], d);
        }
    }
    std::sort(nn.begin(), nn.end());
    return nn[nn.size() / 2];
}

std::vector<std::pair<double, int>> component_sweep(const FiberSample& fs, double base,
                                                    const std::vector<double>& multipliers) {
    std::vector<std::pair<double, int>> out;
    for (double m : multipliers) {
        const double eps = m * base;
        out.emplace_back(eps, eps > 0 ? connected_components(fs, eps) : static_cast<int>(fs.points.size()));
    }
    return out;
}

void write_points_csv(std::ostream& out, const FiberSample& fs) {
    const int n = fs.n_vars();
    for (int i = 0; i < n; ++i) out << "x" << (i + 1) << ",";
    out << "residual\n";
    const NumericPolynomial f(fs.p);
    char buf[64];
    for (const auto& x : fs.points) {
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,", x[i]);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", std::abs(f(x) - fs.t));
        out << buf;
    }
}

}  // namespace remfiber
