#include "doctest.h"
#include "generators.hpp"

#include "remfiber/error.hpp"
#include "remfiber/fiber.hpp"
#include "remfiber/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace remfiber;

namespace {

Polynomial P(const char* text, int n) { return parse_polynomial(text, n); }

FiberSample from_points(const Polynomial& p, double t, std::vector<Point> pts) {
    FiberSample fs;
    fs.p = p;
    fs.t = t;
    fs.points = std::move(pts);
    return fs;
}

// Standard column reduction without clearing over a dense bit matrix, on
// all simplices up to dimension 2 with the same (value, dim, vertices) order.
std::vector<std::vector<Bar>> brute_force_rips(const std::vector<Point>& pts, double cap) {
    struct S {
        double value;
        int dim;
        std::vector<int> v;
    };
    const int n = static_cast<int>(pts.size());
    std::vector<S> all;
    for (int i = 0; i < n; ++i) all.push_back({0.0, 0, {i}});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dij = distance(pts[i], pts[j]);
            if (dij <= cap) all.push_back({dij, 1, {i, j}});
            for (int k = j + 1; k < n; ++k) {
                const double v = std::max({dij, distance(pts[i], pts[k]), distance(pts[j], pts[k])});
                if (v <= cap) all.push_back({v, 2, {i, j, k}});
            }
        }
    std::sort(all.begin(), all.end(), [](const S& a, const S& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.v < b.v;
    });
    const std::size_t N = all.size();
    std::vector<std::vector<char>> col(N, std::vector<char>(N, 0));
    for (std::size_t c = 0; c < N; ++c) {
        if (all[c].dim == 0) continue;
        for (std::size_t drop = 0; drop < all[c].v.size(); ++drop) {
            std::vector<int> face = all[c].v;
            face.erase(face.begin() + drop);
            for (std::size_t r = 0; r < N; ++r)
                if (all[r].dim == all[c].dim - 1 && all[r].v == face) col[c][r] = 1;
        }
    }
    auto low = [&](std::size_t c) {
        for (std::size_t r = N; r-- > 0;)
            if (col[c][r]) return static_cast<long>(r);
        return -1L;
    };
    std::vector<long> owner(N, -1);
    std::vector<char> paired(N, 0);
    std::vector<std::vector<Bar>> bars(2);
    for (std::size_t c = 0; c < N; ++c) {
        long l = low(c);
        while (l >= 0 && owner[l] >= 0) {
            for (std::size_t r = 0; r < N; ++r) col[c][r] ^= col[owner[l]][r];
            l = low(c);
        }
        if (l >= 0) {
            owner[l] = static_cast<long>(c);
            paired[l] = paired[c] = 1;
            if (all[l].dim <= 1 && all[l].value != all[c].value) bars[all[l].dim].push_back({all[l].value, all[c].value});
        }
    }
    for (std::size_t c = 0; c < N; ++c)
        if (!paired[c] && all[c].dim <= 1) bars[all[c].dim].push_back({all[c].value, INFINITY});
    for (auto& b : bars) std::sort(b.begin(), b.end());
    return bars;
}

std::vector<Point> polygon(int k, double radius) {
    std::vector<Point> pts;
    for (int i = 0; i < k; ++i) {
        const double a = 2.0 * M_PI * i / k;
        pts.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    return pts;
}

}  // namespace

TEST_SUITE("fiber_topology") {

TEST_CASE("sampling the unit circle") {
    const Polynomial p = P("x1^2 + x2^2", 2);
    const FiberSample fs = sample_fiber(p, 1.0, 2.0, 500, 3);
    CHECK(fs.verdict == FiberVerdict::Nonempty);
    CHECK(fs.points.size() >= 100);
    for (const auto& x : fs.points) CHECK(std::abs(x[0] * x[0] + x[1] * x[1] - 1.0) <= 1e-10);
    CHECK(fs.residual_bound <= 1e-10);
    CHECK(fs.meta.marching_points > 0);
}

TEST_CASE("sampling an empty and a two-branch level set") {
    const FiberSample empty = sample_fiber(P("-(x1^2 + x2^2)", 2), 1.0, 2.0, 200, 1);
    CHECK(empty.verdict == FiberVerdict::PresumedEmpty);
    CHECK(empty.points.empty());
    CHECK(empty.meta.scanned);

    const FiberSample hyp = sample_fiber(P("x1^2 - x2^2", 2), 1.0, 3.0, 500, 1);
    CHECK(hyp.verdict == FiberVerdict::Nonempty);
    bool left = false, right = false;
    for (const auto& x : hyp.points) {
        left = left || x[0] < 0;
        right = right || x[0] > 0;
    }
    CHECK(left);
    CHECK(right);
    CHECK(connected_components(hyp, 0.3) == 2);
    CHECK_THROWS_AS(sample_fiber(P("x1", 1), 1.0, -1.0, 10, 1), Error);
}

TEST_CASE("sampling is deterministic in the seed") {
    const Polynomial p = P("x1^2 + x2^2 + x3^2", 3);
    const FiberSample a = sample_fiber(p, 1.0, 2.0, 300, 42), b = sample_fiber(p, 1.0, 2.0, 300, 42);
    CHECK(a.points == b.points);
    const FiberSample c = sample_fiber(p, 1.0, 2.0, 300, 43);
    CHECK(a.points != c.points);
    std::ostringstream sa, sb;
    write_points_csv(sa, a);
    write_points_csv(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("x1,x2,x3,residual\n", 0) == 0);
}

TEST_CASE("default box radius") {
    CHECK(default_box_radius(P("x1^2 + x2^2", 2), 3.0) == doctest::Approx(4.0));
    CHECK_THROWS_AS(default_box_radius(P("x1^2 - x1", 1), 1.0), Error);
}

TEST_CASE("connected components") {
    const Polynomial p = P("x1^2 + x2^2", 2);
    CHECK(connected_components(from_points(p, 1.0, polygon(64, 1.0)), 0.2) == 1);
    CHECK(connected_components(std::vector<Point>{{0.5, 0.5}}, 0.01) == 1);
    CHECK_THROWS_AS(connected_components(std::vector<Point>{}, 0.1), Error);
}

TEST_CASE("Rips persistence of a 12-gon matches the brute-force reduction") {
    const auto pts = polygon(12, 1.0);
    for (double cap : {0.6, 1.2, 1.8, 2.1}) {
        const PersistenceDiagram pd = rips_persistence(pts, 1, cap);
        const auto oracle = brute_force_rips(pts, cap);
        CAPTURE(cap);
        REQUIRE(pd.bars.size() == 2);
        for (int d = 0; d <= 1; ++d) {
            REQUIRE(pd.bars[d].size() == oracle[d].size());
            for (std::size_t i = 0; i < oracle[d].size(); ++i) {
                CHECK(pd.bars[d][i].birth == doctest::Approx(oracle[d][i].birth));
                if (oracle[d][i].essential()) {
                    CHECK(pd.bars[d][i].essential());
                } else {
                    CHECK(pd.bars[d][i].death == doctest::Approx(oracle[d][i].death));
                }
            }
        }
    }
    const PersistenceDiagram pd = rips_persistence(pts, 1, 1.2);
    CHECK(pd.essential_count(0) == 1);
    CHECK(pd.essential_count(1) == 1);
}

TEST_CASE("Rips essential bars of standard shapes") {
    const Polynomial circle = P("x1^2 + x2^2", 2);
    const FiberSample fs = sample_fiber(circle, 1.0, 2.0, 500, 5);
    const PersistenceDiagram pd = rips_persistence(fs, 1, 1.0);
    CHECK(pd.essential_count(0) == 1);
    CHECK(pd.essential_count(1) == 1);

    // Two far disks.
    gen::Gen g(4);
    std::vector<Point> clusters;
    for (int i = 0; i < 150; ++i) {
        const double r = std::sqrt(g.real(0, 1)), a = g.real(0, 2 * M_PI);
        clusters.push_back({(i % 2 ? 5.0 : -5.0) + r * std::cos(a), r * std::sin(a)});
    }
    const PersistenceDiagram two = rips_persistence(clusters, 1, 1.0);
    CHECK(two.essential_count(0) == 2);
    CHECK(two.essential_count(1) == 0);

    // Octahedron vertices: a 2-sphere at scales in [sqrt 2, 2).
    std::vector<Point> octa;
    for (int i = 0; i < 3; ++i)
        for (double s : {-1.0, 1.0}) {
            Point x(3, 0.0);
            x[i] = s;
            octa.push_back(x);
        }
    const PersistenceDiagram o = rips_persistence(octa, 2, 1.5);
    CHECK(o.essential_count(0) == 1);
    CHECK(o.essential_count(1) == 0);
    CHECK(o.essential_count(2) == 1);

    CHECK_THROWS_AS(rips_persistence(std::vector<Point>{}, 1, 1.0), Error);
    RipsOptions small;
    small.max_points = 10;
    CHECK_THROWS_AS(rips_persistence(polygon(20, 1.0), 1, 1.0, small), Error);
}

TEST_CASE("reduced Betti numbers and the predicted shift") {
    const Polynomial circle = P("x1^2 + x2^2", 2);
    const FiberSample fs = sample_fiber(circle, 1.0, 2.0, 500, 5);
    const ReducedBetti rb = reduced_betti(fs, rips_persistence(fs, 1, 1.0));
    CHECK(rb.betti == std::vector<int>{0, 0, 1});
    CHECK(rb.at(-1) == 0);
    CHECK(rb.at(1) == 1);
    CHECK(predicted_tempered_dims(rb) == std::vector<int>{0, 0, 1});

    const FiberSample empty = sample_fiber(P("-(x1^2 + x2^2)", 2), 1.0, 2.0, 100, 1);
    const ReducedBetti re = reduced_betti(empty, std::nullopt);
    CHECK(re.betti == std::vector<int>{1, 0, 0});
    CHECK(predicted_tempered_dims(re) == std::vector<int>{1, 0, 0});
    CHECK_THROWS_AS(reduced_betti(fs, std::nullopt), Error);

    const FiberSample hyp = sample_fiber(P("x1^2 - x2^2", 2), 1.0, 3.0, 500, 1);
    const ReducedBetti rh = reduced_betti(hyp, rips_persistence(hyp, 1, suggest_rips_cap(hyp.points)));
    CHECK(rh.betti == std::vector<int>{0, 1, 0});
    CHECK(predicted_tempered_dims(rh) == std::vector<int>{0, 1, 0});
}

TEST_CASE("property: essential 0-bars count the components of the cap graph") {
    gen::Gen g(21);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = g.integer(1, 3);
        const int count = g.integer(2, 40);
        std::vector<Point> pts;
        for (int i = 0; i < count; ++i) pts.push_back(g.point(n, 3.0));
        const double cap = g.real(0.2, 2.0);
        const PersistenceDiagram pd = rips_persistence(pts, std::min(n - 1, 1), cap);
        CHECK(pd.essential_count(0) == connected_components(pts, cap));
        for (const auto& bars : pd.bars)
            for (const Bar& b : bars) CHECK(b.birth < b.death);
    }
}

TEST_CASE("property: components are nonincreasing in the link radius") {
    const FiberSample fs = sample_fiber(P("x1^2 - x2^2", 2), 1.0, 3.0, 400, 8);
    int prev = static_cast<int>(fs.points.size()) + 1;
    for (double eps : {0.01, 0.02, 0.05, 0.1, 0.3, 1.0, 3.0}) {
        const int c = connected_components(fs, eps);
        CHECK(c <= prev);
        prev = c;
    }
    const auto sweep = component_sweep(fs, landmark_spacing(fs.points, suggest_rips_cap(fs.points)), {1, 3, 10});
    CHECK(sweep.size() == 3);
    CHECK(sweep[0].second >= sweep[2].second);
    CHECK(sweep[1].second == 2);
}

TEST_CASE("property: reduced Betti invariants over random samples") {
    gen::Gen g(13);
    const char* polys[] = {"x1^2 + x2^2", "x1^2 - x2^2", "x1^2 + 2*x2^2 + x3^2", "-(x1^2 + x2^2)", "x1"};
    const int nv[] = {2, 2, 3, 2, 1};
    for (int i = 0; i < 5; ++i) {
        const Polynomial p = P(polys[i], nv[i]);
        const double t = g.real(0.5, 2.0);
        const FiberSample fs = sample_fiber(p, t, 3.0, 200, static_cast<std::uint64_t>(g.integer(1, 1000)));
        for (const auto& x : fs.points) CHECK(std::abs(p.evaluate(x) - t) <= kResidualBound);
        std::optional<PersistenceDiagram> pd;
        if (fs.verdict == FiberVerdict::Nonempty) {
            pd = rips_persistence(fs, std::min(nv[i] - 1, 2), suggest_rips_cap(fs.points));
        }
        const ReducedBetti rb = reduced_betti(fs, pd);
        if (fs.verdict == FiberVerdict::Nonempty) {
            CHECK(rb.at(-1) == 0);
        } else {
            std::vector<int> expect(nv[i] + 1, 0);
            expect[0] = 1;
            CHECK(rb.betti == expect);
        }
        const auto shifted = predicted_tempered_dims(rb);
        for (int k = -1; k < nv[i]; ++k) CHECK(shifted[k + 1] == rb.at(k));
    }
}

}  // TEST_SUITE
