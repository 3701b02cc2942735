#include "doctest.h"
#include "generators.hpp"

#include "remfiber/error.hpp"
#include "remfiber/exact_rank.hpp"
#include "remfiber/twisted_cohomology.hpp"

using namespace remfiber;

namespace {

Polynomial P(const char* text, int n) { return parse_polynomial(text, n); }

// Dense rational Gaussian elimination.
std::size_t dense_rank(std::vector<std::vector<Rational>> a) {
    std::size_t rank = 0;
    const std::size_t cols = a.empty() ? 0 : a[0].size();
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t piv = rank;
        while (piv < a.size() && a[piv][c] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[piv], a[rank]);
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == rank || a[r][c] == 0) continue;
            const Rational f = a[r][c] / a[rank][c];
            for (std::size_t j = c; j < cols; ++j) a[r][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

TEST_SUITE("twisted_cohomology") {

TEST_CASE("exact echelon rank matches dense elimination on random matrices") {
    gen::Gen g(9);
    for (int trial = 0; trial < 150; ++trial) {
        const int rows = g.integer(1, 9), cols = g.integer(1, 9);
        std::vector<std::vector<Rational>> dense(rows, std::vector<Rational>(cols, 0));
        ExactEchelon ech(cols);
        // Some rows are combinations of earlier ones to force dependencies.
        for (int r = 0; r < rows; ++r) {
            if (r >= 2 && g.coin()) {
                const Rational a = g.rational(), b = g.rational();
                for (int c = 0; c < cols; ++c) dense[r][c] = a * dense[r - 1][c] + b * dense[r - 2][c];
            } else {
                for (int c = 0; c < cols; ++c)
                    if (g.integer(0, 2) == 0) dense[r][c] = g.rational();
            }
            SparseRow row;
            for (int c = 0; c < cols; ++c)
                if (dense[r][c] != 0) row.emplace_back(c, dense[r][c]);
            ech.add_row(row);
        }
        CHECK(ech.rank() == dense_rank(dense));
    }
}

TEST_CASE("truncated complex basis sizes and matrices") {
    const TruncatedComplex tc = build_truncated(P("x1^2 + x2^2", 2), 2);
    CHECK(tc.domain[0].size() == 6);
    CHECK(tc.codomain[0].size() == 20);
    CHECK(tc.maps[0].cols == 6);
    CHECK(tc.maps[0].rows == 20);

    // p = x1: d_p(1) = -dx1, d_p(x1) = dx1 - x1 dx1.
    const TruncatedComplex line = build_truncated(P("x1", 1), 1);
    const FormBasis& cod = line.codomain[0];
    const std::size_t r0 = *cod.find(1, {0}), r1 = *cod.find(1, {1});
    const std::size_t c0 = *line.domain[0].find(0, {0}), c1 = *line.domain[0].find(0, {1});
    CHECK(line.maps[0].at(r0, c0) == -1);
    CHECK(line.maps[0].at(r1, c0) == 0);
    CHECK(line.maps[0].at(r0, c1) == 1);
    CHECK(line.maps[0].at(r1, c1) == -1);

    CHECK_THROWS_AS(build_truncated(Polynomial(2), 4), Error);
    CHECK_THROWS_AS(build_truncated(P("x1^3", 1), 2), Error);
}

TEST_CASE("cohomology dimensions on small inputs") {
    for (int D = 6; D <= 8; ++D) {
        CHECK(cohomology_dims(build_truncated(P("x1^2 + x2^2", 2), D)) == std::vector<int>{0, 0, 1});
    }
    for (int D = 3; D <= 6; ++D) {
        CHECK(cohomology_dims(build_truncated(P("x1", 1), D)) == std::vector<int>{0, 0});
    }
    // Constant p: polynomial de Rham cohomology.
    for (int D = 2; D <= 4; ++D) {
        CHECK(cohomology_dims(build_truncated(P("3", 2), D)) == std::vector<int>{1, 0, 0});
        CHECK(cohomology_dims(build_truncated(P("1", 1), D)) == std::vector<int>{1, 0});
    }
}

TEST_CASE("stabilization ladders") {
    CohomologyReport r = stabilize(P("x1^2 + x2^2", 2), 8);
    CHECK(r.stabilized);
    CHECK(r.dims == std::vector<int>{0, 0, 1});
    r = stabilize(P("x1^3 + x2^3", 2), 10);
    CHECK(r.stabilized);
    CHECK(r.dims == std::vector<int>{0, 0, 4});
    r = stabilize(P("x1^2 - x2^2", 2), 8);
    CHECK(r.stabilized);
    CHECK(r.dims == std::vector<int>{0, 0, 1});
    for (const auto& level : r.ladder) CHECK(level.composite_zero);
    CHECK_THROWS_AS(stabilize(P("x1^2", 1), 3), Error);

    const auto j = to_json(stabilize(P("x1^2 + x2^2", 2), 8));
    CHECK(j["stabilized"] == true);
    CHECK(j["ladder"].size() == 7);
    CHECK_FALSE(j.contains("warning"));
}

TEST_CASE("Jacobian quotient dimensions") {
    CHECK(jacobian_quotient_dim(P("x1^2 + x2^2", 2), 6) == 1);
    CHECK(jacobian_quotient_dim(P("x1^3 + x2^3", 2), 8) == 4);
    CHECK(jacobian_quotient_dim(P("x1", 1), 3) == 0);
    CHECK(jacobian_quotient_dim(P("x1^2 + x2^2 + x3^2", 3), 4) == 1);
}

TEST_CASE("property: top dimension equals the Milnor number for Brieskorn-Pham curves") {
    for (int a = 2; a <= 4; ++a) {
        for (int b = a; b <= 4; ++b) {
            const Polynomial p = P(("x1^" + std::to_string(a) + " + x2^" + std::to_string(b)).c_str(), 2);
            const CohomologyReport r = stabilize(p, b + 4);
            CAPTURE(a);
            CAPTURE(b);
            CHECK(r.stabilized);
            CHECK(r.dims.back() == (a - 1) * (b - 1));
            CHECK(r.dims.back() == jacobian_quotient_dim(p, b + 4));
        }
    }
}

TEST_CASE("property: dimensions are invariant under relabeling the variables") {
    gen::Gen g(31);
    const char* inputs[] = {"x1^2 + 2*x2^2 + x1", "x1^3 + x2^2 - x1*x2", "x1^2 + x2^2 + x3^2 + x1*x3",
                            "x1^2 - x2^2 + x2"};
    const int nvars[] = {2, 2, 3, 2};
    for (int i = 0; i < 4; ++i) {
        const Polynomial p = P(inputs[i], nvars[i]);
        const int D = p.total_degree() + 3;
        const auto dims = cohomology_dims(build_truncated(p, D));
        for (int trial = 0; trial < 3; ++trial) {
            const auto perm = g.permutation(nvars[i]);
            CHECK(cohomology_dims(build_truncated(p.permuted(perm), D)) == dims);
        }
    }
}

TEST_CASE("property: composite maps vanish on the window for random p") {
    gen::Gen g(8);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = g.integer(1, 3);
        Polynomial p = g.polynomial(n, 3, 4);
        if (p.is_zero()) p = Polynomial::variable(n, 0);
        const int D = std::max(p.total_degree(), 0) + g.integer(0, 2);
        CHECK(composite_zero_on_window(build_truncated(p, D)));
    }
}

}  // TEST_SUITE
