#include "doctest.h"
#include "generators.hpp"

#include "remfiber/error.hpp"
#include "remfiber/phi.hpp"

#include <cmath>
#include <sstream>

using namespace remfiber;

namespace {

Polynomial P(const char* text, int n) { return parse_polynomial(text, n); }
PolyForm F(const char* text, int n) { return parse_form(text, n); }

constexpr IndexSet S1 = 1, S2 = 2, S3 = 4;

std::vector<Point> circle_points(int count, double radius) {
    std::vector<Point> pts;
    for (int i = 0; i < count; ++i) {
        const double a = 2.0 * M_PI * (i + 0.3) / count;
        pts.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    return pts;
}

}  // namespace

TEST_SUITE("phi") {

TEST_CASE("Gaussian tail oracle at (2, 0)") {
    const PhiEvaluation ev = phi_eval(F("dx1^dx2", 2), P("x1^2 + x2^2", 2), {2.0, 0.0}, 1.0, 1e-12);
    CHECK(std::abs(ev.phi2_at(S2) - (-std::exp(-4.0) / 4.0)) <= 1e-9);
    CHECK(std::abs(ev.phi2_at(S1)) <= 1e-15);
    CHECK(ev.phi1_at(S1 | S2) == doctest::Approx(std::exp(-4.0)));
    CHECK(ev.tail_integrand <= 1e-14 * (1 + std::abs(ev.phi2_at(S2))));
    CHECK(ev.s_max == doctest::Approx(std::exp(ev.u_max)));
}

TEST_CASE("zero form and 0-forms") {
    const Polynomial p = P("x1^2 + x2^2", 2);
    const PhiEvaluation zero = phi_eval(PolyForm(2, 1), p, {1.5, 0.5}, 1.0, 1e-12);
    for (const auto& c : zero.phi2) CHECK(c.value == 0.0);
    for (const auto& c : zero.phi1) CHECK(c.value == 0.0);

    const PhiEvaluation scalar = phi_eval(F("x1 + 3", 2), p, {1.5, 0.5}, 1.0, 1e-12);
    CHECK(scalar.phi2.empty());
    CHECK(scalar.phi1_at(0) == doctest::Approx(4.5 * std::exp(-2.5)));

    CHECK(phi_cochain_residual(PolyForm(2, 1), p, circle_points(4, std::sqrt(2.0)), 1.0, 1e-12, 1e-4) == 0.0);
}

TEST_CASE("phi_eval preconditions") {
    const Polynomial p = P("x1^2 + x2^2", 2);
    CHECK_THROWS_AS(phi_eval(F("dx1", 2), P("x1^2 - x1", 2), {2.0, 0.0}, 1.0, 1e-12), Error);
    CHECK_THROWS_AS(phi_eval(F("dx1", 2), p, {0.5, 0.0}, 1.0, 1e-12), Error);
    CHECK_THROWS_AS(phi_eval(F("dx1", 2), p, {2.0, 0.0}, -1.0, 1e-12), Error);
    CHECK_THROWS_AS(phi_eval(F("dx1", 2), P("3", 2), {2.0, 0.0}, 1.0, 1e-12), Error);
}

TEST_CASE("cochain identity residual and its convergence in the quadrature tolerance") {
    const Polynomial p = P("x1^2 + x2^2", 2);
    const PolyForm w = F("x1*dx2", 2);
    const auto pts = circle_points(10, std::sqrt(2.0));
    const double fine = phi_cochain_residual(w, p, pts, 1.0, 1e-12, 1e-4);
    const double coarse = phi_cochain_residual(w, p, pts, 1.0, 1e-8, 1e-4);
    CHECK(fine <= 1e-6);
    CHECK(coarse >= 10 * fine);
    CHECK_THROWS_AS(phi_cochain_residual(w, p, pts, 1.0, 1e-12, 0.0), Error);
}

TEST_CASE("probe along the scaled flow reproduces the dilation integrand") {
    const Polynomial p = P("x1^2 + x2^2", 2);
    const PolyForm w = F("dx1^dx2", 2);
    const Point x{2.0, 0.0};
    const DecayTable table = probe_flow_decay(w, p, x, 5.0);
    REQUIRE(table.rows.size() == 13);
    CHECK(table.rows.front().sigma == 0.0);
    CHECK(table.rows.back().sigma == doctest::Approx(5.0));
    for (const DecayRow& row : table.rows) {
        for (std::size_t j = 0; j < table.subsets.size(); ++j) {
            const double ref = phi_integrand(w, p, x, std::exp(row.sigma / 2), table.subsets[j]) / 2;
            CAPTURE(row.sigma);
            CHECK(std::abs(row.components[j] - ref) <= 0.01 * std::abs(ref) + 1e-300);
        }
    }
    std::ostringstream csv;
    write_decay_csv(csv, table);
    CHECK(csv.str().rfind("sigma,", 0) == 0);

    const DecayTable zero = probe_flow_decay(PolyForm(2, 2), p, x, 5.0);
    for (const DecayRow& row : zero.rows) CHECK(row.magnitude == 0.0);
}

TEST_CASE("probe on a non-homogeneous input decays faster than any power") {
    const DecayTable table = probe_flow_decay(F("dx1^dx2", 2), P("x1^2 - x1 - x2", 2), {3.0, 1.0}, 5.0);
    REQUIRE(table.rows.size() >= 3);
    CHECK(table.rows.front().magnitude > 0);
    // e^{-p} alone at the start already drops below e^{-5}; later rows follow e^{-e^sigma p}.
    double prev = table.rows.front().magnitude;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        CHECK(table.rows[i].magnitude <= prev * (1 + 1e-6));
        prev = table.rows[i].magnitude;
    }
    CHECK(table.rows.back().magnitude <= 1e-100);
    CHECK_FALSE(table.evidence.empty());
    // Local exponents grow in magnitude: no power law fits.
    bool steep = false;
    for (double e : table.local_exponents) steep = steep || e < -20;
    CHECK(steep);
}

TEST_CASE("property: Gaussian tail oracles on random points") {
    gen::Gen g(55);
    const Polynomial p2 = P("x1^2 + x2^2", 2);
    const Polynomial p3 = P("x1^2 + x2^2 + x3^2", 3);
    const PolyForm top2 = F("dx1^dx2", 2), top3 = F("dx1^dx2^dx3", 3);
    for (int trial = 0; trial < 25; ++trial) {
        Point x = g.point(2, 2.5);
        double a = dot(x, x);
        if (a <= 1.2) continue;
        // -int_1^inf s e^{-a s^2} ds = -e^{-a} / (2a)
        const double I2 = std::exp(-a) / (2 * a);
        PhiEvaluation ev = phi_eval(top2, p2, x, 1.0, 1e-12);
        CHECK(ev.phi2_at(S2) == doctest::Approx(-x[0] * I2).epsilon(1e-9));
        CHECK(ev.phi2_at(S1) == doctest::Approx(x[1] * I2).epsilon(1e-9));

        Point y = g.point(3, 2.0);
        a = dot(y, y);
        if (a <= 1.2) continue;
        // int_1^inf s^2 e^{-a s^2} ds
        const double I3 = std::exp(-a) / (2 * a) + std::sqrt(M_PI) / (4 * a * std::sqrt(a)) * std::erfc(std::sqrt(a));
        ev = phi_eval(top3, p3, y, 1.0, 1e-12);
        CHECK(ev.phi2_at(S2 | S3) == doctest::Approx(-y[0] * I3).epsilon(1e-9));
        CHECK(ev.phi2_at(S1 | S3) == doctest::Approx(y[1] * I3).epsilon(1e-9));
        CHECK(ev.phi2_at(S1 | S2) == doctest::Approx(-y[2] * I3).epsilon(1e-9));
    }
}

TEST_CASE("property: cochain residual stays small for random forms") {
    gen::Gen g(61);
    const Polynomial p = P("x1^2 + x1*x2 + 2*x2^2", 2);
    for (int trial = 0; trial < 6; ++trial) {
        const int k = g.integer(0, 2);
        const PolyForm w = g.form(2, k, 2, 3);
        std::vector<Point> pts;
        while (pts.size() < 3) {
            Point x = g.point(2, 2.0);
            if (p.evaluate(x) > 1.5) pts.push_back(x);
        }
        CHECK(phi_cochain_residual(w, p, pts, 1.0, 1e-12, 1e-4) <= 1e-6);
    }
}

}  // TEST_SUITE
