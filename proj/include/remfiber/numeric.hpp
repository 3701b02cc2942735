#pragma once

// Double-precision evaluation of exact polynomials, for the numeric
// modules (sampling, flows, optimization).

#include "remfiber/polynomial.hpp"

#include <span>
#include <vector>

namespace remfiber {

using Point = std::vector<double>;

class NumericPolynomial {
public:
    NumericPolynomial() = default;
    explicit NumericPolynomial(const Polynomial& p);

    int n_vars() const noexcept { return n_vars_; }
    int degree() const noexcept { return degree_; }
    double operator()(std::span<const double> x) const;

private:
    struct Term {
        double coefficient;
        std::vector<int> exponent;
    };
    int n_vars_ = 0;
    int degree_ = 0;
    std::vector<int> max_exp_;
    std::vector<std::size_t> offset_;
    std::vector<Term> terms_;
};

/// A polynomial together with its first and second derivatives.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Polynomial& p);

    int n_vars() const noexcept { return value_.n_vars(); }
    const Polynomial& exact() const noexcept { return exact_; }

    double value(std::span<const double> x) const { return value_(x); }
    Point gradient(std::span<const double> x) const;
    /// Row-major n x n.
    std::vector<double> hessian(std::span<const double> x) const;

private:
    Polynomial exact_;
    NumericPolynomial value_;
    std::vector<NumericPolynomial> gradient_;
    std::vector<NumericPolynomial> hessian_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);

}  // namespace remfiber
