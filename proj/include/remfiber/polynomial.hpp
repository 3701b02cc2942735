#pragma once

// Exact sparse multivariate polynomials over the rationals.
//
// A Polynomial lives in a fixed number of variables x1..xn. Formal
// parameters (the scaling parameter s, the semigroup parameter a) are
// adjoined as extra trailing variables, so a "polynomial with parameter"
// in n spatial variables is simply a Polynomial in n+1 variables whose
// last variable is the parameter.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remfiber {

using Rational = mpq_class;
using Exponent = std::vector<int>;

int total_degree(const Exponent& e);

/// Graded lexicographic order: total degree first, ties broken
/// lexicographically with x1 > x2 > ... .
struct GrlexLess {
    bool operator()(const Exponent& a, const Exponent& b) const;
};

class Polynomial {
public:
    using TermMap = std::map<Exponent, Rational, GrlexLess>;

    explicit Polynomial(int n_vars = 1);

    static Polynomial constant(int n_vars, const Rational& c);
    /// The coordinate function x_{index+1} (index is 0-based).
    static Polynomial variable(int n_vars, int index);
    static Polynomial monomial(Exponent e, const Rational& c);

    int n_vars() const noexcept { return n_vars_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const;
    /// -1 for the zero polynomial.
    int total_degree() const;
    /// Highest exponent of variable `index` over all terms.
    int degree_in(int index) const;
    Rational coefficient(const Exponent& e) const;

    /// Adds c*x^e, dropping the term if the sum cancels.
    void add_term(const Exponent& e, const Rational& c);

    Polynomial derivative(int index) const;
    Polynomial pow(unsigned k) const;
    /// Embeds into `n` >= n_vars() variables; new variables come last.
    Polynomial extended(int n) const;
    /// Relabels variables: variable i becomes variable perm[i].
    Polynomial permuted(std::span<const int> perm) const;

    double evaluate(std::span<const double> x) const;
    Rational evaluate(std::span<const Rational> x) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Rational& c);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
    friend Polynomial operator-(Polynomial a);
    friend bool operator==(const Polynomial& a, const Polynomial& b);

private:
    void check_compatible(const Polynomial& o) const;

    int n_vars_;
    TermMap terms_;
};

/// x1..xn followed by one name per extra variable ("a" if there is one
/// extra variable, "a1", "a2", ... otherwise).
std::vector<std::string> default_variable_names(int n_spatial, int n_total);

/// Canonical text: terms in descending graded-lex order with explicit
/// `*` and `^`, e.g. "x1^2 - x1 - x2" or "3/4*x1*x2^2 + 1".
std::string to_string(const Polynomial& p,
                      std::span<const std::string> names = {});

/// Parses a polynomial in x1..x{n_vars}. Extra names (e.g. {"a"}) are
/// mapped to variables n_vars, n_vars+1, ...; the result then has
/// n_vars + params.size() variables. Throws ParseError.
Polynomial parse_polynomial(std::string_view text, int n_vars,
                            std::span<const std::string> params = {});

/// Partial derivatives with respect to the first `n_spatial` variables
/// (all variables when n_spatial < 0).
std::vector<Polynomial> gradient(const Polynomial& p, int n_spatial = -1);

/// m such that every term has total degree m; nullopt for mixed degrees.
/// The zero polynomial is rejected.
std::optional<int> homogeneity_degree(const Polynomial& p);

/// Substitutes x_i -> g[i]. All g[i] must share one variable count, which
/// becomes the variable count of the result.
Polynomial compose(const Polynomial& p, std::span<const Polynomial> g);

}  // namespace remfiber
