#pragma once

// Polynomial differential forms on R^n and the operators built from the
// Euler field R = sum x_i d/dx_i.

#include "remfiber/polynomial.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remfiber {

/// Strictly increasing index subset {i_1 < ... < i_k} of {0..n-1},
/// stored as a bitmask. Bit i stands for dx_{i+1}.
using IndexSet = std::uint32_t;

int set_size(IndexSet s);
std::vector<int> set_indices(IndexSet s);
IndexSet make_index_set(std::span<const int> indices);
/// All subsets of size k of {0..n-1}, in lexicographic order of their
/// index lists.
std::vector<IndexSet> subsets_of_size(int n, int k);
/// Sign of dx_A ^ dx_B relative to dx_{A u B}; 0 if A and B intersect.
int wedge_sign(IndexSet a, IndexSet b);

/// A homogeneous-degree differential form sum_I f_I dx_I.
///
/// `n_vars` is the dimension of the underlying space (the number of
/// covectors). Coefficients may carry extra trailing parameter variables,
/// so they are Polynomials in `n_coeff_vars` >= n_vars variables; d and
/// the Euler operators act on the spatial variables only.
class PolyForm {
public:
    using ComponentMap = std::map<IndexSet, Polynomial>;

    PolyForm(int n_vars, int degree, int n_coeff_vars = -1);

    static PolyForm from_polynomial(const Polynomial& f, int n_vars = -1);
    /// dx_{index+1}.
    static PolyForm covector(int n_vars, int index);
    static PolyForm basis(int n_vars, IndexSet s,
                          const Polynomial& coefficient);

    int n_vars() const noexcept { return n_vars_; }
    int n_coeff_vars() const noexcept { return n_coeff_vars_; }
    int degree() const noexcept { return degree_; }
    const ComponentMap& components() const noexcept { return components_; }
    bool is_zero() const noexcept { return components_.empty(); }
    Polynomial component(IndexSet s) const;

    void add_component(IndexSet s, const Polynomial& f);

    /// Embeds the coefficients into n >= n_coeff_vars() variables.
    PolyForm extended(int n) const;

    PolyForm& operator+=(const PolyForm& o);
    PolyForm& operator-=(const PolyForm& o);
    PolyForm& operator*=(const Rational& c);

    friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
    friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
    friend PolyForm operator*(PolyForm a, const Rational& c) { return a *= c; }
    friend PolyForm operator*(const Rational& c, PolyForm a) { return a *= c; }
    friend PolyForm operator-(PolyForm a) { return a *= Rational(-1); }
    friend bool operator==(const PolyForm& a, const PolyForm& b);

private:
    void check_compatible(const PolyForm& o) const;

    int n_vars_;
    int n_coeff_vars_;
    int degree_;
    ComponentMap components_;
};

/// Canonical text, e.g. "(1 - 2*x1^2)*dx1^dx2" or "x2*dx1 + x1*dx2".
std::string to_string(const PolyForm& w,
                      std::span<const std::string> names = {});

/// Parses a form such as "x1*dx2 - x2*dx1" or "(x1 + 1)*dx1^dx2".
/// Covectors dx1..dxn multiply by wedge; all terms must share one form
/// degree. Throws ParseError.
PolyForm parse_form(std::string_view text, int n_vars,
                    std::span<const std::string> params = {});

PolyForm exterior_derivative(const PolyForm& w);
PolyForm wedge(const PolyForm& a, const PolyForm& b);
/// d_p(w) = dw - dp ^ w.
PolyForm twisted_differential(const PolyForm& w, const Polynomial& p);
/// Contraction with the Euler field R.
PolyForm interior_product_euler(const PolyForm& w);
/// L_R w computed through the Cartan formula d i_R w + i_R d w.
PolyForm lie_derivative_euler(const PolyForm& w);

/// Formal scaling x_i -> s^{w_i} x_i with positive integer weights.
struct FormalScaling {
    std::string parameter = "s";
    std::vector<int> weights;

    static FormalScaling uniform(int n_vars, int weight = 1);
    void validate(int n_vars) const;
};

/// Pullback under the formal scaling. The result carries the parameter
/// as one extra trailing coefficient variable.
PolyForm pullback_scaling(const PolyForm& w, const FormalScaling& sigma);
Polynomial pullback_scaling(const Polynomial& p, const FormalScaling& sigma);

}  // namespace remfiber
