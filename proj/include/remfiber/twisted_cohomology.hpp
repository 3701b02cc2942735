#pragma once

// Dimensions of H^k(Omega, d_p) for polynomial forms, computed exactly on
// degree-truncated slices of the complex.

#include "remfiber/exact_rank.hpp"
#include "remfiber/form.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace remfiber {

/// Monomials of total degree <= max_degree in ascending graded-lex order.
class MonomialBasis {
public:
    MonomialBasis(int n_vars, int max_degree);

    int n_vars() const noexcept { return n_vars_; }
    int max_degree() const noexcept { return max_degree_; }
    std::size_t size() const noexcept { return monomials_.size(); }
    const Exponent& operator[](std::size_t i) const { return monomials_[i]; }
    std::optional<std::size_t> find(const Exponent& e) const;

private:
    int n_vars_;
    int max_degree_;
    std::vector<Exponent> monomials_;
    std::map<Exponent, std::size_t> index_;
};

/// Basis x^e dx_I of k-forms with coefficient degree <= max_degree,
/// ordered by index set (lexicographic) then monomial (graded-lex).
class FormBasis {
public:
    FormBasis(int n_vars, int k, int max_degree);

    int n_vars() const noexcept { return monomials_.n_vars(); }
    int form_degree() const noexcept { return k_; }
    int max_degree() const noexcept { return monomials_.max_degree(); }
    std::size_t size() const noexcept { return subsets_.size() * monomials_.size(); }

    IndexSet subset(std::size_t i) const { return subsets_[i / monomials_.size()]; }
    const Exponent& monomial(std::size_t i) const { return monomials_[i % monomials_.size()]; }
    std::optional<std::size_t> find(IndexSet s, const Exponent& e) const;
    PolyForm element(std::size_t i) const;

private:
    int k_;
    std::vector<IndexSet> subsets_;
    std::map<IndexSet, std::size_t> subset_index_;
    MonomialBasis monomials_;
};

struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    /// columns[j] lists (row, value) with distinct rows, ascending.
    std::vector<SparseRow> columns;

    Rational at(std::size_t r, std::size_t c) const;
};

/// d_p restricted to forms of coefficient degree <= D.
///
/// maps[k] sends the degree-<=D slice of k-forms (domain[k]) into the
/// degree-<=codomain_degree slice of (k+1)-forms (codomain[k]), where
/// codomain_degree = D + max(deg p - 1, 0). The range is exact: d_p never
/// produces a coefficient of higher degree.
struct TruncatedComplex {
    Polynomial p;
    int D = 0;
    int p_degree = 0;
    int codomain_degree = 0;
    std::vector<FormBasis> domain;    // k = 0..n
    std::vector<FormBasis> codomain;  // k = 0..n-1, basis of (k+1)-forms
    std::vector<SparseMatrix> maps;   // k = 0..n-1

    int n_vars() const { return p.n_vars(); }
};

/// Throws for D < deg p and for the zero polynomial.
TruncatedComplex build_truncated(const Polynomial& p, int D);

/// Per-k estimate of dim H^k at truncation level D:
///   dim ker(M_k on the degree-<=D slice)
///     - dim(im M_{k-1} intersected with the degree-<=D slice).
/// For constant p the image is taken from the degree-<=D+1 slice, since d
/// lowers degree by one.
std::vector<int> cohomology_dims(const TruncatedComplex& tc);

/// M_{k+1} M_k = 0 on every basis column of M_k whose image stays inside
/// the degree-<=D window.
bool composite_zero_on_window(const TruncatedComplex& tc);

struct LadderLevel {
    int D = 0;
    std::vector<int> dims;
    bool composite_zero = true;
};

struct CohomologyReport {
    std::string polynomial;
    int n_vars = 0;
    std::vector<LadderLevel> ladder;
    /// True only when the last three ladder levels agree for every k.
    bool stabilized = false;
    std::vector<int> dims;
};

/// Runs cohomology_dims for D = deg p .. D_max. Stability is evidence,
/// not proof.
CohomologyReport stabilize(const Polynomial& p, int D_max);

/// dim of (polynomials of degree <= D) modulo the span of x^e * dp/dx_i
/// of degree <= D. Stabilizes to the total Milnor number for p with
/// isolated critical points.
int jacobian_quotient_dim(const Polynomial& p, int D);

nlohmann::json to_json(const CohomologyReport& report);

}  // namespace remfiber
