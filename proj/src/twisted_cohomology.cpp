#include "remfiber/twisted_cohomology.hpp"

#include "remfiber/error.hpp"

#include <algorithm>

namespace remfiber {

namespace {

// All exponents of length n with total degree exactly d.
void exponents_of_degree(int n, int d, Exponent& cur, int pos, std::vector<Exponent>& out) {
    if (pos == n - 1) {
        cur[pos] = d;
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= d; ++k) {
        cur[pos] = k;
        exponents_of_degree(n, d - k, cur, pos + 1, out);
    }
}

}  // namespace

MonomialBasis::MonomialBasis(int n_vars, int max_degree) : n_vars_(n_vars), max_degree_(max_degree) {
    Exponent cur(n_vars, 0);
    for (int d = 0; d <= max_degree; ++d) {
        std::vector<Exponent> level;
        exponents_of_degree(n_vars, d, cur, 0, level);
        std::sort(level.begin(), level.end(), GrlexLess{});
        monomials_.insert(monomials_.end(), level.begin(), level.end());
    }
    for (std::size_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i], i);
}

std::optional<std::size_t> MonomialBasis::find(const Exponent& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

FormBasis::FormBasis(int n_vars, int k, int max_degree)
    : k_(k), subsets_(subsets_of_size(n_vars, k)), monomials_(n_vars, max_degree) {
    for (std::size_t i = 0; i < subsets_.size(); ++i) subset_index_.emplace(subsets_[i], i);
}

std::optional<std::size_t> FormBasis::find(IndexSet s, const Exponent& e) const {
    auto si = subset_index_.find(s);
    if (si == subset_index_.end()) return std::nullopt;
    auto mi = monomials_.find(e);
    if (!mi) return std::nullopt;
    return si->second * monomials_.size() + *mi;
}

PolyForm FormBasis::element(std::size_t i) const {
    return PolyForm::basis(n_vars(), subset(i), Polynomial::monomial(monomial(i), Rational(1)));
}

Rational SparseMatrix::at(std::size_t r, std::size_t c) const {
    for (const auto& [row, v] : columns.at(c)) {
        if (static_cast<std::size_t>(row) == r) return v;
    }
    return 0;
}

TruncatedComplex build_truncated(const Polynomial& p, int D) {
    if (p.is_zero()) throw domain_error("build_truncated: zero polynomial");
    const int m = p.total_degree();
    if (D < m) {
        throw domain_error("build_truncated: truncation degree " + std::to_string(D) +
                           " below deg p = " + std::to_string(m));
    }
    const int n = p.n_vars();
    TruncatedComplex tc;
    tc.p = p;
    tc.D = D;
    tc.p_degree = m;
    tc.codomain_degree = D + std::max(m - 1, 0);
    for (int k = 0; k <= n; ++k) tc.domain.emplace_back(n, k, D);
    for (int k = 0; k < n; ++k) {
        tc.codomain.emplace_back(n, k + 1, tc.codomain_degree);
        const FormBasis& dom = tc.domain[k];
        const FormBasis& cod = tc.codomain[k];
        SparseMatrix M;
        M.rows = cod.size();
        M.cols = dom.size();
        M.columns.resize(dom.size());
        for (std::size_t j = 0; j < dom.size(); ++j) {
            PolyForm image = twisted_differential(dom.element(j), p);
            SparseRow& col = M.columns[j];
            for (const auto& [s, f] : image.components()) {
                for (const auto& [e, c] : f.terms()) {
                    auto row = cod.find(s, e);
                    if (!row) {
                        throw Error(ErrorKind::Internal, "d_p image escaped the codomain truncation");
                    }
                    col.emplace_back(static_cast<int>(*row), c);
                }
            }
            std::sort(col.begin(), col.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        tc.maps.push_back(std::move(M));
    }
    return tc;
}

namespace {

struct MapRanks {
    std::size_t high = 0;  // rank of the rows above the window
    std::size_t full = 0;
};

// Rank of M and of its rows whose monomial degree exceeds `window`.
MapRanks map_ranks(const SparseMatrix& M, const FormBasis& codomain, int window) {
    std::vector<SparseRow> rows(M.rows);
    for (std::size_t j = 0; j < M.cols; ++j) {
        for (const auto& [r, v] : M.columns[j]) rows[r].emplace_back(static_cast<int>(j), v);
    }
    ExactEchelon ech(M.cols);
    MapRanks out;
    for (std::size_t r = 0; r < M.rows; ++r) {
        if (total_degree(codomain.monomial(r)) > window) ech.add_row(rows[r]);
    }
    out.high = ech.rank();
    for (std::size_t r = 0; r < M.rows; ++r) {
        if (total_degree(codomain.monomial(r)) <= window) ech.add_row(rows[r]);
    }
    out.full = ech.rank();
    return out;
}

}  // namespace

std::vector<int> cohomology_dims(const TruncatedComplex& tc) {
    const int n = tc.n_vars();
    const int D = tc.D;

    std::vector<std::size_t> kernel(n + 1);
    for (int k = 0; k < n; ++k) {
        kernel[k] = tc.maps[k].cols - map_ranks(tc.maps[k], tc.codomain[k], D).full;
    }
    kernel[n] = tc.domain[n].size();

    // Image of M_{k-1} inside the window. For constant p, d lowers the
    // coefficient degree, so preimages of window elements may have degree D+1.
    std::optional<TruncatedComplex> wider;
    if (tc.p_degree == 0) wider = build_truncated(tc.p, D + 1);
    const TruncatedComplex& src = wider ? *wider : tc;

    std::vector<int> dims(n + 1, 0);
    for (int k = 0; k <= n; ++k) {
        std::size_t image = 0;
        if (k > 0) {
            MapRanks r = map_ranks(src.maps[k - 1], src.codomain[k - 1], D);
            image = r.full - r.high;
        }
        dims[k] = static_cast<int>(kernel[k]) - static_cast<int>(image);
    }
    return dims;
}

bool composite_zero_on_window(const TruncatedComplex& tc) {
    const int n = tc.n_vars();
    for (int k = 0; k + 1 < n; ++k) {
        const SparseMatrix& A = tc.maps[k];
        const SparseMatrix& B = tc.maps[k + 1];
        const FormBasis& mid_cod = tc.codomain[k];
        const FormBasis& mid_dom = tc.domain[k + 1];
        for (std::size_t j = 0; j < A.cols; ++j) {
            const SparseRow& col = A.columns[j];
            bool inside = true;
            for (const auto& [r, v] : col) {
                if (total_degree(mid_cod.monomial(r)) > tc.D) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            std::map<int, Rational> acc;
            for (const auto& [r, v] : col) {
                auto idx = mid_dom.find(mid_cod.subset(r), mid_cod.monomial(r));
                if (!idx) throw Error(ErrorKind::Internal, "window element missing from domain basis");
                for (const auto& [r2, w] : B.columns[*idx]) acc[r2] += v * w;
            }
            for (const auto& [r2, value] : acc) {
                if (value != 0) return false;
            }
        }
    }
    return true;
}

CohomologyReport stabilize(const Polynomial& p, int D_max) {
    if (p.is_zero()) throw domain_error("stabilize: zero polynomial");
    const int m = p.total_degree();
    if (D_max < m + 2) {
        throw domain_error("stabilize: D_max must be at least deg p + 2");
    }
    CohomologyReport rep;
    rep.polynomial = to_string(p);
    rep.n_vars = p.n_vars();
    for (int D = m; D <= D_max; ++D) {
        TruncatedComplex tc = build_truncated(p, D);
        rep.ladder.push_back(LadderLevel{D, cohomology_dims(tc), composite_zero_on_window(tc)});
    }
    const std::size_t L = rep.ladder.size();
    rep.stabilized = L >= 3 && rep.ladder[L - 1].dims == rep.ladder[L - 2].dims &&
                     rep.ladder[L - 2].dims == rep.ladder[L - 3].dims;
    rep.dims = rep.ladder.back().dims;
    return rep;
}

int jacobian_quotient_dim(const Polynomial& p, int D) {
    if (p.is_zero()) throw domain_error("jacobian_quotient_dim: zero polynomial");
    if (D < p.total_degree()) throw domain_error("jacobian_quotient_dim: D below deg p");
    const int n = p.n_vars();
    MonomialBasis basis(n, D);
    ExactEchelon ech(basis.size());
    for (const Polynomial& g : gradient(p)) {
        if (g.is_zero()) continue;
        const int dg = g.total_degree();
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (total_degree(basis[i]) + dg > D) break;
            Polynomial prod = g * Polynomial::monomial(basis[i], Rational(1));
            SparseRow row;
            for (const auto& [e, c] : prod.terms()) {
                row.emplace_back(static_cast<int>(*basis.find(e)), c);
            }
            ech.add_row(row);
        }
    }
    return static_cast<int>(basis.size() - ech.rank());
}

nlohmann::json to_json(const CohomologyReport& report) {
    nlohmann::json ladder = nlohmann::json::array();
    for (const auto& level : report.ladder) {
        ladder.push_back({{"D", level.D}, {"dims", level.dims}, {"composite_zero", level.composite_zero}});
    }
    nlohmann::json j = {
        {"polynomial", report.polynomial},
        {"n_vars", report.n_vars},
        {"ladder", ladder},
        {"stabilized", report.stabilized},
        {"dims", report.dims},
    };
    if (!report.stabilized) j["warning"] = "truncation ladder did not stabilize";
    return j;
}

}  // namespace remfiber
