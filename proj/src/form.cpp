#include "remfiber/form.hpp"

#include "remfiber/error.hpp"

#include <bit>
#include <sstream>

namespace remfiber {

int set_size(IndexSet s) { return std::popcount(s); }

std::vector<int> set_indices(IndexSet s) {
    std::vector<int> out;
    for (int i = 0; s != 0; ++i, s >>= 1) {
        if (s & 1u) out.push_back(i);
    }
    return out;
}

IndexSet make_index_set(std::span<const int> indices) {
    IndexSet s = 0;
    for (int i : indices) {
        if (i < 0 || i >= 32) throw domain_error("index out of range");
        s |= IndexSet{1} << i;
    }
    return s;
}

std::vector<IndexSet> subsets_of_size(int n, int k) {
    std::vector<IndexSet> out;
    if (k < 0 || k > n) return out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.push_back(make_index_set(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

int wedge_sign(IndexSet a, IndexSet b) {
    if (a & b) return 0;
    // Count inversions: pairs (i in a, j in b) with i > j.
    int inversions = 0;
    for (int j : set_indices(b)) {
        inversions += std::popcount(a >> (j + 1));
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

PolyForm::PolyForm(int n_vars, int degree, int n_coeff_vars)
    : n_vars_(n_vars),
      n_coeff_vars_(n_coeff_vars < 0 ? n_vars : n_coeff_vars),
      degree_(degree) {
    if (n_vars < 1 || n_vars > 16) throw domain_error("form dimension out of range");
    if (degree < 0 || degree > n_vars) throw domain_error("form degree out of range");
    if (n_coeff_vars_ < n_vars_) throw domain_error("coefficient ring smaller than space");
}

PolyForm PolyForm::from_polynomial(const Polynomial& f, int n_vars) {
    const int n = n_vars < 0 ? f.n_vars() : n_vars;
    PolyForm w(n, 0, f.n_vars());
    w.add_component(0, f);
    return w;
}

PolyForm PolyForm::covector(int n_vars, int index) {
    return basis(n_vars, IndexSet{1} << index, Polynomial::constant(n_vars, 1));
}

PolyForm PolyForm::basis(int n_vars, IndexSet s, const Polynomial& coefficient) {
    PolyForm w(n_vars, set_size(s), coefficient.n_vars());
    w.add_component(s, coefficient);
    return w;
}

Polynomial PolyForm::component(IndexSet s) const {
    auto it = components_.find(s);
    return it == components_.end() ? Polynomial(n_coeff_vars_) : it->second;
}

void PolyForm::add_component(IndexSet s, const Polynomial& f) {
    if (set_size(s) != degree_) throw domain_error("component index set has wrong size");
    if (n_vars_ < 32 && (s >> n_vars_) != 0) throw domain_error("component index out of range");
    if (f.n_vars() != n_coeff_vars_) throw domain_error("coefficient has wrong variable count");
    if (f.is_zero()) return;
    auto [it, inserted] = components_.try_emplace(s, f);
    if (!inserted) {
        it->second += f;
        if (it->second.is_zero()) components_.erase(it);
    }
}

PolyForm PolyForm::extended(int n) const {
    PolyForm out(n_vars_, degree_, n);
    for (const auto& [s, f] : components_) out.components_.emplace(s, f.extended(n));
    return out;
}

void PolyForm::check_compatible(const PolyForm& o) const {
    if (o.n_vars_ != n_vars_ || o.n_coeff_vars_ != n_coeff_vars_) {
        throw domain_error("mismatched form spaces");
    }
    if (o.degree_ != degree_) throw domain_error("mismatched form degrees");
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
    check_compatible(o);
    for (const auto& [s, f] : o.components_) add_component(s, f);
    return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& o) {
    check_compatible(o);
    for (const auto& [s, f] : o.components_) add_component(s, -f);
    return *this;
}

PolyForm& PolyForm::operator*=(const Rational& c) {
    if (c == 0) {
        components_.clear();
        return *this;
    }
    for (auto& [s, f] : components_) f *= c;
    return *this;
}

bool operator==(const PolyForm& a, const PolyForm& b) {
    if (a.n_vars_ != b.n_vars_ || a.n_coeff_vars_ != b.n_coeff_vars_) return false;
    // Zero forms of different degree still differ as elements of the graded algebra.
    return a.degree_ == b.degree_ && a.components_ == b.components_;
}

std::string to_string(const PolyForm& w, std::span<const std::string> names) {
    std::vector<std::string> owned;
    if (names.empty()) {
        owned = default_variable_names(w.n_vars(), w.n_coeff_vars());
        names = owned;
    }
    if (w.is_zero()) return "0";
    if (w.degree() == 0) return to_string(w.component(0), names);

    // Order components lexicographically by their index lists.
    std::ostringstream out;
    bool first = true;
    for (IndexSet s : subsets_of_size(w.n_vars(), w.degree())) {
        auto it = w.components().find(s);
        if (it == w.components().end()) continue;
        const Polynomial& f = it->second;
        std::string covectors;
        for (int i : set_indices(s)) {
            if (!covectors.empty()) covectors += "^";
            covectors += "dx" + std::to_string(i + 1);
        }
        const bool single = f.terms().size() == 1;
        const bool negative = single && f.terms().begin()->second < 0;
        if (!first) out << (negative ? " - " : " + ");
        else if (negative) out << "-";
        first = false;

        Polynomial shown = negative ? -f : f;
        if (shown == Polynomial::constant(f.n_vars(), 1)) {
            out << covectors;
        } else if (single) {
            out << to_string(shown, names) << "*" << covectors;
        } else {
            out << "(" << to_string(shown, names) << ")*" << covectors;
        }
    }
    return out.str();
}

PolyForm exterior_derivative(const PolyForm& w) {
    const int n = w.n_vars();
    if (w.degree() == n) return PolyForm(n, n, w.n_coeff_vars());
    PolyForm out(n, w.degree() + 1, w.n_coeff_vars());
    for (const auto& [s, f] : w.components()) {
        for (int i = 0; i < n; ++i) {
            const IndexSet di = IndexSet{1} << i;
            const int sign = wedge_sign(di, s);
            if (sign == 0) continue;
            Polynomial df = f.derivative(i);
            if (df.is_zero()) continue;
            out.add_component(di | s, sign > 0 ? df : -df);
        }
    }
    return out;
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
    if (a.n_vars() != b.n_vars() || a.n_coeff_vars() != b.n_coeff_vars()) {
        throw domain_error("wedge: mismatched form spaces");
    }
    const int n = a.n_vars();
    const int k = a.degree() + b.degree();
    if (k > n) return PolyForm(n, n, a.n_coeff_vars());
    PolyForm out(n, k, a.n_coeff_vars());
    for (const auto& [sa, fa] : a.components()) {
        for (const auto& [sb, fb] : b.components()) {
            const int sign = wedge_sign(sa, sb);
            if (sign == 0) continue;
            Polynomial prod = fa * fb;
            out.add_component(sa | sb, sign > 0 ? prod : -prod);
        }
    }
    return out;
}

PolyForm twisted_differential(const PolyForm& w, const Polynomial& p) {
    const int n = w.n_vars();
    Polynomial pe = p;
    if (p.n_vars() != w.n_coeff_vars()) {
        if (p.n_vars() != n) throw domain_error("twisted_differential: mismatched variable counts");
        pe = p.extended(w.n_coeff_vars());
    }
    PolyForm dp = exterior_derivative(PolyForm::from_polynomial(pe, n));
    PolyForm dw = exterior_derivative(w);
    if (w.degree() == n) return dw;
    return dw - wedge(dp, w);
}

PolyForm interior_product_euler(const PolyForm& w) {
    const int n = w.n_vars();
    if (w.degree() == 0) return PolyForm(n, 0, w.n_coeff_vars());
    PolyForm out(n, w.degree() - 1, w.n_coeff_vars());
    for (const auto& [s, f] : w.components()) {
        const auto idx = set_indices(s);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            Polynomial term = f * Polynomial::variable(w.n_coeff_vars(), idx[j]);
            if (j % 2 == 1) term = -term;
            out.add_component(s & ~(IndexSet{1} << idx[j]), term);
        }
    }
    return out;
}

PolyForm lie_derivative_euler(const PolyForm& w) {
    PolyForm a = exterior_derivative(interior_product_euler(w));
    if (w.degree() == w.n_vars()) return a;
    PolyForm b = interior_product_euler(exterior_derivative(w));
    return w.degree() == 0 ? b : a + b;
}

FormalScaling FormalScaling::uniform(int n_vars, int weight) {
    return FormalScaling{"s", std::vector<int>(n_vars, weight)};
}

void FormalScaling::validate(int n_vars) const {
    if (static_cast<int>(weights.size()) != n_vars) {
        throw domain_error("scaling weights do not match variable count");
    }
    for (int w : weights) {
        if (w <= 0) throw domain_error("scaling weights must be positive");
    }
}

namespace {

Polynomial scale_coefficient(const Polynomial& f, const FormalScaling& sigma,
                             int n_spatial, int extra_weight) {
    const int n_out = f.n_vars() + 1;
    Polynomial out(n_out);
    for (const auto& [e, c] : f.terms()) {
        Exponent g = e;
        int s_power = extra_weight;
        for (int i = 0; i < n_spatial; ++i) s_power += sigma.weights[i] * e[i];
        g.push_back(s_power);
        out.add_term(g, c);
    }
    return out;
}

}  // namespace

PolyForm pullback_scaling(const PolyForm& w, const FormalScaling& sigma) {
    sigma.validate(w.n_vars());
    PolyForm out(w.n_vars(), w.degree(), w.n_coeff_vars() + 1);
    for (const auto& [s, f] : w.components()) {
        int covector_weight = 0;
        for (int i : set_indices(s)) covector_weight += sigma.weights[i];
        out.add_component(s, scale_coefficient(f, sigma, w.n_vars(), covector_weight));
    }
    return out;
}

Polynomial pullback_scaling(const Polynomial& p, const FormalScaling& sigma) {
    const int n = static_cast<int>(sigma.weights.size());
    sigma.validate(n);
    if (p.n_vars() < n) throw domain_error("scaling has more weights than variables");
    return scale_coefficient(p, sigma, n, 0);
}

}  // namespace remfiber
