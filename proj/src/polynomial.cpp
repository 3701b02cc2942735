#include "remfiber/polynomial.hpp"

#include "remfiber/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace remfiber {

int total_degree(const Exponent& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    // Same degree: a < b iff at the first difference a has the smaller
    // exponent of the earlier variable (so x1 ranks above x2).
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return a.size() < b.size();
}

Polynomial::Polynomial(int n_vars) : n_vars_(n_vars) {
    if (n_vars < 1) throw domain_error("polynomial needs at least one variable");
}

Polynomial Polynomial::constant(int n_vars, const Rational& c) {
    Polynomial p(n_vars);
    p.add_term(Exponent(n_vars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int n_vars, int index) {
    if (index < 0 || index >= n_vars) throw domain_error("variable index out of range");
    Exponent e(n_vars, 0);
    e[index] = 1;
    return monomial(std::move(e), Rational(1));
}

Polynomial Polynomial::monomial(Exponent e, const Rational& c) {
    Polynomial p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree() == 0);
}

int Polynomial::total_degree() const {
    if (terms_.empty()) return -1;
    return remfiber::total_degree(terms_.rbegin()->first);
}

int Polynomial::degree_in(int index) const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[index]);
    return d;
}

Rational Polynomial::coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
    if (static_cast<int>(e.size()) != n_vars_) {
        throw domain_error("exponent length does not match variable count");
    }
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::derivative(int index) const {
    Polynomial d(n_vars_);
    for (const auto& [e, c] : terms_) {
        if (e[index] == 0) continue;
        Exponent f = e;
        f[index] -= 1;
        d.add_term(f, c * e[index]);
    }
    return d;
}

Polynomial Polynomial::pow(unsigned k) const {
    Polynomial result = constant(n_vars_, 1);
    Polynomial base = *this;
    while (k > 0) {
        if (k & 1u) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

Polynomial Polynomial::extended(int n) const {
    if (n < n_vars_) throw domain_error("cannot shrink variable count");
    Polynomial out(n);
    for (const auto& [e, c] : terms_) {
        Exponent f = e;
        f.resize(n, 0);
        out.terms_.emplace(std::move(f), c);
    }
    return out;
}

Polynomial Polynomial::permuted(std::span<const int> perm) const {
    if (static_cast<int>(perm.size()) != n_vars_) {
        throw domain_error("permutation length does not match variable count");
    }
    Polynomial out(n_vars_);
    for (const auto& [e, c] : terms_) {
        Exponent f(n_vars_, 0);
        for (int i = 0; i < n_vars_; ++i) f[perm[i]] = e[i];
        out.add_term(f, c);
    }
    return out;
}

double Polynomial::evaluate(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = c.get_d();
        for (int i = 0; i < n_vars_; ++i) {
            if (e[i] != 0) term *= std::pow(x[i], e[i]);
        }
        sum += term;
    }
    return sum;
}

Rational Polynomial::evaluate(std::span<const Rational> x) const {
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational term = c;
        for (int i = 0; i < n_vars_; ++i) {
            for (int k = 0; k < e[i]; ++k) term *= x[i];
        }
        sum += term;
    }
    return sum;
}

void Polynomial::check_compatible(const Polynomial& o) const {
    if (o.n_vars_ != n_vars_) throw domain_error("mismatched variable counts");
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, coef] : terms_) coef *= c;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_compatible(b);
    Polynomial out(a.n_vars_);
    Exponent e(a.n_vars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (int i = 0; i < a.n_vars_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Polynomial operator-(Polynomial a) {
    for (auto& [e, c] : a.terms_) c = -c;
    return a;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_vars_ == b.n_vars_ && a.terms_ == b.terms_;
}

std::vector<std::string> default_variable_names(int n_spatial, int n_total) {
    std::vector<std::string> names;
    for (int i = 0; i < n_spatial; ++i) names.push_back("x" + std::to_string(i + 1));
    const int extra = n_total - n_spatial;
    for (int j = 0; j < extra; ++j) {
        names.push_back(extra == 1 ? std::string("a") : "a" + std::to_string(j + 1));
    }
    return names;
}

std::string to_string(const Polynomial& p, std::span<const std::string> names) {
    std::vector<std::string> owned;
    if (names.empty()) {
        owned = default_variable_names(p.n_vars(), p.n_vars());
        names = owned;
    }
    if (static_cast<int>(names.size()) < p.n_vars()) {
        throw domain_error("not enough variable names");
    }
    if (p.is_zero()) return "0";

    std::ostringstream out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        Rational mag = abs(c);
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;

        std::vector<std::string> factors;
        for (int i = 0; i < p.n_vars(); ++i) {
            if (e[i] == 0) continue;
            factors.push_back(e[i] == 1 ? names[i]
                                        : names[i] + "^" + std::to_string(e[i]));
        }
        bool wrote = false;
        if (mag != 1 || factors.empty()) {
            out << mag.get_str();
            wrote = true;
        }
        for (const auto& f : factors) {
            if (wrote) out << "*";
            out << f;
            wrote = true;
        }
    }
    return out.str();
}

std::vector<Polynomial> gradient(const Polynomial& p, int n_spatial) {
    const int n = n_spatial < 0 ? p.n_vars() : n_spatial;
    std::vector<Polynomial> g;
    g.reserve(n);
    for (int i = 0; i < n; ++i) g.push_back(p.derivative(i));
    return g;
}

std::optional<int> homogeneity_degree(const Polynomial& p) {
    if (p.is_zero()) throw domain_error("homogeneity degree of the zero polynomial");
    const int lo = total_degree(p.terms().begin()->first);
    const int hi = p.total_degree();
    if (lo != hi) return std::nullopt;
    return hi;
}

Polynomial compose(const Polynomial& p, std::span<const Polynomial> g) {
    if (static_cast<int>(g.size()) != p.n_vars()) {
        throw domain_error("compose: arity mismatch (" + std::to_string(g.size()) +
                           " substitutions for " + std::to_string(p.n_vars()) +
                           " variables)");
    }
    const int m = g.front().n_vars();
    for (const auto& gi : g) {
        if (gi.n_vars() != m) throw domain_error("compose: substitutions disagree on variable count");
    }
    // Cache powers of each substitution.
    std::vector<std::vector<Polynomial>> powers(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        powers[i].push_back(Polynomial::constant(m, 1));
        for (int k = 1; k <= p.degree_in(static_cast<int>(i)); ++k) {
            powers[i].push_back(powers[i].back() * g[i]);
        }
    }
    Polynomial out(m);
    for (const auto& [e, c] : p.terms()) {
        Polynomial term = Polynomial::constant(m, c);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (e[i] != 0) term = term * powers[i][e[i]];
        }
        out += term;
    }
    return out;
}

}  // namespace remfiber
