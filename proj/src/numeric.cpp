#include "remfiber/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace remfiber {

NumericPolynomial::NumericPolynomial(const Polynomial& p)
    : n_vars_(p.n_vars()), degree_(std::max(0, p.total_degree())), max_exp_(p.n_vars(), 0) {
    for (const auto& [e, c] : p.terms()) {
        terms_.push_back(Term{c.get_d(), e});
        for (int i = 0; i < n_vars_; ++i) max_exp_[i] = std::max(max_exp_[i], e[i]);
    }
    offset_.assign(n_vars_ + 1, 0);
    for (int i = 0; i < n_vars_; ++i) offset_[i + 1] = offset_[i] + max_exp_[i] + 1;
}

double NumericPolynomial::operator()(std::span<const double> x) const {
    if (terms_.empty()) return 0.0;
    // Power table per variable.
    thread_local std::vector<double> powers;
    const auto& offset = offset_;
    powers.assign(offset[n_vars_], 1.0);
    for (int i = 0; i < n_vars_; ++i) {
        for (int k = 1; k <= max_exp_[i]; ++k) powers[offset[i] + k] = powers[offset[i] + k - 1] * x[i];
    }
    double sum = 0.0;
    for (const auto& t : terms_) {
        double v = t.coefficient;
        for (int i = 0; i < n_vars_; ++i) v *= powers[offset[i] + t.exponent[i]];
        sum += v;
    }
    return sum;
}

ScalarField::ScalarField(const Polynomial& p) : exact_(p), value_(p) {
    const int n = p.n_vars();
    for (int i = 0; i < n; ++i) {
        Polynomial di = p.derivative(i);
        gradient_.emplace_back(di);
        for (int j = 0; j < n; ++j) hessian_.emplace_back(di.derivative(j));
    }
}

Point ScalarField::gradient(std::span<const double> x) const {
    Point g(gradient_.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = gradient_[i](x);
    return g;
}

std::vector<double> ScalarField::hessian(std::span<const double> x) const {
    std::vector<double> h(hessian_.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = hessian_[i](x);
    return h;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace remfiber
