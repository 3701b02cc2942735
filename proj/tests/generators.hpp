#pragma once

// Hand-rolled random generators for property tests. Everything is driven by
// one 64-bit seed so failures replay.

#include "remfiber/form.hpp"
#include "remfiber/numeric.hpp"
#include "remfiber/polynomial.hpp"

#include <random>

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    remfiber::Rational rational() {
        int num = 0;
        while (num == 0) num = integer(-6, 6);
        remfiber::Rational q(num, integer(1, 4));
        q.canonicalize();
        return q;
    }

    remfiber::Exponent exponent(int n, int max_degree) {
        const int d = integer(0, max_degree);
        remfiber::Exponent e(n, 0);
        for (int i = 0; i < d; ++i) ++e[integer(0, n - 1)];
        return e;
    }

    remfiber::Polynomial polynomial(int n, int max_degree, int max_terms) {
        remfiber::Polynomial p(n);
        const int terms = integer(0, max_terms);
        for (int i = 0; i < terms; ++i) p.add_term(exponent(n, max_degree), rational());
        return p;
    }

    remfiber::PolyForm form(int n, int k, int max_degree, int max_terms) {
        remfiber::PolyForm w(n, k);
        const auto subsets = remfiber::subsets_of_size(n, k);
        const int terms = integer(0, max_terms);
        for (int i = 0; i < terms; ++i) {
            const auto s = subsets[integer(0, static_cast<int>(subsets.size()) - 1)];
            w.add_component(s, remfiber::Polynomial::monomial(exponent(n, max_degree), rational()));
        }
        return w;
    }

    remfiber::Point point(int n, double radius) {
        remfiber::Point x(n);
        for (double& v : x) v = real(-radius, radius);
        return x;
    }

    std::vector<int> permutation(int n) {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng_);
        return perm;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace gen
