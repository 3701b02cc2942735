#include "remfiber/exact_rank.hpp"

#include "remfiber/error.hpp"

#include <algorithm>

namespace remfiber {

ExactEchelon::ExactEchelon(std::size_t n_cols) : pivots_(n_cols) {}

void ExactEchelon::make_primitive(IntRow& row) {
    if (row.empty()) return;
    mpz_class g = 0;
    for (const auto& [c, v] : row) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        if (g == 1) break;
    }
    if (row.front().second < 0) g = -g;
    if (g != 1) {
        for (auto& [c, v] : row) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
    }
}

bool ExactEchelon::add_row(const SparseRow& input) {
    if (input.empty()) return false;

    // Clear denominators.
    mpz_class lcm = 1;
    for (const auto& [c, v] : input) {
        if (c < 0 || static_cast<std::size_t>(c) >= pivots_.size()) {
            throw Error(ErrorKind::Internal, "row entry outside the column range");
        }
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
    }
    IntRow row;
    row.reserve(input.size());
    for (const auto& [c, v] : input) {
        if (v == 0) continue;
        mpz_class scaled = v.get_num() * (lcm / v.get_den());
        row.emplace_back(c, std::move(scaled));
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    make_primitive(row);

    IntRow next;
    while (!row.empty()) {
        const int lead = row.front().first;
        const IntRow& piv = pivots_[lead];
        if (piv.empty()) {
            pivots_[lead] = std::move(row);
            ++rank_;
            return true;
        }
        // row <- a*row - b*piv with a = piv_lead/g, b = row_lead/g.
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), piv.front().second.get_mpz_t(), row.front().second.get_mpz_t());
        const mpz_class a = piv.front().second / g;
        const mpz_class b = row.front().second / g;

        next.clear();
        std::size_t i = 1, j = 1;
        while (i < row.size() || j < piv.size()) {
            if (j >= piv.size() || (i < row.size() && row[i].first < piv[j].first)) {
                next.emplace_back(row[i].first, a * row[i].second);
                ++i;
            } else if (i >= row.size() || piv[j].first < row[i].first) {
                next.emplace_back(piv[j].first, -b * piv[j].second);
                ++j;
            } else {
                mpz_class v = a * row[i].second - b * piv[j].second;
                if (v != 0) next.emplace_back(row[i].first, std::move(v));
                ++i;
                ++j;
            }
        }
        std::swap(row, next);
        make_primitive(row);
    }
    return false;
}

}  // namespace remfiber
