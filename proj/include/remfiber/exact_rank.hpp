#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <utility>
#include <vector>

namespace remfiber {

using SparseRow = std::vector<std::pair<int, mpq_class>>;

/// Incremental row echelon form over the integers.
///
/// Rows are scaled to primitive integer vectors on entry and reduced
/// fraction-free against the stored pivots (pivot = leading column, rows
/// consumed in insertion order), so the rank is exact and the pivot
/// structure is deterministic.
class ExactEchelon {
public:
    explicit ExactEchelon(std::size_t n_cols);

    /// Returns true if the row was independent of the rows added so far.
    /// Entries must have distinct columns; order does not matter.
    bool add_row(const SparseRow& row);

    std::size_t rank() const noexcept { return rank_; }
    std::size_t n_cols() const noexcept { return pivots_.size(); }

private:
    using IntRow = std::vector<std::pair<int, mpz_class>>;

    static void make_primitive(IntRow& row);

    std::vector<IntRow> pivots_;  // indexed by leading column; empty if none
    std::size_t rank_ = 0;
};

}  // namespace remfiber
