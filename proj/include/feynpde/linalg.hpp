#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "feynpde/polynomial.hpp"

namespace feynpde {

// Dense exact rational matrix, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, Rational(0)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Rational& at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    bool operator==(const RationalMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    static RationalMatrix identity(int n);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

struct RrefResult {
    RationalMatrix matrix;
    std::vector<int> pivot_columns;
    int rank() const { return static_cast<int>(pivot_columns.size()); }
};

// Reduced row-echelon form. Elimination is fraction-free (integer rows after
// clearing denominators), followed by pivot normalization and back-elimination.
// Pivot choice: leftmost nonzero column, then smallest surviving row index.
RrefResult rref(const RationalMatrix& m);

// Canonical kernel basis: one vector per free column, with entry 1 in the free
// position and zeros in the other free positions.
std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m);

// Some exact solution of A x = b (free variables set to 0), or nullopt.
std::optional<std::vector<Rational>> solve(const RationalMatrix& a, const std::vector<Rational>& b);

// Exact determinant (square matrices), via fraction-free elimination.
Rational determinant(const RationalMatrix& m);

using SparseRow = std::vector<std::pair<int, Rational>>; // (column, value) entries

// Streaming exact elimination for tall sparse systems: rows are folded one at
// a time into an echelon basis of at most ncols+1 rows. Used where the full
// coefficient matrix would be too large to materialize densely.
class IncrementalSolver {
public:
    explicit IncrementalSolver(int ncols) : ncols_(ncols) {}

    // Adds one equation (sparse lhs, rhs). Returns false if this row made the
    // system inconsistent (0 = nonzero).
    bool add_row(const SparseRow& row, const Rational& rhs);

    int rank() const { return static_cast<int>(rows_.size()); }
    bool saturated() const { return rank() == ncols_; }
    bool consistent() const { return !inconsistent_; }

    // Solution of the equations folded in so far, free variables set to 0.
    // With ignore_inconsistent, solves the consistent sub-basis anyway
    // (best-effort candidate for residual reporting).
    std::optional<std::vector<Rational>> solve(bool ignore_inconsistent = false) const;

    // Canonical kernel basis of the folded rows (as in nullspace()).
    std::vector<std::vector<Rational>> nullspace() const;

private:
    int ncols_;
    bool inconsistent_ = false;
    // pivot column -> reduced row (sparse, leading entry normalized to 1;
    // rhs carried at column index ncols_)
    std::map<int, SparseRow> rows_;
    // persistent scatter buffer for row reduction
    mutable std::vector<Rational> work_;
    mutable std::vector<bool> touched_;
};

} // namespace feynpde
