#include "feynpde/linalg.hpp"

#include <algorithm>

namespace feynpde {

RationalMatrix RationalMatrix::identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

namespace {

// Integer row-echelon elimination (Bareiss-style two-row updates keep entries
// integral); returns pivot (row, col) pairs in elimination order.
struct EchelonState {
    std::vector<std::vector<Integer>> rows;
    std::vector<std::pair<int, int>> pivots; // (row, col)
};

EchelonState integer_echelon(const RationalMatrix& m) {
    const int nr = m.rows(), nc = m.cols();
    EchelonState st;
    st.rows.assign(nr, std::vector<Integer>(nc));
    for (int r = 0; r < nr; ++r) {
        Integer lcm = 1;
        for (int c = 0; c < nc; ++c) {
            const Rational& v = m.at(r, c);
            if (v != 0) {
                Integer den = v.get_den();
                lcm = lcm / gcd(lcm, den) * den;
            }
        }
        for (int c = 0; c < nc; ++c) {
            const Rational& v = m.at(r, c);
            Rational scaled = v * Rational(lcm);
            st.rows[r][c] = scaled.get_num();
        }
    }

    int pr = 0; // next pivot row slot
    Integer prev_pivot = 1;
    for (int pc = 0; pc < nc && pr < nr; ++pc) {
        int pivot_row = -1;
        for (int r = pr; r < nr; ++r) {
            if (st.rows[r][pc] != 0) { pivot_row = r; break; } // smallest row index
        }
        if (pivot_row == -1) continue;
        std::swap(st.rows[pr], st.rows[pivot_row]);
        const Integer pivot = st.rows[pr][pc];
        for (int r = pr + 1; r < nr; ++r) {
            std::vector<Integer>& row = st.rows[r];
            const Integer factor = row[pc];
            for (int c = 0; c < nc; ++c) {
                row[c] = (pivot * row[c] - factor * st.rows[pr][c]) / prev_pivot;
            }
        }
        st.pivots.emplace_back(pr, pc);
        prev_pivot = pivot;
        ++pr;
    }
    return st;
}

} // namespace

RrefResult rref(const RationalMatrix& m) {
    const int nc = m.cols();
    EchelonState st = integer_echelon(m);

    RrefResult result;
    result.matrix = RationalMatrix(m.rows(), nc);
    for (const auto& [r, c] : st.pivots) result.pivot_columns.push_back(c);

    // Normalize pivot rows to rationals and back-eliminate.
    const int rank = static_cast<int>(st.pivots.size());
    std::vector<std::vector<Rational>> rows(rank, std::vector<Rational>(nc, Rational(0)));
    for (int i = 0; i < rank; ++i) {
        const auto& [r, c] = st.pivots[i];
        const Integer& pivot = st.rows[r][c];
        for (int j = c; j < nc; ++j)
            rows[i][j] = Rational(st.rows[r][j]) / Rational(pivot);
    }
    for (int i = rank - 1; i >= 0; --i) {
        const int pc = st.pivots[i].second;
        for (int k = 0; k < i; ++k) {
            const Rational factor = rows[k][pc];
            if (factor == 0) continue;
            for (int j = pc; j < nc; ++j) rows[k][j] -= factor * rows[i][j];
        }
    }
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < nc; ++j) result.matrix.at(i, j) = rows[i][j];
    return result;
}

std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m) {
    RrefResult r = rref(m);
    const int nc = m.cols();
    std::vector<bool> is_pivot(nc, false);
    for (int c : r.pivot_columns) is_pivot[c] = true;

    std::vector<std::vector<Rational>> basis;
    for (int free = 0; free < nc; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(nc, Rational(0));
        v[free] = 1;
        for (int i = 0; i < r.rank(); ++i)
            v[r.pivot_columns[i]] = -r.matrix.at(i, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<std::vector<Rational>> solve(const RationalMatrix& a, const std::vector<Rational>& b) {
    require(static_cast<int>(b.size()) == a.rows(), "solve: rhs length mismatch");
    RationalMatrix aug(a.rows(), a.cols() + 1);
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, a.cols()) = b[r];
    }
    RrefResult red = rref(aug);
    for (int c : red.pivot_columns)
        if (c == a.cols()) return std::nullopt; // 0 = 1 row
    std::vector<Rational> x(a.cols(), Rational(0));
    for (int i = 0; i < red.rank(); ++i)
        x[red.pivot_columns[i]] = red.matrix.at(i, a.cols());
    return x;
}

Rational determinant(const RationalMatrix& m) {
    require(m.rows() == m.cols(), "determinant: matrix not square");
    const int n = m.rows();
    if (n == 0) return 1;

    // Track the row-scaling used to clear denominators, and the row swaps.
    Rational scale = 1;
    std::vector<std::vector<Integer>> rows(n, std::vector<Integer>(n));
    for (int r = 0; r < n; ++r) {
        Integer lcm = 1;
        for (int c = 0; c < n; ++c) {
            const Rational& v = m.at(r, c);
            if (v != 0) {
                Integer den = v.get_den();
                lcm = lcm / gcd(lcm, den) * den;
            }
        }
        scale *= Rational(lcm);
        for (int c = 0; c < n; ++c) rows[r][c] = Rational(m.at(r, c) * Rational(lcm)).get_num();
    }

    int sign = 1;
    Integer prev = 1;
    for (int pc = 0; pc < n; ++pc) {
        int pivot_row = -1;
        for (int r = pc; r < n; ++r)
            if (rows[r][pc] != 0) { pivot_row = r; break; }
        if (pivot_row == -1) return 0;
        if (pivot_row != pc) { std::swap(rows[pc], rows[pivot_row]); sign = -sign; }
        for (int r = pc + 1; r < n; ++r) {
            for (int c = pc + 1; c < n; ++c)
                rows[r][c] = (rows[pc][pc] * rows[r][c] - rows[r][pc] * rows[pc][c]) / prev;
            rows[r][pc] = 0;
        }
        prev = rows[pc][pc];
    }
    return Rational(sign) * Rational(rows[n - 1][n - 1]) / scale;
}

bool IncrementalSolver::add_row(const SparseRow& row_in, const Rational& rhs) {
    if (inconsistent_) return false;
    const int w = ncols_ + 1;
    if (static_cast<int>(work_.size()) != w) {
        work_.assign(w, Rational(0));
        touched_.assign(w, false);
    }

    // Scatter the row into the dense buffer, then eliminate pivot columns in
    // ascending order against the sparse basis rows.
    std::vector<int> dirty;
    dirty.reserve(row_in.size() + 8);
    auto touch = [&](int c) {
        if (!touched_[c]) {
            touched_[c] = true;
            dirty.push_back(c);
        }
    };
    for (const auto& [c, v] : row_in) {
        work_[c] += v;
        touch(c);
    }
    if (rhs != 0) {
        work_[ncols_] += rhs;
        touch(ncols_);
    }

    int lead = -1;
    for (int c = 0; c < w; ++c) {
        if (!touched_[c] || work_[c] == 0) continue;
        auto it = rows_.find(c);
        if (it == rows_.end()) {
            lead = c;
            break;
        }
        const Rational factor = work_[c]; // basis leading entry is 1
        for (const auto& [bc, bv] : it->second) {
            work_[bc] -= factor * bv;
            touch(bc);
        }
    }

    bool ok = true;
    SparseRow reduced;
    if (lead == ncols_) {
        inconsistent_ = true;
        ok = false;
    } else if (lead >= 0) {
        const Rational lead_val = work_[lead];
        reduced.reserve(dirty.size());
        for (int c = lead; c < w; ++c)
            if (touched_[c] && work_[c] != 0) reduced.emplace_back(c, work_[c] / lead_val);
    }
    for (int c : dirty) {
        work_[c] = 0;
        touched_[c] = false;
    }
    if (!reduced.empty()) rows_.emplace(reduced.front().first, std::move(reduced));
    return ok;
}

namespace {

// Back-eliminate the echelon basis into reduced form (pivot columns cleared
// above each pivot). rows_ is keyed by pivot column, ascending.
std::map<int, SparseRow> reduce_basis(const std::map<int, SparseRow>& rows) {
    std::map<int, SparseRow> reduced = rows;
    for (auto it = reduced.rbegin(); it != reduced.rend(); ++it) {
        const int pivot_col = it->first;
        const SparseRow& pivot_row = it->second;
        for (auto jt = reduced.begin(); jt != reduced.end() && jt->first < pivot_col; ++jt) {
            SparseRow& target = jt->second;
            Rational factor = 0;
            for (const auto& [c, v] : target)
                if (c == pivot_col) { factor = v; break; }
            if (factor == 0) continue;
            SparseRow merged;
            merged.reserve(target.size() + pivot_row.size());
            std::size_t i = 0, j = 0;
            while (i < target.size() || j < pivot_row.size()) {
                if (j == pivot_row.size() ||
                    (i < target.size() && target[i].first < pivot_row[j].first)) {
                    merged.push_back(target[i++]);
                } else if (i == target.size() || pivot_row[j].first < target[i].first) {
                    merged.emplace_back(pivot_row[j].first, -factor * pivot_row[j].second);
                    ++j;
                } else {
                    Rational v = target[i].second - factor * pivot_row[j].second;
                    if (v != 0) merged.emplace_back(target[i].first, std::move(v));
                    ++i;
                    ++j;
                }
            }
            target = std::move(merged);
        }
    }
    return reduced;
}

} // namespace

std::optional<std::vector<Rational>> IncrementalSolver::solve(bool ignore_inconsistent) const {
    if (inconsistent_ && !ignore_inconsistent) return std::nullopt;
    auto reduced = reduce_basis(rows_);
    std::vector<Rational> x(ncols_, Rational(0));
    for (const auto& [pivot_col, row] : reduced) {
        for (const auto& [c, v] : row)
            if (c == ncols_) x[pivot_col] = v;
    }
    return x;
}

std::vector<std::vector<Rational>> IncrementalSolver::nullspace() const {
    auto reduced = reduce_basis(rows_);
    std::vector<bool> is_pivot(ncols_, false);
    for (const auto& [c, row] : reduced) is_pivot[c] = true;

    std::vector<std::vector<Rational>> basis;
    for (int free = 0; free < ncols_; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(ncols_, Rational(0));
        v[free] = 1;
        for (const auto& [pivot_col, row] : reduced) {
            for (const auto& [c, val] : row)
                if (c == free) v[pivot_col] = -val;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace feynpde
