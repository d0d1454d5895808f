#pragma once

#include <cstddef>
#include <vector>

#include "nullcone/errors.hpp"
#include "nullcone/rational.hpp"

namespace nullcone::lp {

// minimize c.x  subject to  A x = b, x >= 0.
struct Problem {
    std::size_t num_vars = 0;
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    std::vector<Rational> c;

    std::size_t add_row(std::vector<Rational> row, Rational rhs) {
        if (row.size() != num_vars) throw ArgumentError("constraint row has the wrong length");
        a.push_back(std::move(row));
        b.push_back(std::move(rhs));
        return a.size() - 1;
    }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    std::vector<Rational> x;
    Rational objective = 0;
};

namespace detail {

class Tableau {
public:
    // rows: constraint rows, last column is the rhs; obj: reduced costs, last entry is -objective.
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> obj;
    std::vector<std::size_t> basis;

    void pivot(std::size_t r, std::size_t col) {
        const std::size_t w = rows[r].size();
        Rational inv = 1 / rows[r][col];
        for (std::size_t j = 0; j < w; ++j)
            if (rows[r][j] != 0) rows[r][j] *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][col] == 0) continue;
            Rational f = rows[i][col];
            for (std::size_t j = 0; j < w; ++j)
                if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
        }
        if (obj[col] != 0) {
            Rational f = obj[col];
            for (std::size_t j = 0; j < w; ++j)
                if (rows[r][j] != 0) obj[j] -= f * rows[r][j];
        }
        basis[r] = col;
    }

    // Bland's rule over the first `active` columns. Returns false if unbounded.
    bool optimize(std::size_t active) {
        const std::size_t rhs = rows.empty() ? obj.size() - 1 : rows[0].size() - 1;
        for (;;) {
            std::size_t enter = active;
            for (std::size_t j = 0; j < active; ++j)
                if (obj[j] < 0) {
                    enter = j;
                    break;
                }
            if (enter == active) return true;
            std::size_t leave = rows.size();
            Rational best;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i][enter] <= 0) continue;
                Rational ratio = rows[i][rhs] / rows[i][enter];
                if (leave == rows.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows.size()) return false;
            pivot(leave, enter);
        }
    }
};

}  // namespace detail

/**
 * Dense two-phase primal simplex in exact rationals with Bland's anti-cycling
 * rule. Intended for the small programs of this library.
 */
inline Result solve(const Problem& p) {
    const std::size_t m = p.a.size(), n = p.num_vars;
    if (p.b.size() != m) throw ArgumentError("rhs length does not match the number of rows");
    if (!p.c.empty() && p.c.size() != n) throw ArgumentError("cost vector has the wrong length");

    // Columns: n originals, m artificials, rhs.
    detail::Tableau t;
    t.rows.assign(m, std::vector<Rational>(n + m + 1));
    t.basis.resize(m);
    t.obj.assign(n + m + 1, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        const bool flip = p.b[i] < 0;
        for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = flip ? -p.a[i][j] : p.a[i][j];
        t.rows[i][n + i] = 1;
        t.rows[i][n + m] = flip ? -p.b[i] : p.b[i];
        t.basis[i] = n + i;
    }
    // Phase 1 objective: sum of artificials, expressed in nonbasic terms.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= n + m; ++j)
            if (j < n || j == n + m) t.obj[j] -= t.rows[i][j];
    t.optimize(n + m);

    Result res;
    if (t.obj[n + m] != 0) return res;  // positive phase-1 optimum

    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows.size();) {
        if (t.basis[i] < n) {
            ++i;
            continue;
        }
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (t.rows[i][j] != 0) {
                col = j;
                break;
            }
        if (col == n) {
            t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
            t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
            continue;
        }
        t.pivot(i, col);
        ++i;
    }

    // Phase 2 on the original columns only.
    t.obj.assign(n + m + 1, Rational(0));
    if (!p.c.empty()) {
        for (std::size_t j = 0; j < n; ++j) t.obj[j] = p.c[j];
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const Rational cb = p.c[t.basis[i]];
            if (cb == 0) continue;
            for (std::size_t j = 0; j <= n + m; ++j)
                if (t.rows[i][j] != 0) t.obj[j] -= cb * t.rows[i][j];
        }
    }
    if (!t.optimize(n)) {
        res.status = Status::Unbounded;
        return res;
    }
    res.status = Status::Optimal;
    res.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < t.rows.size(); ++i) res.x[t.basis[i]] = t.rows[i][n + m];
    for (std::size_t j = 0; j < n && !p.c.empty(); ++j) res.objective += p.c[j] * res.x[j];
    return res;
}

}  // namespace nullcone::lp
