#pragma once

#include <cstdlib>
#include <numeric>
#include <optional>
#include <vector>

#include "sptk/errors.hpp"

namespace sptk {

using i64 = long long;

/// Dense integer matrix for the exact lattice computations behind group
/// cohomology. Sizes here are tiny (at most a few hundred rows), so no
/// sparsity tricks are needed; correctness and overflow checking are what
/// matter.
struct IntMat {
    int rows = 0, cols = 0;
    std::vector<i64> a;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}

    i64& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    i64 operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static IntMat identity(int n) {
        IntMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
};

namespace detail {

inline i64 checked_mul(i64 x, i64 y) {
    i64 r;
    if (__builtin_mul_overflow(x, y, &r))
        throw Error("zmod.overflow", "integer overflow in lattice arithmetic");
    return r;
}

inline i64 checked_add(i64 x, i64 y) {
    i64 r;
    if (__builtin_add_overflow(x, y, &r))
        throw Error("zmod.overflow", "integer overflow in lattice arithmetic");
    return r;
}

/// Extended gcd: returns g = gcd(a,b) >= 0 and x,y with a*x + b*y = g.
inline i64 egcd(i64 a, i64 b, i64& x, i64& y) {
    if (b == 0) {
        x = (a >= 0) ? 1 : -1;
        y = 0;
        return std::llabs(a);
    }
    i64 x1, y1;
    i64 g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

inline i64 mod_pos(i64 x, i64 n) {
    i64 r = x % n;
    return r < 0 ? r + n : r;
}

inline i64 modinv(i64 a, i64 n) {
    i64 x, y;
    i64 g = egcd(mod_pos(a, n), n, x, y);
    if (g != 1) throw Error("zmod.not_invertible", "element not invertible modulo n");
    return mod_pos(x, n);
}

} // namespace detail

/// Diagonalization D = U*A*V (mod n) with integer elementary row/column
/// operations. The stored U, V, D are reduced mod n throughout: everything
/// downstream (solving and kernels mod n) only ever needs them mod n, and the
/// reduction keeps every intermediate entry bounded, so no coefficient
/// blow-up can occur regardless of matrix size. Entries of D are kept in the
/// symmetric range so gcd-style pivoting still terminates; no divisibility
/// chain is enforced (not needed for solving).
struct SmithResult {
    IntMat d, u, v;
    int rank = 0;
};

inline SmithResult smith_diagonalize_mod(const IntMat& a_in, i64 n) {
    if (n < 1) throw Error("zmod.bad_modulus", "modulus must be >= 1");
    auto sym = [n](i64 x) {
        i64 r = detail::mod_pos(x, n);
        return (2 * r > n) ? r - n : r;
    };
    SmithResult res;
    res.d = a_in;
    res.u = IntMat::identity(a_in.rows);
    res.v = IntMat::identity(a_in.cols);
    IntMat& d = res.d;
    IntMat& u = res.u;
    IntMat& v = res.v;
    const int m = d.rows, nc = d.cols;
    for (auto& x : d.a) x = sym(x);

    auto row_swap = [&](int i, int j) {
        if (i == j) return;
        for (int c = 0; c < nc; ++c) std::swap(d(i, c), d(j, c));
        for (int c = 0; c < m; ++c) std::swap(u(i, c), u(j, c));
    };
    auto col_swap = [&](int i, int j) {
        if (i == j) return;
        for (int r = 0; r < m; ++r) std::swap(d(r, i), d(r, j));
        for (int r = 0; r < nc; ++r) std::swap(v(r, i), v(r, j));
    };
    auto row_addmul = [&](int dst, int src, i64 q) {
        for (int c = 0; c < nc; ++c) d(dst, c) = sym(d(dst, c) + detail::checked_mul(q, d(src, c)));
        for (int c = 0; c < m; ++c) u(dst, c) = sym(u(dst, c) + detail::checked_mul(q, u(src, c)));
    };
    auto col_addmul = [&](int dst, int src, i64 q) {
        for (int r = 0; r < m; ++r) d(r, dst) = sym(d(r, dst) + detail::checked_mul(q, d(r, src)));
        for (int r = 0; r < nc; ++r) v(r, dst) = sym(v(r, dst) + detail::checked_mul(q, v(r, src)));
    };

    int t = 0;
    while (t < m && t < nc) {
        int pi = -1, pj = -1;
        for (int i = t; i < m; ++i)
            for (int j = t; j < nc; ++j)
                if (d(i, j) != 0 && (pi < 0 || std::llabs(d(i, j)) < std::llabs(d(pi, pj)))) { pi = i; pj = j; }
        if (pi < 0) break;
        row_swap(t, pi);
        col_swap(t, pj);

        bool dirty = false;
        for (int i = t + 1; i < m; ++i) {
            if (d(i, t) == 0) continue;
            i64 q = d(i, t) / d(t, t);
            if (q != 0) row_addmul(i, t, -q);
            if (d(i, t) != 0) dirty = true;
        }
        for (int j = t + 1; j < nc; ++j) {
            if (d(t, j) == 0) continue;
            i64 q = d(t, j) / d(t, t);
            if (q != 0) col_addmul(j, t, -q);
            if (d(t, j) != 0) dirty = true;
        }
        if (dirty) continue;
        ++t;
    }
    res.rank = t;
    return res;
}

/// One solution of A x = b (mod n), if any. Column-vector convention.
inline std::optional<std::vector<i64>> solve_mod(const IntMat& a, const std::vector<i64>& b, i64 n) {
    SmithResult s = smith_diagonalize_mod(a, n);
    const int m = a.rows, c = a.cols;
    std::vector<i64> ub(m, 0);
    for (int i = 0; i < m; ++i) {
        i64 acc = 0;
        for (int j = 0; j < m; ++j)
            acc = detail::checked_add(acc, detail::checked_mul(s.u(i, j), b[static_cast<std::size_t>(j)]));
        ub[static_cast<std::size_t>(i)] = detail::mod_pos(acc, n);
    }
    std::vector<i64> y(c, 0);
    const int diag = std::min(m, c);
    for (int i = 0; i < diag; ++i) {
        i64 di = s.d(i, i);
        if (di == 0) {
            if (ub[static_cast<std::size_t>(i)] % n != 0) return std::nullopt;
            continue;
        }
        i64 g = std::gcd(di, n);
        if (ub[static_cast<std::size_t>(i)] % g != 0) return std::nullopt;
        i64 ni = n / g;
        y[static_cast<std::size_t>(i)] =
            detail::mod_pos(detail::checked_mul(ub[static_cast<std::size_t>(i)] / g, detail::modinv(di / g, ni)), ni);
    }
    for (int i = diag; i < m; ++i)
        if (ub[static_cast<std::size_t>(i)] % n != 0) return std::nullopt;
    std::vector<i64> x(c, 0);
    for (int i = 0; i < c; ++i) {
        i64 acc = 0;
        for (int j = 0; j < c; ++j)
            acc = detail::checked_add(acc, detail::checked_mul(s.v(i, j), y[static_cast<std::size_t>(j)]));
        x[static_cast<std::size_t>(i)] = detail::mod_pos(acc, n);
    }
    return x;
}

/// Generators of the solution module {x : A x = 0 (mod n)}; column-vector
/// convention, generators returned as vectors of length A.cols.
inline std::vector<std::vector<i64>> kernel_mod(const IntMat& a, i64 n) {
    SmithResult s = smith_diagonalize_mod(a, n);
    const int c = a.cols;
    std::vector<std::vector<i64>> gens;
    for (int i = 0; i < c; ++i) {
        i64 step;
        if (i < s.rank) {
            i64 g = std::gcd(s.d(i, i), n);
            step = n / g;
            if (step == n) continue;
        } else {
            step = 1;
        }
        std::vector<i64> gen(static_cast<std::size_t>(c));
        for (int r = 0; r < c; ++r)
            gen[static_cast<std::size_t>(r)] = detail::mod_pos(detail::checked_mul(s.v(r, i), step), n);
        gens.push_back(std::move(gen));
    }
    return gens;
}

/// Upper-triangular integer basis (rows) of the lattice spanned by `rows`
/// together with n*Z^T. Diagonal entries are in (0, n]; off-diagonal entries
/// are reduced mod n (legal: n*Z^T lies inside the lattice), which keeps all
/// intermediate values bounded.
inline IntMat lattice_basis_mod(const std::vector<std::vector<i64>>& rows, i64 n, int t) {
    // Work rows: the generators plus n*e_i explicitly. Mod-n reduction of
    // trailing columns is span-safe because the n*e_j rows for unprocessed
    // columns j are still present in the work set.
    std::vector<std::vector<i64>> work;
    work.reserve(rows.size() + static_cast<std::size_t>(t));
    for (const auto& r : rows) {
        std::vector<i64> w(static_cast<std::size_t>(t));
        bool nonzero = false;
        for (int j = 0; j < t; ++j) {
            w[static_cast<std::size_t>(j)] = detail::mod_pos(r[static_cast<std::size_t>(j)], n);
            nonzero = nonzero || w[static_cast<std::size_t>(j)] != 0;
        }
        if (nonzero) work.push_back(std::move(w));
    }
    for (int i = 0; i < t; ++i) {
        std::vector<i64> w(static_cast<std::size_t>(t), 0);
        w[static_cast<std::size_t>(i)] = n;
        work.push_back(std::move(w));
    }

    IntMat basis(t, t);
    for (int col = 0; col < t; ++col) {
        // Combine all rows with a nonzero entry in `col` into one row whose
        // entry is the gcd of the column, using unimodular 2x2 transforms.
        int pivot = -1;
        for (std::size_t i = 0; i < work.size(); ++i) {
            auto& wi = work[i];
            if (wi[static_cast<std::size_t>(col)] == 0) continue;
            if (pivot < 0) {
                pivot = static_cast<int>(i);
                continue;
            }
            auto& wp = work[static_cast<std::size_t>(pivot)];
            i64 a = wp[static_cast<std::size_t>(col)], b = wi[static_cast<std::size_t>(col)];
            i64 x, y;
            i64 g = detail::egcd(a, b, x, y);
            i64 ag = a / g, bg = b / g;
            for (int j = col; j < t; ++j) {
                i64 p = wp[static_cast<std::size_t>(j)], q = wi[static_cast<std::size_t>(j)];
                i64 np = detail::checked_add(detail::checked_mul(x, p), detail::checked_mul(y, q));
                i64 nq = detail::checked_add(detail::checked_mul(-bg, p), detail::checked_mul(ag, q));
                wp[static_cast<std::size_t>(j)] = (j == col) ? np : detail::mod_pos(np, n);
                wi[static_cast<std::size_t>(j)] = (j == col) ? nq : detail::mod_pos(nq, n);
            }
            // wp[col] is now g (0 < g <= n) and wi[col] == 0.
        }
        if (pivot < 0) throw Error("zmod.internal", "column lost its n*e_col generator");
        auto prow = work[static_cast<std::size_t>(pivot)];
        i64 g = prow[static_cast<std::size_t>(col)];
        // Eliminate the pivot column from every other row.
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (static_cast<int>(i) == pivot) continue;
            auto& w = work[i];
            i64 e = w[static_cast<std::size_t>(col)];
            if (e == 0) continue;
            if (e % g != 0) throw Error("zmod.internal", "gcd pivot fails to divide entry");
            i64 q = e / g;
            for (int j = col; j < t; ++j) {
                i64 nv = w[static_cast<std::size_t>(j)] - detail::checked_mul(q, prow[static_cast<std::size_t>(j)]);
                w[static_cast<std::size_t>(j)] = (j == col) ? nv : detail::mod_pos(nv, n);
            }
        }
        // Retire the pivot row into the basis.
        basis(col, col) = g;
        for (int j = col + 1; j < t; ++j) basis(col, j) = prow[static_cast<std::size_t>(j)];
        work[static_cast<std::size_t>(pivot)].assign(static_cast<std::size_t>(t), 0);
    }
    return basis;
}

/// Canonical (lexicographically minimal, coordinatewise reduced)
/// representative of x + L, with L given by a lattice_basis_mod basis.
inline std::vector<i64> lattice_reduce(std::vector<i64> x, const IntMat& basis, i64 n) {
    const int t = basis.rows;
    for (int j = 0; j < t; ++j) x[static_cast<std::size_t>(j)] = detail::mod_pos(x[static_cast<std::size_t>(j)], n);
    for (int j = 0; j < t; ++j) {
        i64 p = basis(j, j);
        i64 q = x[static_cast<std::size_t>(j)] / p;
        if (q != 0)
            for (int c = j; c < t; ++c)
                x[static_cast<std::size_t>(c)] = detail::mod_pos(
                    x[static_cast<std::size_t>(c)] - detail::checked_mul(q, basis(j, c)), n);
    }
    return x;
}

/// True when x lies in the lattice given by a lattice_basis_mod basis.
inline bool lattice_contains(const std::vector<i64>& x, const IntMat& basis, i64 n) {
    auto r = lattice_reduce(x, basis, n);
    for (i64 v : r)
        if (v != 0) return false;
    return true;
}

} // namespace sptk
