#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "sptk/group.hpp"
#include "sptk/zmod.hpp"

namespace sptk {

namespace detail {

inline std::size_t pow_sz(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

} // namespace detail

/// Number of n-tuples over a group of the given order, guarded by a cap.
inline std::size_t tuple_count(const FiniteGroup& g, int degree, std::size_t cap = 10'000'000) {
    double est = std::pow(double(g.order()), degree);
    if (est > double(cap))
        throw Error("cohomology.cap", "tuple space G^" + std::to_string(degree) + " exceeds the configured cap");
    return detail::pow_sz(g.order(), degree);
}

/// Iterate all tuples (g_0,...,g_{deg-1}) in lexicographic order (g_0 slowest).
/// fn receives the tuple and its flat index.
inline void for_each_tuple(const FiniteGroup& g, int degree,
                           const std::function<void(const std::vector<int>&, std::size_t)>& fn) {
    std::vector<int> tup(static_cast<std::size_t>(degree), 0);
    const std::size_t total = tuple_count(g, degree);
    for (std::size_t idx = 0; idx < total; ++idx) {
        fn(tup, idx);
        for (int pos = degree - 1; pos >= 0; --pos) {
            if (++tup[static_cast<std::size_t>(pos)] < g.order()) break;
            tup[static_cast<std::size_t>(pos)] = 0;
        }
    }
}

inline std::size_t tuple_index(const FiniteGroup& g, const std::vector<int>& tup) {
    std::size_t idx = 0;
    for (int v : tup) idx = idx * static_cast<std::size_t>(g.order()) + static_cast<std::size_t>(v);
    return idx;
}

/// An inhomogeneous cochain: a total map G^degree -> Z_M of additive phase
/// exponents. The realized U(1) phase of exponent a is exp(2*pi*i*a/M).
/// Degree 0 is a single exponent.
class Cochain {
public:
    Cochain(FiniteGroup group, int degree, i64 modulus)
        : group_(std::move(group)), degree_(degree), modulus_(modulus),
          values_(tuple_count(group_, degree), 0) {
        if (modulus_ < 1) throw Error("cohomology.bad_modulus", "modulus must be >= 1");
        if (degree_ < 0) throw Error("cohomology.bad_degree", "degree must be >= 0");
    }

    const FiniteGroup& group() const { return group_; }
    int degree() const { return degree_; }
    i64 modulus() const { return modulus_; }
    const std::vector<i64>& values() const { return values_; }

    i64 at(const std::vector<int>& tup) const { return values_[tuple_index(group_, tup)]; }
    i64 at_index(std::size_t idx) const { return values_[idx]; }

    void set(const std::vector<int>& tup, i64 v) {
        values_[tuple_index(group_, tup)] = detail::mod_pos(v, modulus_);
    }
    void set_index(std::size_t idx, i64 v) { values_[idx] = detail::mod_pos(v, modulus_); }

    bool is_zero() const {
        for (i64 v : values_)
            if (v != 0) return false;
        return true;
    }

    Cochain operator+(const Cochain& other) const {
        require_compatible(other);
        Cochain out(group_, degree_, modulus_);
        for (std::size_t i = 0; i < values_.size(); ++i)
            out.values_[i] = detail::mod_pos(values_[i] + other.values_[i], modulus_);
        return out;
    }

    Cochain operator-(const Cochain& other) const {
        require_compatible(other);
        Cochain out(group_, degree_, modulus_);
        for (std::size_t i = 0; i < values_.size(); ++i)
            out.values_[i] = detail::mod_pos(values_[i] - other.values_[i], modulus_);
        return out;
    }

    /// Re-express with a modulus that is a multiple of the current one.
    Cochain rescaled(i64 new_modulus) const {
        if (new_modulus % modulus_ != 0)
            throw Error("cohomology.bad_modulus", "rescale target must be a multiple of the modulus");
        i64 f = new_modulus / modulus_;
        Cochain out(group_, degree_, new_modulus);
        for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = values_[i] * f;
        return out;
    }

    std::complex<double> phase_at(const std::vector<int>& tup) const {
        double angle = 2.0 * M_PI * double(at(tup)) / double(modulus_);
        return {std::cos(angle), std::sin(angle)};
    }

private:
    void require_compatible(const Cochain& other) const {
        if (degree_ != other.degree_ || modulus_ != other.modulus_ || !group_.same_table(other.group_))
            throw Error("cohomology.mismatch", "cochain group/degree/modulus mismatch");
    }

    FiniteGroup group_;
    int degree_;
    i64 modulus_;
    std::vector<i64> values_;
};

/// Inhomogeneous differential d^n (trivial G-action on the coefficients, so
/// the leading term carries no action):
/// (dc)(g_0..g_n) = c(g_1..g_n) + sum_k (-1)^k c(..g_{k-1}g_k..) + (-1)^{n+1} c(g_0..g_{n-1}).
inline Cochain differential(const Cochain& c) {
    const auto& g = c.group();
    const int n = c.degree();
    Cochain out(g, n + 1, c.modulus());
    for_each_tuple(g, n + 1, [&](const std::vector<int>& tup, std::size_t idx) {
        i64 acc = 0;
        std::vector<int> sub(tup.begin() + 1, tup.end());
        acc += c.at(sub);
        int sign = -1;
        for (int k = 1; k <= n; ++k) {
            sub.assign(tup.begin(), tup.end());
            sub[static_cast<std::size_t>(k - 1)] = g.mul(tup[static_cast<std::size_t>(k - 1)], tup[static_cast<std::size_t>(k)]);
            sub.erase(sub.begin() + k);
            acc += sign * c.at(sub);
            sign = -sign;
        }
        sub.assign(tup.begin(), tup.end() - 1);
        acc += sign * c.at(sub);
        out.set_index(idx, acc);
    });
    return out;
}

inline bool is_cocycle(const Cochain& c) { return differential(c).is_zero(); }

/// A G-invariant map G^{degree+1} -> Z_M (homogeneous cochain of the given
/// degree). Invariance under the diagonal left action is checked exhaustively
/// at construction.
class HomogeneousCochain {
public:
    HomogeneousCochain(FiniteGroup group, int degree, i64 modulus, std::vector<i64> values)
        : group_(std::move(group)), degree_(degree), modulus_(modulus), values_(std::move(values)) {
        if (values_.size() != tuple_count(group_, degree_ + 1))
            throw Error("cohomology.bad_size", "homogeneous cochain needs |G|^(degree+1) values");
        for (auto& v : values_) v = detail::mod_pos(v, modulus_);
        check_invariance();
    }

    const FiniteGroup& group() const { return group_; }
    int degree() const { return degree_; }
    i64 modulus() const { return modulus_; }

    i64 at(const std::vector<int>& tup) const { return values_[tuple_index(group_, tup)]; }

    bool is_zero() const {
        for (i64 v : values_)
            if (v != 0) return false;
        return true;
    }

private:
    void check_invariance() {
        for_each_tuple(group_, degree_ + 1, [&](const std::vector<int>& tup, std::size_t idx) {
            for (int g = 0; g < group_.order(); ++g) {
                std::vector<int> shifted(tup.size());
                for (std::size_t i = 0; i < tup.size(); ++i) shifted[i] = group_.mul(g, tup[i]);
                if (values_[tuple_index(group_, shifted)] != values_[idx])
                    throw Error("cohomology.not_invariant", "homogeneous cochain is not G-invariant");
            }
        });
    }

    FiniteGroup group_;
    int degree_;
    i64 modulus_;
    std::vector<i64> values_;
};

/// Homogeneous differential: (D phi)(g_0..g_{i+1}) = sum_j (-1)^j phi(omit g_j).
inline HomogeneousCochain homogeneous_differential(const HomogeneousCochain& phi) {
    const auto& g = phi.group();
    const int n = phi.degree();
    std::vector<i64> out(tuple_count(g, n + 2), 0);
    for_each_tuple(g, n + 2, [&](const std::vector<int>& tup, std::size_t idx) {
        i64 acc = 0;
        int sign = 1;
        for (int j = 0; j <= n + 1; ++j) {
            std::vector<int> sub(tup);
            sub.erase(sub.begin() + j);
            acc += sign * phi.at(sub);
            sign = -sign;
        }
        out[idx] = detail::mod_pos(acc, phi.modulus());
    });
    return HomogeneousCochain(g, n + 1, phi.modulus(), std::move(out));
}

/// Psi^i: homogeneous -> inhomogeneous,
/// Psi(phi)(g_0..g_{i-1}) = phi(e, g_0, g_0 g_1, ..., g_0...g_{i-1}).
inline Cochain psi(const HomogeneousCochain& phi) {
    const auto& g = phi.group();
    const int n = phi.degree();
    Cochain out(g, n, phi.modulus());
    for_each_tuple(g, n, [&](const std::vector<int>& tup, std::size_t idx) {
        std::vector<int> args(static_cast<std::size_t>(n) + 1);
        args[0] = g.identity();
        int acc = g.identity();
        for (int i = 0; i < n; ++i) {
            acc = g.mul(acc, tup[static_cast<std::size_t>(i)]);
            args[static_cast<std::size_t>(i) + 1] = acc;
        }
        out.set_index(idx, phi.at(args));
    });
    return out;
}

/// Inverse of Psi: phi(h_0..h_i) = c(h_0^-1 h_1, h_1^-1 h_2, ..., h_{i-1}^-1 h_i).
inline HomogeneousCochain psi_inverse(const Cochain& c) {
    const auto& g = c.group();
    const int n = c.degree();
    std::vector<i64> vals(tuple_count(g, n + 1), 0);
    for_each_tuple(g, n + 1, [&](const std::vector<int>& tup, std::size_t idx) {
        std::vector<int> args(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            args[static_cast<std::size_t>(i)] =
                g.mul(g.inverse(tup[static_cast<std::size_t>(i)]), tup[static_cast<std::size_t>(i) + 1]);
        vals[idx] = c.at(args);
    });
    return HomogeneousCochain(g, n, c.modulus(), std::move(vals));
}

/// Snap a table of near-unit complex scalars onto exact Z_M exponents.
/// `raw` is indexed by flat tuple index. Fails loudly, reporting the worst
/// offender, when any value is farther than tol from every M-th root of unity.
inline Cochain snap_phases(const FiniteGroup& group, int degree, i64 modulus,
                           const std::vector<std::complex<double>>& raw, double tol = 1e-6) {
    Cochain out(group, degree, modulus);
    if (raw.size() != tuple_count(group, degree))
        throw Error("cohomology.bad_size", "snap_phases table has wrong size");
    double worst = 0.0;
    std::size_t worst_idx = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto z = raw[i];
        if (std::abs(std::abs(z) - 1.0) > tol)
            throw Error("cohomology.snap", "phase modulus deviates from 1 beyond tolerance at index " +
                                                std::to_string(i));
        double angle = std::arg(z);
        if (angle < 0) angle += 2.0 * M_PI;
        i64 a = static_cast<i64>(std::llround(angle * double(modulus) / (2.0 * M_PI))) % modulus;
        std::complex<double> snapped(std::cos(2.0 * M_PI * double(a) / double(modulus)),
                                     std::sin(2.0 * M_PI * double(a) / double(modulus)));
        double dist = std::abs(z - snapped);
        if (dist > worst) { worst = dist; worst_idx = i; }
        out.set_index(i, a);
    }
    if (worst > tol)
        throw Error("cohomology.snap", "phase at index " + std::to_string(worst_idx) + " is " +
                                           std::to_string(worst) + " away from the nearest root of unity");
    return out;
}

} // namespace sptk
