#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sptk/cochain.hpp"

namespace sptk {

struct CohomologyClass {
    int degree = 0;
    i64 modulus = 1;
    Cochain representative;
    int class_id = 0;

    bool trivial() const { return class_id == 0; }
};

/// Integer matrix of the inhomogeneous differential d^degree, mapping
/// exponent vectors of degree-cochains to (degree+1)-cochains.
inline IntMat differential_matrix(const FiniteGroup& g, int degree, std::size_t cap = 10'000'000) {
    const std::size_t rows = tuple_count(g, degree + 1, cap);
    const std::size_t cols = tuple_count(g, degree, cap);
    if (double(rows) * double(cols) * 8.0 > 2e9)
        throw Error("cohomology.cap", "differential matrix would exceed the memory cap");
    IntMat m(static_cast<int>(rows), static_cast<int>(cols));
    for_each_tuple(g, degree + 1, [&](const std::vector<int>& tup, std::size_t row) {
        std::vector<int> sub(tup.begin() + 1, tup.end());
        m(static_cast<int>(row), static_cast<int>(tuple_index(g, sub))) += 1;
        int sign = -1;
        for (int k = 1; k <= degree; ++k) {
            sub.assign(tup.begin(), tup.end());
            sub[static_cast<std::size_t>(k - 1)] =
                g.mul(tup[static_cast<std::size_t>(k - 1)], tup[static_cast<std::size_t>(k)]);
            sub.erase(sub.begin() + k);
            m(static_cast<int>(row), static_cast<int>(tuple_index(g, sub))) += sign;
            sign = -sign;
        }
        sub.assign(tup.begin(), tup.end() - 1);
        m(static_cast<int>(row), static_cast<int>(tuple_index(g, sub))) += sign;
    });
    return m;
}

/// Default coefficient modulus policy: the exponent of the group. Every class
/// of H^n(G, U(1)) for the small groups handled here has a representative
/// with values in these roots of unity.
inline i64 default_modulus(const FiniteGroup& g) { return g.exponent(); }

/// Cyclic factor orders (primary decomposition) of a finite abelian group
/// given by its addition table, from element-order statistics: with
/// n_k = #{a : p^k a = 0} = p^(sum_j min(j,k) m_j), the multiplicity of the
/// Z_{p^k} factor is m_k = (l_k - l_{k-1}) - (l_{k+1} - l_k), l_k = log_p n_k.
inline std::vector<i64> cyclic_orders_from_table(const std::vector<std::vector<int>>& add) {
    const i64 n = static_cast<i64>(add.size());
    std::vector<i64> out;
    if (n <= 1) return out;
    std::vector<i64> ord(static_cast<std::size_t>(n), 1);
    for (i64 a = 1; a < n; ++a) {
        int x = static_cast<int>(a);
        i64 k = 1;
        while (x != 0) {
            x = add[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
            ++k;
        }
        ord[static_cast<std::size_t>(a)] = k;
    }
    i64 rest = n;
    for (i64 p = 2; p <= rest; ++p) {
        if (rest % p != 0) continue;
        while (rest % p == 0) rest /= p;
        // l_k = log_p #{a : ord(a) is a p-power <= p^k}
        std::vector<i64> l{0};
        i64 pk = 1;
        while (true) {
            pk *= p;
            i64 cnt = 0;
            for (i64 a = 0; a < n; ++a) {
                i64 o = ord[static_cast<std::size_t>(a)];
                bool p_power = true;
                while (o > 1) {
                    if (o % p != 0) { p_power = false; break; }
                    o /= p;
                }
                if (p_power && pk % ord[static_cast<std::size_t>(a)] == 0) ++cnt;
            }
            i64 lk = 0;
            while (cnt > 1) {
                if (cnt % p != 0) throw Error("cohomology.internal", "p-part count is not a p-power");
                cnt /= p;
                ++lk;
            }
            if (lk == l.back()) break;
            l.push_back(lk);
        }
        for (std::size_t k = 1; k < l.size(); ++k) {
            i64 ck = l[k] - l[k - 1];
            i64 ck1 = (k + 1 < l.size()) ? l[k + 1] - l[k] : 0;
            i64 mk = ck - ck1;
            i64 value = 1;
            for (std::size_t j = 0; j < k; ++j) value *= p;
            for (i64 rep = 0; rep < mk; ++rep) out.push_back(value);
        }
    }
    std::sort(out.begin(), out.end());
    i64 prod = 1;
    for (i64 d : out) prod *= d;
    if (prod != n) throw Error("cohomology.internal", "cyclic factor product disagrees with the order");
    return out;
}

/// H^degree(G, U(1)) computed through Z_M-valued cochains.
///
/// Cocycles are exact Z_M exponent vectors. Equivalence is *U(1)*-level:
/// two Z_M cocycles are identified when their difference is the coboundary
/// of a cochain with values in the refined modulus W = M*|G|. (Values in
/// mu_W suffice to witness every U(1) coboundary relation between mu_M
/// cocycles; with Z_M-only witnesses one would compute H^n(G, Z_M) instead,
/// which is a different group.)
class CohomologyGroup {
public:
    static CohomologyGroup compute(const FiniteGroup& g, int degree, i64 modulus,
                                   std::size_t cap = 10'000'000) {
        if (degree < 1) throw Error("cohomology.bad_degree", "cohomology_group needs degree >= 1");
        if (modulus < 1) throw Error("cohomology.bad_modulus", "modulus must be >= 1");
        CohomologyGroup out(g, degree, modulus);
        out.warn_modulus_ = (modulus % g.exponent() != 0);

        const int t = static_cast<int>(tuple_count(g, degree, cap));
        IntMat dn = differential_matrix(g, degree, cap);
        std::vector<std::vector<i64>> k_gens = kernel_mod(dn, modulus);

        // Relaxed coboundaries: d(b) for b over Z_W with d(b) = 0 mod W/M,
        // rescaled down to Z_M exponents.
        std::vector<std::vector<i64>> b_gens;
        const i64 w = modulus * g.order();
        const i64 f = w / modulus; // = |G|
        IntMat dprev = differential_matrix(g, degree - 1, cap);
        std::vector<std::vector<i64>> s_gens;
        if (f > 1) {
            s_gens = kernel_mod(dprev, f);
        }
        for (int i = 0; i < dprev.cols; ++i) {
            std::vector<i64> e(static_cast<std::size_t>(dprev.cols), 0);
            e[static_cast<std::size_t>(i)] = f;
            s_gens.push_back(std::move(e));
        }
        for (const auto& s : s_gens) {
            std::vector<i64> img(static_cast<std::size_t>(t), 0);
            for (int r = 0; r < dprev.rows; ++r) {
                i64 acc = 0;
                for (int c = 0; c < dprev.cols; ++c)
                    acc += dprev(r, c) * s[static_cast<std::size_t>(c)];
                acc = detail::mod_pos(acc, w);
                if (acc % f != 0) throw Error("cohomology.internal", "relaxed coboundary not in the mu_M lattice");
                img[static_cast<std::size_t>(r)] = acc / f;
            }
            b_gens.push_back(std::move(img));
        }

        out.b_gens_ = b_gens;
        out.reduce_basis_ = lattice_basis_mod(b_gens, modulus, t);

        // Enumerate the quotient as the closure of the canonicalized kernel
        // generators; std::set keeps the representatives in lexicographic
        // order, which fixes the class ids.
        std::set<std::vector<i64>> seen;
        std::vector<std::vector<i64>> frontier;
        std::vector<i64> zero(static_cast<std::size_t>(t), 0);
        seen.insert(zero);
        frontier.push_back(zero);
        while (!frontier.empty()) {
            auto cur = frontier.back();
            frontier.pop_back();
            for (const auto& gen : k_gens) {
                std::vector<i64> sum(static_cast<std::size_t>(t));
                for (int c = 0; c < t; ++c)
                    sum[static_cast<std::size_t>(c)] = detail::mod_pos(
                        cur[static_cast<std::size_t>(c)] + gen[static_cast<std::size_t>(c)], modulus);
                auto red = lattice_reduce(sum, out.reduce_basis_, modulus);
                if (seen.insert(red).second) {
                    if (seen.size() > 100000)
                        throw Error("cohomology.cap", "cohomology group is unreasonably large");
                    frontier.push_back(std::move(red));
                }
            }
        }
        std::vector<std::vector<i64>> reps(seen.begin(), seen.end());

        for (std::size_t i = 0; i < reps.size(); ++i) {
            Cochain rep(g, degree, modulus);
            for (int c = 0; c < t; ++c) rep.set_index(static_cast<std::size_t>(c), reps[i][static_cast<std::size_t>(c)]);
            out.classes_.push_back(CohomologyClass{degree, modulus, rep, static_cast<int>(i)});
            out.rep_index_[reps[i]] = static_cast<int>(i);
        }

        // Addition table over class ids.
        const int nc = static_cast<int>(out.classes_.size());
        out.addition_.assign(static_cast<std::size_t>(nc), std::vector<int>(static_cast<std::size_t>(nc), 0));
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nc; ++j) {
                std::vector<i64> sum(static_cast<std::size_t>(t));
                for (int c = 0; c < t; ++c)
                    sum[static_cast<std::size_t>(c)] = detail::mod_pos(
                        out.classes_[static_cast<std::size_t>(i)].representative.at_index(static_cast<std::size_t>(c)) +
                            out.classes_[static_cast<std::size_t>(j)].representative.at_index(static_cast<std::size_t>(c)),
                        modulus);
                auto red = lattice_reduce(sum, out.reduce_basis_, modulus);
                auto it = out.rep_index_.find(red);
                if (it == out.rep_index_.end())
                    throw Error("cohomology.internal", "class addition left the computed group");
                out.addition_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = it->second;
            }
        out.orders_ = cyclic_orders_from_table(out.addition_);
        return out;
    }

    const FiniteGroup& group() const { return group_; }
    int degree() const { return degree_; }
    i64 modulus() const { return modulus_; }
    i64 order() const { return static_cast<i64>(classes_.size()); }
    const std::vector<i64>& cyclic_orders() const { return orders_; }
    const std::vector<CohomologyClass>& classes() const { return classes_; }
    const std::vector<std::vector<int>>& addition_table() const { return addition_; }
    bool modulus_warning() const { return warn_modulus_; }

    int add(int class_i, int class_j) const {
        return addition_[static_cast<std::size_t>(class_i)][static_cast<std::size_t>(class_j)];
    }

    /// Classify a cocycle into one of the computed classes.
    const CohomologyClass& classify(const Cochain& c_in) const {
        Cochain c = align_modulus(c_in);
        if (!is_cocycle(c)) throw Error("cohomology.not_cocycle", "classify() requires a cocycle");
        std::vector<i64> v(c.values());
        auto red = lattice_reduce(v, reduce_basis_, modulus_);
        auto it = rep_index_.find(red);
        if (it == rep_index_.end())
            throw Error("cohomology.inconsistent",
                        "cocycle does not reduce to a computed class; the modulus is too small");
        return classes_[static_cast<std::size_t>(it->second)];
    }

    /// Explicit coboundary witness: b over Z_W (W = M*|G|) with
    /// d(b) = (c1 - c2) * (W/M). Returns nullopt when c1 and c2 are not
    /// equivalent.
    std::optional<Cochain> coboundary_witness(const Cochain& c1_in, const Cochain& c2_in) const {
        Cochain c1 = align_modulus(c1_in), c2 = align_modulus(c2_in);
        Cochain diff = c1 - c2;
        const i64 w = modulus_ * group_.order();
        const i64 f = w / modulus_;
        IntMat dprev = differential_matrix(group_, degree_ - 1);
        std::vector<i64> target(diff.values());
        for (auto& v : target) v *= f;
        auto sol = solve_mod(dprev, target, w);
        if (!sol) return std::nullopt;
        Cochain b(group_, degree_ - 1, w);
        for (std::size_t i = 0; i < sol->size(); ++i) b.set_index(i, (*sol)[i]);
        return b;
    }

    /// A representative of the class that vanishes whenever any argument is
    /// the identity (a normalized cocycle). Exists in every class; the search
    /// is an exact linear solve over the relaxed coboundary generators.
    Cochain normalized_representative(int class_id) const {
        const Cochain& rep = classes_[static_cast<std::size_t>(class_id)].representative;
        std::vector<std::size_t> degenerate;
        for_each_tuple(group_, degree_, [&](const std::vector<int>& tup, std::size_t idx) {
            for (int v : tup)
                if (v == group_.identity()) { degenerate.push_back(idx); return; }
        });
        if (degenerate.empty()) return rep;
        IntMat a(static_cast<int>(degenerate.size()), static_cast<int>(b_gens_.size()));
        std::vector<i64> rhs(degenerate.size());
        for (std::size_t r = 0; r < degenerate.size(); ++r) {
            for (std::size_t c = 0; c < b_gens_.size(); ++c)
                a(static_cast<int>(r), static_cast<int>(c)) = b_gens_[c][degenerate[r]];
            rhs[r] = detail::mod_pos(-rep.at_index(degenerate[r]), modulus_);
        }
        auto sol = solve_mod(a, rhs, modulus_);
        if (!sol)
            throw Error("cohomology.normalize",
                        "no normalized representative found at this modulus; refine the modulus");
        Cochain out = rep;
        for (std::size_t c = 0; c < b_gens_.size(); ++c) {
            if ((*sol)[c] == 0) continue;
            for (std::size_t i = 0; i < out.values().size(); ++i)
                out.set_index(i, out.at_index(i) + (*sol)[c] * b_gens_[c][i]);
        }
        for (std::size_t idx : degenerate)
            if (out.at_index(idx) != 0)
                throw Error("cohomology.internal", "normalization solve produced a non-normalized cocycle");
        return out;
    }

private:
    CohomologyGroup(FiniteGroup g, int degree, i64 modulus)
        : group_(std::move(g)), degree_(degree), modulus_(modulus) {}

    Cochain align_modulus(const Cochain& c) const {
        if (!c.group().same_table(group_) || c.degree() != degree_)
            throw Error("cohomology.mismatch", "cochain does not match this cohomology group");
        if (c.modulus() == modulus_) return c;
        if (modulus_ % c.modulus() == 0) return c.rescaled(modulus_);
        throw Error("cohomology.mismatch", "cochain modulus does not divide the group modulus");
    }

    FiniteGroup group_;
    int degree_;
    i64 modulus_;
    bool warn_modulus_ = false;
    std::vector<i64> orders_;
    std::vector<CohomologyClass> classes_;
    std::vector<std::vector<int>> addition_;
    std::vector<std::vector<i64>> b_gens_;
    IntMat reduce_basis_;
    std::map<std::vector<i64>, int> rep_index_;
};

/// Free-function form of the computation.
inline CohomologyGroup cohomology_group(const FiniteGroup& g, int degree, i64 modulus,
                                        std::size_t cap = 10'000'000) {
    return CohomologyGroup::compute(g, degree, modulus, cap);
}

} // namespace sptk
