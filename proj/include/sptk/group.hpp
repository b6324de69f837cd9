#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "sptk/errors.hpp"

namespace sptk {

/// A finite group presented by its multiplication table. Elements are dense
/// indices 0..n-1; all axioms are checked exhaustively at construction (the
/// groups handled here are tiny, so the O(n^3) scan is cheap and exact).
class FiniteGroup {
public:
    FiniteGroup(std::vector<std::vector<int>> table, std::string label = "")
        : table_(std::move(table)), label_(std::move(label)) {
        validate();
    }

    int order() const { return static_cast<int>(table_.size()); }
    int identity() const { return identity_; }
    int inverse(int g) const { return inverses_[static_cast<std::size_t>(g)]; }
    int mul(int g, int h) const { return table_[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)]; }
    const std::string& label() const { return label_; }
    const std::vector<std::vector<int>>& table() const { return table_; }

    /// Order of a single element.
    int element_order(int g) const {
        int p = g, ord = 1;
        while (p != identity_) {
            p = mul(p, g);
            ++ord;
        }
        return ord;
    }

    /// Exponent of the group (lcm of element orders).
    int exponent() const {
        long long e = 1;
        for (int g = 0; g < order(); ++g)
            e = std::lcm(e, static_cast<long long>(element_order(g)));
        return static_cast<int>(e);
    }

    bool same_table(const FiniteGroup& other) const { return table_ == other.table_; }

private:
    void validate() {
        const int n = order();
        if (n == 0) throw Error("groups.empty_table", "group table must be non-empty");
        for (int g = 0; g < n; ++g) {
            if (static_cast<int>(table_[g].size()) != n)
                throw Error("groups.not_square", "group table must be square");
            for (int h = 0; h < n; ++h) {
                int p = table_[g][h];
                if (p < 0 || p >= n)
                    throw Error("groups.not_closed",
                                "table entry out of range at (" + std::to_string(g) + "," +
                                    std::to_string(h) + ")");
            }
        }
        identity_ = -1;
        for (int e = 0; e < n; ++e) {
            bool ok = true;
            for (int g = 0; g < n; ++g)
                if (table_[e][g] != g || table_[g][e] != g) { ok = false; break; }
            if (ok) { identity_ = e; break; }
        }
        if (identity_ < 0) throw Error("groups.no_identity", "group table has no identity element");
        inverses_.assign(n, -1);
        for (int g = 0; g < n; ++g) {
            for (int h = 0; h < n; ++h)
                if (table_[g][h] == identity_ && table_[h][g] == identity_) { inverses_[g] = h; break; }
            if (inverses_[g] < 0)
                throw Error("groups.no_inverse", "no inverse for element " + std::to_string(g));
        }
        for (int g = 0; g < n; ++g)
            for (int h = 0; h < n; ++h)
                for (int k = 0; k < n; ++k)
                    if (table_[table_[g][h]][k] != table_[g][table_[h][k]])
                        throw Error("groups.not_associative",
                                    "associativity fails at triple (" + std::to_string(g) + "," +
                                        std::to_string(h) + "," + std::to_string(k) + ")");
    }

    std::vector<std::vector<int>> table_;
    std::string label_;
    int identity_ = 0;
    std::vector<int> inverses_;
};

/// Z_n with table[a][b] = (a+b) mod n.
inline FiniteGroup make_cyclic(int n) {
    if (n < 1) throw Error("groups.invalid_order", "cyclic group order must be >= 1");
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
    return FiniteGroup(std::move(t), "Z" + std::to_string(n));
}

/// Direct product. The pair (g, h) with g in G, h in H is packed as the
/// index h*|G| + g; G runs fastest. This packing is fixed so that cochain
/// tuple indices are reproducible across runs.
inline FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h) {
    const int ng = g.order(), nh = h.order(), n = ng * nh;
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a) {
        int ag = a % ng, ah = a / ng;
        for (int b = 0; b < n; ++b) {
            int bg = b % ng, bh = b / ng;
            t[a][b] = h.mul(ah, bh) * ng + g.mul(ag, bg);
        }
    }
    std::string label = g.label() + "x" + h.label();
    return FiniteGroup(std::move(t), label);
}

/// Validate a raw table and wrap it as a FiniteGroup. Throws a validation
/// error naming the first violated axiom.
inline FiniteGroup validate_table(std::vector<std::vector<int>> table, std::string label = "") {
    return FiniteGroup(std::move(table), std::move(label));
}

} // namespace sptk
