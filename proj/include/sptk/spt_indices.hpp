#pragma once

#include <Eigen/Eigenvalues>
#include <map>

#include "sptk/cohomology.hpp"
#include "sptk/mps.hpp"
#include "sptk/representation.hpp"

namespace sptk {

namespace detail_spt {

/// Top eigenpair of a (mixed) transfer matrix, sorted by modulus.
struct TopEig {
    Complex lambda1;
    Complex lambda2;
    VectorXc vec1;
};

inline TopEig top_eigenpair(const MatrixXc& m) {
    Eigen::ComplexEigenSolver<MatrixXc> es(m, true);
    Eigen::Index i1 = 0, i2 = -1;
    for (Eigen::Index i = 1; i < m.rows(); ++i)
        if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(i1))) i1 = i;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i == i1) continue;
        if (i2 < 0 || std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(i2))) i2 = i;
    }
    TopEig out;
    out.lambda1 = es.eigenvalues()(i1);
    out.lambda2 = (i2 >= 0) ? es.eigenvalues()(i2) : Complex(0, 0);
    out.vec1 = es.eigenvectors().col(i1);
    return out;
}

/// Phase convention: first entry with significant modulus becomes positive real.
inline MatrixXc fix_phase(MatrixXc u) {
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j)
            if (std::abs(u(i, j)) > 1e-6) {
                u *= std::conj(u(i, j)) / std::abs(u(i, j));
                return u;
            }
    return u;
}

/// Marginal ((d^n) x (d^n) density matrix) of the translation-invariant state
/// on a window, via the rho-weighted matrix-unit boundary average.
inline MatrixXc window_marginal(const MPSTensor& v, const VectorXr& rho, int n_sites) {
    const int k = v.k;
    const auto dim = static_cast<Eigen::Index>(std::pow(double(v.d), n_sites));
    MatrixXc out = MatrixXc::Zero(dim, dim);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            MatrixXc eab = MatrixXc::Zero(k, k);
            eab(a, b) = 1;
            VectorXc psi = brute_force_window(v, n_sites, eab).conjugate();
            out += rho(a) * psi * psi.adjoint();
        }
    return out;
}

inline int max_window(int d, int cap_dim = 1024) {
    int w = 1;
    while (w < 4 && std::pow(double(d), w + 1) <= double(cap_dim)) ++w;
    return w;
}

} // namespace detail_spt

struct InvarianceDetail {
    bool invariant = false;
    bool spectral_ok = false;
    bool windows_ok = false;
    double min_peripheral_modulus = 0.0; // over g, of the mixed transfer top eigenvalue
    double max_marginal_distance = 0.0;
};

/// Is the state generated by `c` invariant under the on-site symmetry?
/// Primary criterion: each mixed transfer map has a peripheral eigenvalue.
/// Secondary oracle: window marginals of the twisted and original tensors
/// agree on all windows up to length 4.
inline InvarianceDetail check_onsite_invariance_detail(const CanonicalMPS& c, const UnitaryRep& rep,
                                                       double tol = 1e-8) {
    if (rep.dim() != c.d()) throw Error("spt.dim_mismatch", "representation dimension must match the tensor");
    InvarianceDetail out;
    out.min_peripheral_modulus = 1.0;
    const int wmax = detail_spt::max_window(c.d());
    for (int g = 0; g < rep.group().order(); ++g) {
        MPSTensor tw = twist_tensor(c.tensor, rep.matrix(g));
        auto top = detail_spt::top_eigenpair(mixed_transfer_matrix(tw, c.tensor));
        out.min_peripheral_modulus = std::min(out.min_peripheral_modulus, std::abs(top.lambda1));
        for (int w = 1; w <= wmax; ++w) {
            MatrixXc m1 = detail_spt::window_marginal(c.tensor, c.rho, w);
            MatrixXc m2 = detail_spt::window_marginal(tw, c.rho, w);
            out.max_marginal_distance = std::max(out.max_marginal_distance, (m1 - m2).norm());
        }
    }
    out.spectral_ok = out.min_peripheral_modulus >= 1.0 - tol;
    out.windows_ok = out.max_marginal_distance <= 1e-8;
    out.invariant = out.spectral_ok && out.windows_ok;
    return out;
}

inline bool check_onsite_invariance(const CanonicalMPS& c, const UnitaryRep& rep, double tol = 1e-8) {
    return check_onsite_invariance_detail(c, rep, tol).invariant;
}

/// Solution of c(g) u(g) v_mu u(g)^* = v~_mu(g) from the fundamental theorem.
struct IntertwinerSolution {
    int g = 0;
    Complex c{1, 0};
    MatrixXc u;
    double residual = 0.0;
};

namespace detail_spt {

/// Extract the intertwiner between a twisted tensor and the original through
/// the unique peripheral eigenvector of the mixed transfer map.
inline IntertwinerSolution extract_intertwiner(const CanonicalMPS& can, const MPSTensor& twisted, int g) {
    const int k = can.k();
    auto top = top_eigenpair(mixed_transfer_matrix(twisted, can.tensor));
    if (std::abs(std::abs(top.lambda1) - 1.0) > 1e-8)
        throw Error("spt.extraction", "mixed transfer map has no peripheral eigenvalue; state not invariant");
    if (std::abs(top.lambda2) > 1.0 - 1e-8)
        throw Error("spt.degenerate", "peripheral eigenvalue degenerate; tensor looks non-primitive");
    IntertwinerSolution sol;
    sol.g = g;
    sol.c = top.lambda1;
    sol.u = fix_phase(polar_unitary(unvec(top.vec1, k, k)));
    double worst = 0.0;
    for (int mu = 0; mu < can.d(); ++mu)
        worst = std::max(worst,
                         operator_norm(sol.c * sol.u * can.tensor[mu] * sol.u.adjoint() - twisted[mu]));
    sol.residual = worst;
    if (sol.residual > 1e-6)
        throw Error("spt.extraction", "intertwiner residual " + std::to_string(sol.residual) +
                                          " exceeds tolerance");
    return sol;
}

} // namespace detail_spt

inline IntertwinerSolution fundamental_intertwiner(const CanonicalMPS& can, int g, const UnitaryRep& rep) {
    if (g == rep.group().identity()) {
        IntertwinerSolution sol;
        sol.g = g;
        sol.u = MatrixXc::Identity(can.k(), can.k());
        return sol;
    }
    return detail_spt::extract_intertwiner(can, twist_tensor(can.tensor, rep.matrix(g)), g);
}

struct OnsiteIndexResult {
    Cochain sigma;
    CohomologyClass h2_class;
    std::map<int, IntertwinerSolution> per_g;
    i64 modulus = 0;
};

namespace detail_spt {

/// Snap a raw phase table with modulus escalation: start at exponent(G) and
/// double until the phases land on the lattice (bounded by exponent * |G|).
inline Cochain snap_with_escalation(const FiniteGroup& g, int degree,
                                    const std::vector<Complex>& raw, double tol = 1e-6) {
    i64 m = g.exponent();
    const i64 m_max = static_cast<i64>(g.exponent()) * g.order();
    while (true) {
        try {
            return snap_phases(g, degree, m, raw, tol);
        } catch (const Error&) {
            if (2 * m > m_max) throw;
            m *= 2;
        }
    }
}

} // namespace detail_spt

/// The H^2(G, U(1)) index of an invariant MPS: extract intertwiners, read the
/// multiplier sigma(g,h) from u(g)u(h) = sigma u(gh), snap and classify.
inline OnsiteIndexResult onsite_h2_index(const CanonicalMPS& can, const UnitaryRep& rep) {
    const auto& group = rep.group();
    const int k = can.k();
    std::map<int, IntertwinerSolution> sols;
    for (int g = 0; g < group.order(); ++g) sols[g] = fundamental_intertwiner(can, g, rep);

    std::vector<Complex> raw(tuple_count(group, 2));
    for_each_tuple(group, 2, [&](const std::vector<int>& tup, std::size_t idx) {
        const auto& ug = sols[tup[0]].u;
        const auto& uh = sols[tup[1]].u;
        const auto& ugh = sols[group.mul(tup[0], tup[1])].u;
        Complex sigma = (ugh.adjoint() * ug * uh).trace() / double(k);
        if (std::abs(sigma) < 1.0 - 1e-6)
            throw Error("spt.inconsistent", "u(g)u(h) is not proportional to u(gh)");
        raw[idx] = sigma / std::abs(sigma);
    });

    OnsiteIndexResult out{Cochain(group, 2, 1), CohomologyClass{2, 1, Cochain(group, 2, 1), 0}, {}, 0};
    out.sigma = detail_spt::snap_with_escalation(group, 2, raw);
    out.modulus = out.sigma.modulus();
    if (!is_cocycle(out.sigma))
        throw Error("spt.inconsistent", "extracted multiplier fails the 2-cocycle identity");
    CohomologyGroup h2 = cohomology_group(group, 2, out.modulus);
    out.h2_class = h2.classify(out.sigma);
    out.per_g = std::move(sols);
    return out;
}

struct ReflectionIndexResult {
    MatrixXc j;  // theta = j followed by entrywise conjugation in the canonical basis
    int sign = 0;
    double residual = 0.0;       // defining-relation residual
    double jjbar_residual = 0.0; // || J conj(J) - sign I ||
};

/// Pollmann-style Z2 index for reflection: the reflected tensor
/// rho^{-1/2} v^T rho^{1/2} generates the same state; the intertwiner J with
/// the entrywise conjugation forms the antiunitary theta, and theta^2 = +-1.
inline ReflectionIndexResult reflection_z2_index(const CanonicalMPS& can) {
    const int k = can.k();
    MatrixXc rho_half(k, k), rho_half_inv(k, k);
    rho_half.setZero();
    rho_half_inv.setZero();
    for (int i = 0; i < k; ++i) {
        rho_half(i, i) = std::sqrt(can.rho(i));
        rho_half_inv(i, i) = 1.0 / std::sqrt(can.rho(i));
    }
    std::vector<MatrixXc> refl;
    refl.reserve(static_cast<std::size_t>(can.d()));
    for (int mu = 0; mu < can.d(); ++mu)
        refl.push_back(rho_half_inv * can.tensor[mu].transpose() * rho_half);
    MPSTensor reflected(std::move(refl), can.tensor.label + ":reflected");

    auto top = detail_spt::top_eigenpair(mixed_transfer_matrix(reflected, can.tensor));
    if (std::abs(std::abs(top.lambda1) - 1.0) > 1e-8)
        throw Error("spt.not_reflection_symmetric", "state is not reflection invariant");
    IntertwinerSolution sol = detail_spt::extract_intertwiner(can, reflected, -1);

    ReflectionIndexResult out;
    out.j = sol.u;
    out.residual = sol.residual;
    MatrixXc p = out.j * out.j.conjugate();
    Complex s = p.trace() / double(k);
    out.jjbar_residual = operator_norm(p - s * MatrixXc::Identity(k, k));
    if (out.jjbar_residual > 1e-6 || std::abs(std::abs(s) - 1.0) > 1e-6 || std::abs(s.imag()) > 1e-6)
        throw Error("spt.extraction", "J conj(J) is not a real sign within tolerance");
    out.sign = (s.real() > 0) ? 1 : -1;
    out.jjbar_residual = operator_norm(p - double(out.sign) * MatrixXc::Identity(k, k));
    return out;
}

struct LsmResult {
    CohomologyClass h2_class;
    bool obstructed = false;
    Cochain multiplier;
    i64 modulus = 0;
};

/// Lieb-Schultz-Mattis obstruction: the multiplier class of the on-site
/// projective representation. A nontrivial class rules out any translation
/// invariant interaction with a unique gapped symmetric ground state.
inline LsmResult lsm_obstruction(const UnitaryRep& rep) {
    const auto& group = rep.group();
    std::vector<Complex> raw(tuple_count(group, 2));
    for_each_tuple(group, 2, [&](const std::vector<int>& tup, std::size_t idx) {
        Complex lambda = rep.obstruction_scalar(tup[0], tup[1]);
        MatrixXc res = rep.matrix(tup[0]) * rep.matrix(tup[1]) -
                       lambda * rep.matrix(group.mul(tup[0], tup[1]));
        if (operator_norm(res) > 1e-8)
            throw Error("spt.not_projective", "U(g)U(h)U(gh)^-1 is not scalar");
        raw[idx] = lambda / std::abs(lambda);
    });
    Cochain snapped = detail_spt::snap_with_escalation(group, 2, raw);
    if (!is_cocycle(snapped))
        throw Error("spt.inconsistent", "projective multiplier fails the 2-cocycle identity");
    CohomologyGroup h2 = cohomology_group(group, 2, snapped.modulus());
    LsmResult out{h2.classify(snapped), false, snapped, snapped.modulus()};
    out.obstructed = !out.h2_class.trivial();
    return out;
}

/// Reflection LSM criterion: true iff the class is a double, h = 2 h1.
inline bool reflection_lsm_check(const CohomologyGroup& h2, int class_id) {
    for (i64 h1 = 0; h1 < h2.order(); ++h1)
        if (h2.add(static_cast<int>(h1), static_cast<int>(h1)) == class_id) return true;
    return false;
}

} // namespace sptk
