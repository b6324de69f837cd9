#pragma once

#include <Eigen/Eigenvalues>
#include <optional>
#include <string>
#include <vector>

#include "sptk/linalg.hpp"
#include "sptk/rng.hpp"

namespace sptk {

/// A d-tuple of k x k complex matrices (v_1, ..., v_d) generating a
/// translation-invariant matrix product state.
struct MPSTensor {
    int d = 0;
    int k = 0;
    std::vector<MatrixXc> mats;
    std::string label;

    MPSTensor() = default;
    MPSTensor(std::vector<MatrixXc> m, std::string lbl = "") : mats(std::move(m)), label(std::move(lbl)) {
        if (mats.empty()) throw Error("mps.empty", "tensor needs at least one matrix");
        d = static_cast<int>(mats.size());
        k = static_cast<int>(mats[0].rows());
        for (const auto& v : mats) {
            if (v.rows() != k || v.cols() != k)
                throw Error("mps.shape", "all matrices must be square of one bond dimension");
            if (!v.allFinite()) throw Error("mps.nonfinite", "tensor entries must be finite");
        }
    }

    const MatrixXc& operator[](int mu) const { return mats[static_cast<std::size_t>(mu)]; }
};

/// Matrix of the completely positive transfer map A -> sum_i v_i A v_i^* in
/// the column-stacking vectorization (vec(A)(i + j*k) = A(i,j); basis order
/// E00, E10, ..., E01, E11, ...).
inline MatrixXc transfer_matrix(const MPSTensor& v) {
    MatrixXc t = MatrixXc::Zero(v.k * v.k, v.k * v.k);
    for (int mu = 0; mu < v.d; ++mu) t += kron(v[mu].conjugate(), v[mu]);
    return t;
}

/// Mixed transfer map X -> sum_mu w_mu X v_mu^* between two tensors of equal
/// physical and bond dimension.
inline MatrixXc mixed_transfer_matrix(const MPSTensor& w, const MPSTensor& v) {
    if (w.d != v.d || w.k != v.k) throw Error("mps.shape", "mixed transfer needs matching dimensions");
    MatrixXc t = MatrixXc::Zero(v.k * v.k, v.k * v.k);
    for (int mu = 0; mu < v.d; ++mu) t += kron(v[mu].conjugate(), w[mu]);
    return t;
}

inline MatrixXc apply_transfer(const MPSTensor& v, const MatrixXc& a) {
    MatrixXc out = MatrixXc::Zero(v.k, v.k);
    for (int mu = 0; mu < v.d; ++mu) out += v[mu] * a * v[mu].adjoint();
    return out;
}

/// Transfer operator with its matrix realization. Construction cross-checks
/// the matrix against direct Kraus evaluation on a random argument.
struct TransferOp {
    MPSTensor source;
    MatrixXc matrix;

    explicit TransferOp(MPSTensor v) : source(std::move(v)), matrix(transfer_matrix(source)) {
        Rng rng(0x7ea5);
        MatrixXc a(source.k, source.k);
        for (int i = 0; i < source.k; ++i)
            for (int j = 0; j < source.k; ++j) a(i, j) = Complex(rng.symmetric(), rng.symmetric());
        MatrixXc direct = apply_transfer(source, a);
        MatrixXc via = unvec(matrix * vec(a), source.k, source.k);
        if ((direct - via).norm() > 1e-12 * std::max(1.0, direct.norm()))
            throw Error("mps.transfer_mismatch", "transfer matrix disagrees with Kraus evaluation");
    }

    std::vector<Complex> eigenvalues() const {
        Eigen::ComplexEigenSolver<MatrixXc> es(matrix, false);
        std::vector<Complex> out(static_cast<std::size_t>(matrix.rows()));
        for (Eigen::Index i = 0; i < matrix.rows(); ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
            if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
            if (a.real() != b.real()) return a.real() > b.real();
            return a.imag() > b.imag();
        });
        return out;
    }
};

inline TransferOp transfer_op(const MPSTensor& v) { return TransferOp(v); }

inline double spectral_radius(const MPSTensor& v) {
    auto eigs = TransferOp(v).eigenvalues();
    return eigs.empty() ? 0.0 : std::abs(eigs[0]);
}

/// Rescale so the transfer map has spectral radius 1.
inline MPSTensor normalize(const MPSTensor& v) {
    double r = spectral_radius(v);
    if (r < 1e-300) throw Error("mps.degenerate", "all tensor matrices vanish; no normalization exists");
    double s = 1.0 / std::sqrt(r);
    std::vector<MatrixXc> mats;
    mats.reserve(v.mats.size());
    for (const auto& m : v.mats) mats.push_back(s * m);
    MPSTensor out(std::move(mats), v.label);
    return out;
}

struct PrimitivityReport {
    bool primitive = false;
    double spectral_radius = 0.0;
    std::vector<Complex> peripheral_eigenvalues;
    double fixed_point_min_eigenvalue = 0.0;
    std::optional<int> span_length; // smallest m with K_m = M_k
    bool span_cap_hit = false;      // growth still in progress at the cap
    bool span_stabilized_short = false; // span stopped growing below k^2
    bool condition_spectral = false;    // theorem condition (2)
    bool condition_span = false;        // theorem condition (3)
    bool criteria_agree = false;
};

namespace detail_mps {

/// Hermitian, positive-scaled version of a fixed-point candidate.
inline MatrixXc hermitize_fixed_point(MatrixXc x) {
    Complex tr = x.trace();
    if (std::abs(tr) > 1e-14) x *= std::conj(tr) / std::abs(tr); // rotate trace onto the positive axis
    return 0.5 * (x + x.adjoint());
}

/// Eigenvector of `m` for the eigenvalue closest to 1.
inline MatrixXc fixed_point_of(const MatrixXc& m, int k) {
    Eigen::ComplexEigenSolver<MatrixXc> es(m, true);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < m.rows(); ++i)
        if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = i;
    return unvec(es.eigenvectors().col(best), k, k);
}

/// Gram-Schmidt growth of word spans K_m; returns the orthonormal basis of
/// the span of {v_mu * B} given a basis B of the previous span.
inline std::vector<MatrixXc> grow_span(const MPSTensor& v, const std::vector<MatrixXc>& prev) {
    std::vector<MatrixXc> basis;
    for (int mu = 0; mu < v.d; ++mu) {
        for (const auto& b : prev) {
            MatrixXc w = v[mu] * b;
            for (const auto& e : basis) {
                Complex overlap = (e.adjoint() * w).trace();
                w -= overlap * e;
            }
            double n = w.norm();
            if (n > 1e-10) basis.push_back(w / n);
        }
    }
    return basis;
}

inline bool same_matrix_span(const std::vector<MatrixXc>& a, const std::vector<MatrixXc>& b, int k) {
    if (a.size() != b.size()) return false;
    MatrixXc pa = MatrixXc::Zero(k * k, k * k), pb = MatrixXc::Zero(k * k, k * k);
    for (const auto& m : a) pa += vec(m) * vec(m).adjoint();
    for (const auto& m : b) pb += vec(m) * vec(m).adjoint();
    return (pa - pb).norm() < 1e-8;
}

} // namespace detail_mps

/// Primitivity test running both equivalent criteria of the transfer-map
/// theorem: (2) peripheral spectrum {1}, simple, with faithful positive fixed
/// points, and (3) words of some length m spanning all of M_k. The two
/// verdicts must agree; a disagreement raises a numerical-ambiguity error.
inline PrimitivityReport is_primitive(const MPSTensor& v, double tol_peripheral = 1e-8) {
    PrimitivityReport rep;
    TransferOp top(v);
    auto eigs = top.eigenvalues();
    rep.spectral_radius = std::abs(eigs[0]);
    if (std::abs(rep.spectral_radius - 1.0) > 1e-6)
        throw Error("mps.not_normalized", "is_primitive requires a normalized tensor (spectral radius 1)");

    for (const auto& lambda : eigs)
        if (std::abs(lambda) >= 1.0 - tol_peripheral) rep.peripheral_eigenvalues.push_back(lambda);

    bool peripheral_ok = rep.peripheral_eigenvalues.size() == 1 &&
                         std::abs(rep.peripheral_eigenvalues[0] - 1.0) < 1e-6;

    double min_eig = 0.0;
    if (peripheral_ok) {
        MatrixXc e = detail_mps::hermitize_fixed_point(detail_mps::fixed_point_of(top.matrix, v.k));
        MatrixXc rho = detail_mps::hermitize_fixed_point(detail_mps::fixed_point_of(top.matrix.adjoint(), v.k));
        Eigen::SelfAdjointEigenSolver<MatrixXc> ee(e), er(rho);
        double e_min = ee.eigenvalues().minCoeff() / std::max(1e-300, ee.eigenvalues().maxCoeff());
        double r_min = er.eigenvalues().minCoeff() / std::max(1e-300, er.eigenvalues().maxCoeff());
        min_eig = std::min(e_min, r_min);
    }
    rep.fixed_point_min_eigenvalue = min_eig;
    rep.condition_spectral = peripheral_ok && min_eig > 1e-8;

    // Criterion (3): grow K_m until it fills M_k, stabilizes short, or caps.
    const int target = v.k * v.k;
    const int m_cap = v.k * v.k * v.k * v.k + 1;
    std::vector<MatrixXc> span = detail_mps::grow_span(v, {MatrixXc::Identity(v.k, v.k)});
    int m = 1;
    while (true) {
        if (static_cast<int>(span.size()) == target) {
            rep.span_length = m;
            rep.condition_span = true;
            break;
        }
        if (m >= m_cap) {
            rep.span_cap_hit = true;
            break;
        }
        auto next = detail_mps::grow_span(v, span);
        if (detail_mps::same_matrix_span(next, span, v.k)) {
            rep.span_stabilized_short = true;
            break;
        }
        span = std::move(next);
        ++m;
    }

    rep.criteria_agree = (rep.condition_spectral == rep.condition_span);
    rep.primitive = rep.condition_spectral && rep.condition_span;
    if (!rep.criteria_agree)
        throw Error("mps.criteria_disagree",
                    std::string("primitivity criteria disagree: spectral=") +
                        (rep.condition_spectral ? "true" : "false") +
                        " span=" + (rep.condition_span ? "true" : "false"));
    return rep;
}

/// Gauge-fixed MPS: right fixed point = identity, left fixed point diagonal
/// with descending positive eigenvalues summing to 1.
struct CanonicalMPS {
    MPSTensor tensor;
    VectorXr rho;   // diagonal of the left fixed point
    MatrixXc gauge; // change of basis: tensor = gauge * original * gauge^-1

    int d() const { return tensor.d; }
    int k() const { return tensor.k; }

    MatrixXc rho_matrix() const {
        MatrixXc m = MatrixXc::Zero(k(), k());
        for (int i = 0; i < k(); ++i) m(i, i) = rho(i);
        return m;
    }
};

inline CanonicalMPS canonical_form(const MPSTensor& v_in) {
    MPSTensor v = normalize(v_in);
    PrimitivityReport rep = is_primitive(v);
    if (!rep.primitive) throw Error("mps.not_primitive", "canonical_form requires a primitive tensor");

    TransferOp top(v);
    MatrixXc e = detail_mps::hermitize_fixed_point(detail_mps::fixed_point_of(top.matrix, v.k));
    e /= e.trace().real() / v.k; // harmless overall scale
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(e);
    if (es.eigenvalues().minCoeff() <= 0)
        throw Error("mps.not_primitive", "right fixed point is not positive definite");
    MatrixXc e_half_inv = es.operatorInverseSqrt();
    MatrixXc e_half = es.operatorSqrt();

    std::vector<MatrixXc> gauged;
    gauged.reserve(v.mats.size());
    for (const auto& m : v.mats) gauged.push_back(e_half_inv * m * e_half);
    MPSTensor v1(std::move(gauged), v.label);

    // Left fixed point of the gauged tensor, then a unitary making it diagonal
    // with descending eigenvalues.
    MatrixXc rho = detail_mps::hermitize_fixed_point(detail_mps::fixed_point_of(transfer_matrix(v1).adjoint(), v.k));
    if (rho.trace().real() < 0) rho = -rho;
    rho /= rho.trace().real();
    Eigen::SelfAdjointEigenSolver<MatrixXc> rs(rho);
    if (rs.eigenvalues().minCoeff() <= 0)
        throw Error("mps.not_primitive", "left fixed point is not positive definite");

    const int k = v.k;
    MatrixXc q(k, k);
    VectorXr lam(k);
    for (int i = 0; i < k; ++i) { // descending order
        lam(i) = rs.eigenvalues()(k - 1 - i);
        q.col(i) = rs.eigenvectors().col(k - 1 - i);
    }
    // Deterministic phase: first significant entry of each eigenvector real positive.
    for (int i = 0; i < k; ++i) {
        for (int r = 0; r < k; ++r) {
            if (std::abs(q(r, i)) > 1e-8) {
                q.col(i) *= std::conj(q(r, i)) / std::abs(q(r, i));
                break;
            }
        }
    }

    std::vector<MatrixXc> final_mats;
    final_mats.reserve(v1.mats.size());
    for (const auto& m : v1.mats) final_mats.push_back(q.adjoint() * m * q);

    CanonicalMPS out;
    out.tensor = MPSTensor(std::move(final_mats), v.label);
    out.rho = lam;
    out.gauge = q.adjoint() * e_half_inv;

    MatrixXc ti = apply_transfer(out.tensor, MatrixXc::Identity(k, k));
    if ((ti - MatrixXc::Identity(k, k)).norm() > 1e-10 * k)
        throw Error("mps.gauge_failed", "right fixed point is not the identity after gauging");
    MatrixXc rho_check = MatrixXc::Zero(k, k);
    for (int mu = 0; mu < out.tensor.d; ++mu)
        rho_check += out.tensor[mu].adjoint() * out.rho_matrix() * out.tensor[mu];
    if ((rho_check - out.rho_matrix()).norm() > 1e-10 * k)
        throw Error("mps.gauge_failed", "left fixed point is not preserved after gauging");
    return out;
}

/// E_A(X) = sum_{mu nu} A_{mu nu} v_mu X v_nu^*.
inline MatrixXc observable_transfer(const MPSTensor& v, const MatrixXc& a, const MatrixXc& x) {
    if (a.rows() != v.d || a.cols() != v.d)
        throw Error("mps.obs_dim", "observable must be d x d");
    MatrixXc out = MatrixXc::Zero(v.k, v.k);
    for (int mu = 0; mu < v.d; ++mu)
        for (int nu = 0; nu < v.d; ++nu) {
            if (a(mu, nu) == Complex(0, 0)) continue;
            out += a(mu, nu) * v[mu] * x * v[nu].adjoint();
        }
    return out;
}

/// Expectation of a string of single-site observables on consecutive sites:
/// tr(rho E_{A_1}(E_{A_2}(... E_{A_l}(I)))).
inline Complex expectation(const CanonicalMPS& c, const std::vector<MatrixXc>& sites) {
    MatrixXc x = MatrixXc::Identity(c.k(), c.k());
    for (auto it = sites.rbegin(); it != sites.rend(); ++it) x = observable_transfer(c.tensor, *it, x);
    return (c.rho_matrix() * x).trace();
}

/// Correlation length xi = -1 / ln |lambda_2| from the second transfer
/// eigenvalue; 0 for bond dimension 1 (no second eigenvalue, instant decay).
inline double correlation_length(const CanonicalMPS& c, double tol_peripheral = 1e-8) {
    if (c.k() == 1) return 0.0;
    auto eigs = TransferOp(c.tensor).eigenvalues();
    double lambda2 = 0.0;
    for (const auto& l : eigs)
        if (std::abs(l) < 1.0 - tol_peripheral) { lambda2 = std::abs(l); break; }
    if (lambda2 < 1e-300) return 0.0;
    return -1.0 / std::log(lambda2);
}

/// Window vector of the Gamma-style contraction: component at the index
/// string (mu_0..mu_{N-1}) is Tr(boundary * (v_{mu_0} ... v_{mu_{N-1}})^*).
/// Index strings are enumerated with mu_0 slowest (row-major).
inline VectorXc brute_force_window(const MPSTensor& v, int n_sites, const MatrixXc& boundary,
                                   std::size_t cap = 1'000'000) {
    double total = std::pow(double(v.d), n_sites);
    if (total > double(cap)) throw Error("mps.window_cap", "window dimension d^N exceeds the cap");
    const std::size_t dim = static_cast<std::size_t>(total);
    VectorXc out(static_cast<Eigen::Index>(dim));
    std::vector<int> idx(static_cast<std::size_t>(n_sites), 0);
    std::vector<MatrixXc> prefix(static_cast<std::size_t>(n_sites) + 1);
    prefix[0] = MatrixXc::Identity(v.k, v.k);
    for (int i = 0; i < n_sites; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] * v[0];
    for (std::size_t flat = 0; flat < dim; ++flat) {
        out(static_cast<Eigen::Index>(flat)) = (boundary * prefix[static_cast<std::size_t>(n_sites)].adjoint()).trace();
        // Increment the index string (last site fastest) and refresh prefixes.
        int pos = n_sites - 1;
        while (pos >= 0) {
            if (++idx[static_cast<std::size_t>(pos)] < v.d) break;
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        for (int i = pos; i < n_sites; ++i)
            prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] * v[idx[static_cast<std::size_t>(i)]];
    }
    return out;
}

/// Physical-index twist by a unitary: v~_mu = sum_nu U_{nu mu} v_nu.
inline MPSTensor twist_tensor(const MPSTensor& v, const MatrixXc& u) {
    if (u.rows() != v.d || u.cols() != v.d)
        throw Error("mps.twist_dim", "twist unitary must be d x d");
    std::vector<MatrixXc> mats(static_cast<std::size_t>(v.d));
    for (int mu = 0; mu < v.d; ++mu) {
        MatrixXc m = MatrixXc::Zero(v.k, v.k);
        for (int nu = 0; nu < v.d; ++nu) m += u(nu, mu) * v[nu];
        mats[static_cast<std::size_t>(mu)] = m;
    }
    return MPSTensor(std::move(mats), v.label);
}

/// Two chains side by side: physical index pairs packed row-major, bond
/// spaces tensored.
inline MPSTensor stack_tensors(const MPSTensor& a, const MPSTensor& b, std::string label = "") {
    std::vector<MatrixXc> mats;
    mats.reserve(static_cast<std::size_t>(a.d) * b.d);
    for (int mu = 0; mu < a.d; ++mu)
        for (int nu = 0; nu < b.d; ++nu) mats.push_back(kron(a[mu], b[nu]));
    return MPSTensor(std::move(mats), std::move(label));
}

/// Block two consecutive sites into one: w_{mu*d+nu} = v_mu v_nu.
inline MPSTensor block_two_sites(const MPSTensor& v) {
    std::vector<MatrixXc> mats;
    mats.reserve(static_cast<std::size_t>(v.d) * v.d);
    for (int mu = 0; mu < v.d; ++mu)
        for (int nu = 0; nu < v.d; ++nu) mats.push_back(v[mu] * v[nu]);
    return MPSTensor(std::move(mats), v.label + ":blocked");
}

} // namespace sptk
