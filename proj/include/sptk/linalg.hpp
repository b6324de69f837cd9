#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <vector>

#include "sptk/errors.hpp"

namespace sptk {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using VectorXr = Eigen::VectorXd;

// All spectral helpers here go through Hermitian eigendecompositions of Gram
// matrices rather than Eigen's BDCSVD: the 3.4.0 divide-and-conquer SVD
// returns wrong singular values on some complex inputs (observed directly on
// window-projector residuals), and JacobiSVD is too slow at a few hundred
// columns. Self-adjoint solves are both fast and trustworthy at these sizes.

inline double operator_norm(const MatrixXc& a) {
    if (a.size() == 0) return 0.0;
    const bool wide = a.rows() > a.cols();
    MatrixXc g = wide ? MatrixXc(a.adjoint() * a) : MatrixXc(a * a.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline bool is_hermitian(const MatrixXc& a, double tol = 1e-10) {
    return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

inline bool is_unitary(const MatrixXc& u, double tol = 1e-10) {
    MatrixXc r = u.adjoint() * u - MatrixXc::Identity(u.cols(), u.cols());
    return operator_norm(r) <= tol;
}

/// Unitary factor of the polar decomposition a = u * p. The matrices are
/// small (bond-space sized), so the one-sided Jacobi SVD is fine here.
inline MatrixXc polar_unitary(const MatrixXc& a) {
    Eigen::JacobiSVD<MatrixXc> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

/// Kronecker product, row-major index packing: (i1,i2) -> i1*rows(b)+i2.
inline MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
    MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Column-stacking vectorization: vec(A)(i + j*rows) = A(i,j).
inline VectorXc vec(const MatrixXc& a) {
    return Eigen::Map<const VectorXc>(a.data(), a.size());
}

inline MatrixXc unvec(const VectorXc& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const MatrixXc>(v.data(), rows, cols);
}

/// Descending singular values via the Gram spectrum.
inline VectorXr singular_values(const MatrixXc& a) {
    const bool tall = a.rows() >= a.cols();
    MatrixXc g = tall ? MatrixXc(a.adjoint() * a) : MatrixXc(a * a.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(g, Eigen::EigenvaluesOnly);
    VectorXr s(g.rows());
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        s(i) = std::sqrt(std::max(0.0, es.eigenvalues()(g.rows() - 1 - i)));
    return s;
}

inline Eigen::Index numerical_rank(const MatrixXc& a, double rel_tol = 1e-8) {
    if (a.size() == 0) return 0;
    VectorXr s = singular_values(a);
    double cut = s(0) * rel_tol;
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return r;
}

/// Orthonormal basis (columns) of the column span of `a`, keeping singular
/// directions with sigma > rel_tol * sigma_max.
inline MatrixXc range_basis(const MatrixXc& a, double rel_tol = 1e-8) {
    if (a.size() == 0) return MatrixXc(a.rows(), 0);
    MatrixXc g = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(g);
    double lam_max = std::max(0.0, es.eigenvalues().maxCoeff());
    double cut = lam_max * rel_tol * rel_tol;
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > cut) ++keep;
    MatrixXc u(a.rows(), keep);
    Eigen::Index col = 0;
    for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
        if (es.eigenvalues()(i) <= cut) continue;
        u.col(col++) = a * es.eigenvectors().col(i) / std::sqrt(es.eigenvalues()(i));
    }
    // Polish: the division by small sigmas can leave ~1e-8 orthonormality
    // error; one QR pass restores it without moving the span.
    Eigen::HouseholderQR<MatrixXc> qr(u);
    MatrixXc thin = MatrixXc::Identity(u.rows(), u.cols());
    return qr.householderQ() * thin;
}

/// Orthonormal basis of the null space of `a`.
inline MatrixXc kernel_basis(const MatrixXc& a, double rel_tol = 1e-8) {
    MatrixXc g = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(g);
    double lam_max = std::max(0.0, es.eigenvalues().maxCoeff());
    double cut = lam_max * rel_tol * rel_tol;
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= cut) ++keep;
    MatrixXc v(a.cols(), keep);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= cut) v.col(col++) = es.eigenvectors().col(i);
    return v;
}

/// Intersection of two subspaces given by orthonormal column bases. The cut
/// separates directions by the sine of their angle to the second subspace;
/// genuine members sit at roundoff while outsiders are O(1).
inline MatrixXc subspace_intersection(const MatrixXc& b1, const MatrixXc& b2, double sine_cut = 1e-6) {
    if (b1.cols() == 0 || b2.cols() == 0) return MatrixXc(b1.rows(), 0);
    // x = b1*c lies in span(b2) iff (I - P2) b1 c = 0.
    MatrixXc residual = b1 - b2 * (b2.adjoint() * b1);
    MatrixXc g = residual.adjoint() * residual;
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(g);
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= sine_cut * sine_cut) ++keep;
    MatrixXc combo(b1.cols(), keep);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= sine_cut * sine_cut) combo.col(col++) = es.eigenvectors().col(i);
    return b1 * combo; // isometry times orthonormal columns stays orthonormal
}

/// Largest principal-angle sine between the spans, ||(I - P1) b2||_2. For
/// equal dimensions this equals the projector distance ||P1 - P2||.
inline double subspace_sine(const MatrixXc& b1, const MatrixXc& b2) {
    if (b2.cols() == 0) return 0.0;
    MatrixXc residual = b2 - b1 * (b1.adjoint() * b2);
    return operator_norm(residual);
}

/// True when the two orthonormal bases span the same subspace to tolerance
/// tol on the projector distance.
inline bool same_subspace(const MatrixXc& b1, const MatrixXc& b2, double tol = 1e-8) {
    if (b1.cols() != b2.cols()) return false;
    if (b1.cols() == 0) return true;
    return std::max(subspace_sine(b1, b2), subspace_sine(b2, b1)) <= tol;
}

} // namespace sptk
