#pragma once

#include <cmath>
#include <vector>

#include "sptk/group.hpp"
#include "sptk/linalg.hpp"

namespace sptk {

/// Standard spin-s matrices (s = (d-1)/2) in the S3 eigenbasis, ordered
/// m = s, s-1, ..., -s. Returns {S1, S2, S3}.
inline std::vector<MatrixXc> spin_operators(int d) {
    if (d < 2) throw Error("groups.invalid_dim", "spin operators need dimension >= 2");
    const double s = 0.5 * (d - 1);
    MatrixXc sp = MatrixXc::Zero(d, d);
    MatrixXc s3 = MatrixXc::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        double m = s - i;
        s3(i, i) = m;
        if (i > 0) {
            // (S+)_{m, m-1} = sqrt(s(s+1) - m(m-1)) with row index for m = s-i+1.
            double mm = s - i + 1;
            sp(i - 1, i) = std::sqrt(s * (s + 1) - (mm - 1) * mm);
        }
    }
    MatrixXc sm = sp.adjoint();
    MatrixXc s1 = 0.5 * (sp + sm);
    MatrixXc s2 = Complex(0, -0.5) * (sp - sm);
    return {s1, s2, s3};
}

/// Exponential exp(i*t*H) of a Hermitian matrix, by eigendecomposition.
inline MatrixXc hermitian_phase_exp(const MatrixXc& h, double t) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
    VectorXc phases(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        phases(i) = std::exp(Complex(0, t * es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// A (possibly projective) unitary representation of a finite group. Each
/// matrix must be unitary; products U(g)U(h)U(gh)^-1 must be scalar, but the
/// scalar is not required to be 1.
class UnitaryRep {
public:
    UnitaryRep(FiniteGroup group, std::vector<MatrixXc> matrices, std::string label = "")
        : group_(std::move(group)), matrices_(std::move(matrices)), label_(std::move(label)) {
        if (static_cast<int>(matrices_.size()) != group_.order())
            throw Error("groups.rep_size", "need one matrix per group element");
        dim_ = static_cast<int>(matrices_.at(0).rows());
        for (const auto& u : matrices_) {
            if (u.rows() != dim_ || u.cols() != dim_)
                throw Error("groups.rep_shape", "representation matrices must share one square shape");
            if (!is_unitary(u, 1e-10))
                throw Error("groups.rep_not_unitary", "representation matrix is not unitary");
        }
        for (int g = 0; g < group_.order(); ++g)
            for (int h = 0; h < group_.order(); ++h)
                if (!projective_scalar_ok(g, h))
                    throw Error("groups.rep_not_projective",
                                "U(g)U(h)U(gh)^-1 is not scalar within tolerance");
    }

    const FiniteGroup& group() const { return group_; }
    int dim() const { return dim_; }
    const MatrixXc& matrix(int g) const { return matrices_[static_cast<std::size_t>(g)]; }
    const std::string& label() const { return label_; }

    /// The scalar lambda(g,h) with U(g)U(h) = lambda * U(gh).
    Complex obstruction_scalar(int g, int h) const {
        MatrixXc prod = matrix(g) * matrix(h) * matrix(group_.mul(g, h)).adjoint();
        return prod.trace() / double(dim_);
    }

private:
    bool projective_scalar_ok(int g, int h) const {
        Complex lambda = obstruction_scalar(g, h);
        MatrixXc prod = matrix(g) * matrix(h) * matrix(group_.mul(g, h)).adjoint();
        return operator_norm(prod - lambda * MatrixXc::Identity(dim_, dim_)) <= 1e-8;
    }

    FiniteGroup group_;
    std::vector<MatrixXc> matrices_;
    std::string label_;
    int dim_ = 0;
};

/// The Z2xZ2 representation {1, exp(i pi S1), exp(i pi S2), exp(i pi S3)} on
/// C^d. Genuine for odd d, projective for even d. Element packing follows
/// direct_product(Z2, Z2): index 1 = (1,0), index 2 = (0,1), index 3 = (1,1).
inline UnitaryRep pauli_z2z2_rep(int d) {
    auto spins = spin_operators(d);
    FiniteGroup g = direct_product(make_cyclic(2), make_cyclic(2));
    std::vector<MatrixXc> mats(4);
    mats[0] = MatrixXc::Identity(d, d);
    mats[1] = hermitian_phase_exp(spins[0], M_PI);
    mats[2] = hermitian_phase_exp(spins[1], M_PI);
    mats[3] = hermitian_phase_exp(spins[2], M_PI);
    return UnitaryRep(std::move(g), std::move(mats), "pauli:" + std::to_string(d));
}

/// Tensor product of two representations of the same group (site-pair
/// blocking or chain stacking). Physical index packing is row-major.
inline UnitaryRep tensor_rep(const UnitaryRep& a, const UnitaryRep& b, std::string label = "") {
    if (!a.group().same_table(b.group()))
        throw Error("groups.rep_mismatch", "tensor_rep needs representations of the same group");
    std::vector<MatrixXc> mats;
    mats.reserve(static_cast<std::size_t>(a.group().order()));
    for (int g = 0; g < a.group().order(); ++g) mats.push_back(kron(a.matrix(g), b.matrix(g)));
    return UnitaryRep(a.group(), std::move(mats), std::move(label));
}

} // namespace sptk
