#pragma once

#include <Eigen/Eigenvalues>
#include <functional>
#include <vector>

#include "sptk/linalg.hpp"

namespace sptk {

/// Fourier transform of the adiabatic filter: -i/(sqrt(2 pi) k) outside the
/// gap window, continued linearly (odd, continuous) inside. The in-gap values
/// never couple ground to excited states when the declared gap holds, so any
/// odd continuous completion transports the projector correctly.
inline Complex filter_fourier(double k, double gamma) {
    const double root2pi = std::sqrt(2.0 * M_PI);
    if (std::abs(k) >= gamma) return Complex(0, -1.0 / (root2pi * k));
    return Complex(0, -k / (root2pi * gamma * gamma));
}

/// A smooth family s -> H(s) of Hermitian matrices with a declared uniform
/// spectral gap above the ground cluster. The gap and Hermiticity are
/// validated on a sample grid at construction; paths without an analytic
/// derivative fall back to a central finite difference (flagged).
class GappedPath {
public:
    using MatrixFn = std::function<MatrixXc(double)>;

    GappedPath(int dim, MatrixFn hamiltonian, MatrixFn derivative, double gap,
               int validation_samples = 64)
        : dim_(dim), h_(std::move(hamiltonian)), dh_(std::move(derivative)), gap_(gap),
          derivative_numeric_(false) {
        validate(validation_samples);
    }

    GappedPath(int dim, MatrixFn hamiltonian, double gap, int validation_samples = 64)
        : dim_(dim), h_(std::move(hamiltonian)), gap_(gap), derivative_numeric_(true) {
        const double step = 1e-5;
        MatrixFn h = h_;
        dh_ = [h, step](double s) { return MatrixXc(((h(s + step) - h(s - step)) / (2.0 * step))); };
        validate(validation_samples);
    }

    int dim() const { return dim_; }
    double gap() const { return gap_; }
    bool derivative_is_numeric() const { return derivative_numeric_; }
    MatrixXc hamiltonian(double s) const { return h_(s); }
    MatrixXc derivative(double s) const { return dh_(s); }
    int ground_rank() const { return ground_rank_; }

    /// Spectral projector onto the ground cluster, with a gap check.
    MatrixXc ground_projector(double s) const {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(h_(s));
        return projector_from(es, s);
    }

private:
    MatrixXc projector_from(const Eigen::SelfAdjointEigenSolver<MatrixXc>& es, double s) const {
        const auto& e = es.eigenvalues();
        double e0 = e(0);
        int rank = 0;
        while (rank < dim_ && e(rank) < e0 + 0.5 * gap_) ++rank;
        if (rank < dim_ && e(rank) - e0 < gap_ - 1e-9)
            throw Error("flow.gap_violation",
                        "spectral gap below the declared value at s = " + std::to_string(s));
        if (ground_rank_ != 0 && rank != ground_rank_)
            throw Error("flow.gap_violation",
                        "ground cluster rank changed along the path at s = " + std::to_string(s));
        MatrixXc p = MatrixXc::Zero(dim_, dim_);
        for (int i = 0; i < rank; ++i) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
        return p;
    }

    void validate(int samples) {
        if (gap_ <= 0) throw Error("flow.bad_gap", "declared gap must be positive");
        for (int j = 0; j <= samples; ++j) {
            double s = double(j) / samples;
            MatrixXc h = h_(s);
            if (h.rows() != dim_ || h.cols() != dim_)
                throw Error("flow.bad_dim", "path matrix has the wrong dimension");
            if (!is_hermitian(h, 1e-10))
                throw Error("flow.not_hermitian", "H(s) is not Hermitian at s = " + std::to_string(s));
            Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
            if (j == 0) {
                double e0 = es.eigenvalues()(0);
                int rank = 0;
                while (rank < dim_ && es.eigenvalues()(rank) < e0 + 0.5 * gap_) ++rank;
                ground_rank_ = rank;
            }
            projector_from(es, s);
        }
    }

    int dim_;
    MatrixFn h_, dh_;
    double gap_;
    bool derivative_numeric_;
    mutable int ground_rank_ = 0;
};

/// The Hastings generator D(s), evaluated spectrally: in the eigenbasis of
/// H(s), D_mn = sqrt(2 pi) W^(E_n - E_m) H'(s)_mn. For |E_m - E_n| >= gap
/// this is exactly -i H'_mn / (E_n - E_m), matching the resolvent form of
/// dP/ds = i[D, P] on the ground-excited block.
inline MatrixXc hastings_generator(const GappedPath& path, double s) {
    MatrixXc h = path.hamiltonian(s);
    MatrixXc dh = path.derivative(s);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
    const auto& e = es.eigenvalues();
    const MatrixXc& v = es.eigenvectors();
    MatrixXc b = v.adjoint() * dh * v;
    const double root2pi = std::sqrt(2.0 * M_PI);
    MatrixXc d_eig(path.dim(), path.dim());
    for (int m = 0; m < path.dim(); ++m)
        for (int n = 0; n < path.dim(); ++n)
            d_eig(m, n) = root2pi * filter_fourier(e(n) - e(m), path.gap()) * b(m, n);
    return v * d_eig * v.adjoint();
}

struct FlowResult {
    std::vector<double> s_values;
    std::vector<double> deviations; // ||U P(0) U^* - P(s)|| per grid point
    double max_deviation = 0.0;
    MatrixXc u_final;
    int ground_rank = 0;
};

/// Fourth-order integration of U'(s) = i D(s) U(s), U(0) = 1, with polar
/// re-unitarization each step. Compares the transported projector against
/// the exact spectral projector on the grid.
inline FlowResult transport(const GappedPath& path, int steps) {
    if (steps < 16) throw Error("flow.bad_steps", "transport needs at least 16 steps");
    const int n = path.dim();
    const double h = 1.0 / steps;

    FlowResult out;
    out.ground_rank = path.ground_rank();
    MatrixXc u = MatrixXc::Identity(n, n);
    MatrixXc p0 = path.ground_projector(0.0);

    auto record = [&](double s, const MatrixXc& u_now) {
        MatrixXc p_exact = path.ground_projector(s);
        double dev = operator_norm(u_now * p0 * u_now.adjoint() - p_exact);
        out.s_values.push_back(s);
        out.deviations.push_back(dev);
        out.max_deviation = std::max(out.max_deviation, dev);
    };
    record(0.0, u);

    MatrixXc d0 = hastings_generator(path, 0.0);
    for (int j = 0; j < steps; ++j) {
        double s = j * h;
        MatrixXc d_half = hastings_generator(path, s + 0.5 * h);
        MatrixXc d_full = hastings_generator(path, s + h);
        const Complex i_unit(0, 1);
        MatrixXc k1 = i_unit * (d0 * u);
        MatrixXc k2 = i_unit * (d_half * (u + 0.5 * h * k1));
        MatrixXc k3 = i_unit * (d_half * (u + 0.5 * h * k2));
        MatrixXc k4 = i_unit * (d_full * (u + h * k3));
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        u = polar_unitary(u);
        d0 = d_full;
        record(s + h, u);
    }
    out.u_final = u;
    return out;
}

/// Residual of dP/ds = i [D(s), P(s)] with a central finite difference;
/// expected O(h^2) for smooth gapped paths.
inline double derivative_identity_check(const GappedPath& path, double s, double h) {
    MatrixXc p_plus = path.ground_projector(s + h);
    MatrixXc p_minus = path.ground_projector(s - h);
    MatrixXc dp = (p_plus - p_minus) / (2.0 * h);
    MatrixXc d = hastings_generator(path, s);
    MatrixXc p = path.ground_projector(s);
    const Complex i_unit(0, 1);
    MatrixXc comm = i_unit * (d * p - p * d);
    return operator_norm(dp - comm);
}

} // namespace sptk
