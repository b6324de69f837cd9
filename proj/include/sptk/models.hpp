#pragma once

#include <cmath>

#include "sptk/mps.hpp"

namespace sptk {

/// Spin-1 AKLT tensor in the S3 eigenbasis (physical order m = +1, 0, -1):
/// A^{+1} = sqrt(2/3) sigma^+, A^0 = -sqrt(1/3) sigma_3, A^{-1} = -sqrt(2/3) sigma^-.
/// Equals the Pauli form (sigma_1, sigma_2, sigma_3)/sqrt(3) up to the
/// cartesian-to-spherical physical basis rotation.
inline MPSTensor aklt_tensor() {
    MatrixXc ap = MatrixXc::Zero(2, 2), a0 = MatrixXc::Zero(2, 2), am = MatrixXc::Zero(2, 2);
    const double r23 = std::sqrt(2.0 / 3.0), r13 = std::sqrt(1.0 / 3.0);
    ap(0, 1) = r23;
    a0(0, 0) = -r13;
    a0(1, 1) = r13;
    am(1, 0) = -r23;
    return MPSTensor({ap, a0, am}, "aklt");
}

/// The same state written with Pauli Kraus operators (cartesian basis).
inline MPSTensor aklt_pauli_tensor() {
    MatrixXc s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, Complex(0, -1), Complex(0, 1), 0;
    s3 << 1, 0, 0, -1;
    const double f = 1.0 / std::sqrt(3.0);
    return MPSTensor({f * s1, f * s2, f * s3}, "aklt-pauli");
}

/// GHZ tensor (|0><0|, |1><1|): the standard non-primitive example.
inline MPSTensor ghz_tensor() {
    MatrixXc e00 = MatrixXc::Zero(2, 2), e11 = MatrixXc::Zero(2, 2);
    e00(0, 0) = 1;
    e11(1, 1) = 1;
    return MPSTensor({e00, e11}, "ghz");
}

/// Product state tensor: bond dimension 1, uniform amplitudes.
inline MPSTensor product_tensor(int d) {
    if (d < 1) throw Error("mps.bad_dim", "product tensor needs d >= 1");
    std::vector<MatrixXc> mats;
    const double a = 1.0 / std::sqrt(double(d));
    for (int mu = 0; mu < d; ++mu) {
        MatrixXc m(1, 1);
        m(0, 0) = a;
        mats.push_back(m);
    }
    return MPSTensor(std::move(mats), "product:" + std::to_string(d));
}

/// Two AKLT chains stacked (d = 9, k = 4).
inline MPSTensor aklt_stacked_tensor() {
    return stack_tensors(aklt_tensor(), aklt_tensor(), "aklt2");
}

} // namespace sptk
