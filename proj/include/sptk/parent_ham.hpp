#pragma once

#include <Eigen/Eigenvalues>
#include <optional>
#include <vector>

#include "sptk/mps.hpp"

namespace sptk {

/// Matrix of the map Gamma_{m,v}: M_k -> (C^d)^m sending X to the window
/// vector with components Tr(X (v_{mu_0} ... v_{mu_{m-1}})^*). Rows are index
/// strings (mu_0 slowest); columns follow the column-stacked vec(X) basis.
struct GammaMap {
    MPSTensor source;
    int m = 0;
    MatrixXc matrix;
    Eigen::Index rank = 0;
};

inline GammaMap gamma_map(const MPSTensor& v, int m, std::size_t cap = 65536) {
    double rows_est = std::pow(double(v.d), m);
    if (rows_est > double(cap)) throw Error("parent_ham.cap", "window dimension d^m exceeds the cap");
    const auto rows = static_cast<Eigen::Index>(rows_est);
    const int k = v.k;
    GammaMap g;
    g.source = v;
    g.m = m;
    g.matrix = MatrixXc(rows, k * k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            MatrixXc eab = MatrixXc::Zero(k, k);
            eab(a, b) = 1;
            g.matrix.col(a + b * k) = brute_force_window(v, m, eab, cap);
        }
    g.rank = numerical_rank(g.matrix, 1e-8);
    return g;
}

/// Smallest m with Gamma_m of full rank k^2, if reached within the cap.
inline std::optional<int> injectivity_length(const MPSTensor& v, int m_cap = 12,
                                             std::size_t dim_cap = 65536) {
    const int full = v.k * v.k;
    for (int m = 1; m <= m_cap; ++m) {
        if (std::pow(double(v.d), m) > double(dim_cap)) return std::nullopt;
        if (gamma_map(v, m, dim_cap).rank == full) return m;
    }
    return std::nullopt;
}

/// Parent Hamiltonian H = sum_x tau_x(h) on the open interval [0, N-1], with
/// h the orthogonal projection onto the complement of range(Gamma_m).
class LocalHamiltonian {
public:
    LocalHamiltonian(const MPSTensor& v, int m, int n_sites, std::size_t ed_cap = 59049)
        : d_(v.d), m_(m), n_(n_sites) {
        if (n_sites < m) throw Error("parent_ham.bad_n", "need N >= m");
        double dim_est = std::pow(double(d_), n_);
        if (dim_est > double(ed_cap))
            throw Error("parent_ham.cap", "Hilbert dimension d^N exceeds the exact-diagonalization cap");
        dim_ = static_cast<Eigen::Index>(dim_est);
        GammaMap g = gamma_map(v, m);
        MatrixXc u = range_basis(g.matrix, 1e-8);
        const Eigen::Index dm = g.matrix.rows();
        h_ = MatrixXc::Identity(dm, dm) - u * u.adjoint();
        // Projector sanity: h^2 = h = h^*.
        if ((h_ * h_ - h_).norm() > 1e-10 * double(dm) || (h_ - h_.adjoint()).norm() > 1e-12 * double(dm))
            throw Error("parent_ham.projector", "window projector failed its idempotence check");
    }

    int d() const { return d_; }
    int m() const { return m_; }
    int n_sites() const { return n_; }
    Eigen::Index dim() const { return dim_; }
    int n_terms() const { return n_ - m_ + 1; }
    const MatrixXc& local_projector() const { return h_; }

    /// y = H x, applying each translated projector through reshapes.
    VectorXc apply(const VectorXc& x) const {
        VectorXc y = VectorXc::Zero(dim_);
        apply_add(x, y);
        return y;
    }

    void apply_add(const VectorXc& x, VectorXc& y) const {
        const Eigen::Index dm = h_.rows();
        for (int site = 0; site <= n_ - m_; ++site) {
            const Eigen::Index left = static_cast<Eigen::Index>(std::pow(double(d_), site));
            const Eigen::Index right = dim_ / (left * dm);
            for (Eigen::Index l = 0; l < left; ++l) {
                using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
                Eigen::Map<const RowMat> xin(x.data() + l * dm * right, dm, right);
                Eigen::Map<RowMat> yout(y.data() + l * dm * right, dm, right);
                yout.noalias() += h_ * xin;
            }
        }
    }

    /// Dense matrix (only for small N).
    MatrixXc dense_matrix(Eigen::Index dense_cap = 4096) const {
        if (dim_ > dense_cap) throw Error("parent_ham.cap", "dense matrix exceeds the dense cap");
        MatrixXc h_full = MatrixXc::Zero(dim_, dim_);
        const Eigen::Index dm = h_.rows();
        for (int site = 0; site <= n_ - m_; ++site) {
            const Eigen::Index left = static_cast<Eigen::Index>(std::pow(double(d_), site));
            const Eigen::Index right = dim_ / (left * dm);
            MatrixXc term = kron(kron(MatrixXc::Identity(left, left), h_), MatrixXc::Identity(right, right));
            h_full += term;
        }
        return h_full;
    }

private:
    int d_, m_, n_;
    Eigen::Index dim_ = 0;
    MatrixXc h_;
};

inline LocalHamiltonian local_hamiltonian(const MPSTensor& v, int m, int n_sites,
                                          std::size_t ed_cap = 59049) {
    return LocalHamiltonian(v, m, n_sites, ed_cap);
}

struct GroundData {
    Eigen::Index kernel_dim = 0;
    double gap = 0.0;
    bool dense = true;        // which eigensolver path produced the numbers
    double gap_residual = 0.0; // ||H q - gap q|| of the gap Ritz pair (iterative path)
};

namespace detail_ed {

/// Rayleigh-Ritz data of a block.
struct RitzData {
    VectorXr values;
    MatrixXc vectors;   // ritz vectors in the full space
    VectorXr residuals; // ||H q - theta q||
};

inline MatrixXc orthonormalize(const MatrixXc& q) {
    Eigen::HouseholderQR<MatrixXc> qr(q);
    MatrixXc thin = MatrixXc::Identity(q.rows(), q.cols());
    return qr.householderQ() * thin;
}

inline RitzData rayleigh_ritz(const LocalHamiltonian& h, const MatrixXc& q) {
    MatrixXc hq(q.rows(), q.cols());
    for (Eigen::Index c = 0; c < q.cols(); ++c) hq.col(c) = h.apply(q.col(c));
    MatrixXc small = q.adjoint() * hq;
    small = 0.5 * (small + small.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(small);
    RitzData out;
    out.values = es.eigenvalues();
    out.vectors = q * es.eigenvectors();
    MatrixXc hv = hq * es.eigenvectors();
    out.residuals = VectorXr(q.cols());
    for (Eigen::Index c = 0; c < q.cols(); ++c)
        out.residuals(c) = (hv.col(c) - out.values(c) * out.vectors.col(c)).norm();
    return out;
}

/// One block application of the degree-`deg` Chebyshev filter of H mapped
/// from [a, b] to [-1, 1]; amplifies eigenvalues below a.
inline MatrixXc chebyshev_filter(const LocalHamiltonian& h, MatrixXc q, double a, double b, int deg) {
    const double center = 0.5 * (b + a);
    const double half = 0.5 * (b - a);
    auto op = [&](const MatrixXc& x) {
        MatrixXc y(x.rows(), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) y.col(c) = h.apply(x.col(c));
        return MatrixXc((y - center * x) / half);
    };
    MatrixXc t_prev = q;
    MatrixXc t_cur = op(q);
    for (int k = 2; k <= deg; ++k) {
        MatrixXc t_next = 2.0 * op(t_cur) - t_prev;
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
        // Rescale to avoid overflow of the amplified block.
        double scale = t_cur.norm();
        if (scale > 1e100) {
            t_cur /= scale;
            t_prev /= scale;
        }
    }
    return t_cur;
}

} // namespace detail_ed

/// Kernel dimension (eigenvalues < 1e-10) and spectral gap of the parent
/// Hamiltonian. Small problems run a dense Hermitian eigensolver; larger ones
/// a Chebyshev-filtered block subspace iteration whose kernel/gap Ritz pairs
/// are required to converge to tight residuals.
inline GroundData ground_data(const LocalHamiltonian& h, Eigen::Index dense_threshold = 1024,
                              double kernel_tol = 1e-10) {
    GroundData out;
    if (h.dim() <= dense_threshold) {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(h.dense_matrix(dense_threshold));
        const auto& ev = es.eigenvalues();
        Eigen::Index kd = 0;
        while (kd < ev.size() && ev(kd) < kernel_tol) ++kd;
        out.kernel_dim = kd;
        out.gap = (kd < ev.size()) ? ev(kd) : 0.0;
        out.dense = true;
        return out;
    }

    out.dense = false;
    const double lambda_max = double(h.n_terms()); // sum of projectors
    Rng rng(0xED5EED);
    // Generous block: the expected kernel (k^2 for injective windows) plus
    // room for a degenerate first excited level.
    Eigen::Index block = std::min<Eigen::Index>(h.dim(), 12);

    for (int attempt = 0; attempt < 3; ++attempt, block = std::min<Eigen::Index>(h.dim(), block + 6)) {
        MatrixXc q(h.dim(), block);
        for (Eigen::Index i = 0; i < h.dim(); ++i)
            for (Eigen::Index j = 0; j < block; ++j) q(i, j) = Complex(rng.symmetric(), rng.symmetric());
        q = detail_ed::orthonormalize(q);

        // Warm-up power iterations on (c - H) to seed the filter window.
        for (int it = 0; it < 8; ++it) {
            MatrixXc y(q.rows(), q.cols());
            for (Eigen::Index c = 0; c < q.cols(); ++c)
                y.col(c) = (lambda_max + 1.0) * q.col(c) - h.apply(q.col(c));
            q = detail_ed::orthonormalize(y);
        }
        detail_ed::RitzData ritz = detail_ed::rayleigh_ritz(h, q);

        double prev_gap = -1.0;
        int stable = 0;
        for (int outer = 0; outer < 80; ++outer) {
            Eigen::Index kd = 0;
            while (kd < block && ritz.values(kd) < 1e-8) ++kd;
            // Filter cut: the first clear jump in the Ritz values above the
            // kernel-plus-gap candidates, so the wanted states are amplified
            // against everything else (degeneracies skipped over).
            double spread = std::max(1e-12, ritz.values(block - 1) - ritz.values(std::min(kd, block - 1)));
            double jump_tol = std::max(1e-8, 1e-3 * spread);
            Eigen::Index cut_at = block - 2;
            for (Eigen::Index j = std::min(kd + 1, block - 2); j < block - 1; ++j)
                if (ritz.values(j + 1) - ritz.values(j) > jump_tol) { cut_at = j; break; }
            double cut = 0.5 * (ritz.values(cut_at) + ritz.values(cut_at + 1));
            cut = std::max(cut, 1e-3);

            q = detail_ed::chebyshev_filter(h, ritz.vectors, cut, lambda_max + 0.5, 18);
            q = detail_ed::orthonormalize(q);
            ritz = detail_ed::rayleigh_ritz(h, q);

            kd = 0;
            while (kd < block && ritz.values(kd) < kernel_tol) ++kd;
            if (kd >= block) continue;
            double gap_now = ritz.values(kd);
            double gap_res = ritz.residuals(kd);
            bool kernel_tight = true;
            for (Eigen::Index c = 0; c < kd; ++c)
                if (ritz.residuals(c) > 1e-9 * lambda_max) kernel_tight = false;
            stable = (std::abs(gap_now - prev_gap) < 1e-9 * lambda_max) ? stable + 1 : 0;
            prev_gap = gap_now;
            bool gap_ok = gap_res < 1e-5 * lambda_max || (stable >= 3 && gap_res < 1e-4 * lambda_max);
            if (outer >= 4 && kernel_tight && gap_ok && gap_now > 100 * kernel_tol) {
                out.kernel_dim = kd;
                out.gap = gap_now;
                out.gap_residual = gap_res;
                return out;
            }
        }
    }
    throw Error("parent_ham.ed_failed", "iterative eigensolver failed to resolve the kernel and gap");
}

inline GroundData ground_data(const MPSTensor& v, int m, int n_sites, std::size_t ed_cap = 59049) {
    return ground_data(LocalHamiltonian(v, m, n_sites, ed_cap));
}

/// Check ker H_N = intersection of all shifted window spaces and also
/// = range(Gamma_N), by comparing orthogonal projections.
inline bool intersection_check(const MPSTensor& v, int m, int n_sites, double tol = 1e-8) {
    LocalHamiltonian lh(v, m, n_sites, 4096);
    MatrixXc hmat = lh.dense_matrix();
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(hmat);
    Eigen::Index kd = 0;
    while (kd < es.eigenvalues().size() && es.eigenvalues()(kd) < 1e-10) ++kd;
    MatrixXc kernel = es.eigenvectors().leftCols(kd);

    // Intersection of the shifted window subspaces, then a few alternating
    // projection passes to polish the basis back to roundoff accuracy.
    GammaMap g = gamma_map(v, m);
    MatrixXc u = range_basis(g.matrix, 1e-8);
    std::vector<MatrixXc> windows;
    for (int site = 0; site <= n_sites - m; ++site) {
        const Eigen::Index left = static_cast<Eigen::Index>(std::pow(double(v.d), site));
        const Eigen::Index right = lh.dim() / (left * g.matrix.rows());
        windows.push_back(kron(kron(MatrixXc::Identity(left, left), u), MatrixXc::Identity(right, right)));
    }
    MatrixXc inter = windows[0];
    for (std::size_t i = 1; i < windows.size(); ++i) inter = subspace_intersection(inter, windows[i]);
    for (int pass = 0; pass < 3 && inter.cols() > 0; ++pass) {
        for (const auto& w : windows) inter = w * (w.adjoint() * inter);
        inter = range_basis(inter, 1e-12);
    }
    if (!same_subspace(kernel, inter, tol)) return false;

    // FNW ground-space statement at finite size: when Gamma_N is full rank,
    // the kernel is exactly its range.
    double dim_est = std::pow(double(v.d), n_sites);
    if (dim_est <= 4096.0) {
        GammaMap gn = gamma_map(v, n_sites);
        MatrixXc gn_basis = range_basis(gn.matrix, 1e-8);
        if (static_cast<Eigen::Index>(gn_basis.cols()) == kd && !same_subspace(kernel, gn_basis, tol))
            return false;
    }
    return true;
}

struct GapScanRow {
    int n_sites = 0;
    Eigen::Index kernel_dim = 0;
    double gap = 0.0;
};

inline std::vector<GapScanRow> gap_scan(const MPSTensor& v, int m, int n_lo, int n_hi,
                                        std::size_t ed_cap = 59049) {
    std::vector<GapScanRow> rows;
    for (int n = n_lo; n <= n_hi; ++n) {
        GroundData gd = ground_data(v, m, n, ed_cap);
        rows.push_back({n, gd.kernel_dim, gd.gap});
    }
    return rows;
}

} // namespace sptk
