#include <catch2/catch.hpp>

#include "sptk/models.hpp"
#include "sptk/parent_ham.hpp"
#include "sptk/rng.hpp"

using namespace sptk;

namespace {

MPSTensor random_tensor(int d, int k, Rng& rng) {
    std::vector<MatrixXc> mats;
    for (int mu = 0; mu < d; ++mu) {
        MatrixXc m(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m(i, j) = Complex(rng.symmetric(), rng.symmetric());
        mats.push_back(m);
    }
    return MPSTensor(std::move(mats), "random");
}

} // namespace

TEST_CASE("gamma map ranks") {
    SECTION("bond dimension 1 is always rank 1") {
        for (int m = 1; m <= 4; ++m) CHECK(gamma_map(product_tensor(2), m).rank == 1);
    }
    SECTION("AKLT: rank 3 at m=1, rank 4 at m=2") {
        CHECK(gamma_map(aklt_tensor(), 1).rank == 3);
        CHECK(gamma_map(aklt_tensor(), 2).rank == 4);
    }
    SECTION("GHZ: rank stuck at 2") {
        for (int m = 1; m <= 5; ++m) CHECK(gamma_map(ghz_tensor(), m).rank == 2);
    }
    SECTION("columns match the defining trace formula") {
        auto v = aklt_tensor();
        auto g = gamma_map(v, 2);
        MatrixXc e01 = MatrixXc::Zero(2, 2);
        e01(0, 1) = 1;
        Complex direct = (e01 * (v[0] * v[1]).adjoint()).trace();
        CHECK(std::abs(g.matrix(0 * 3 + 1, 0 + 1 * 2) - direct) < 1e-14);
    }
}

TEST_CASE("injectivity length") {
    CHECK(injectivity_length(product_tensor(2)) == 1);
    CHECK(injectivity_length(aklt_tensor()) == 2);
    CHECK_FALSE(injectivity_length(ghz_tensor()).has_value());
}

TEST_CASE("local hamiltonian structure") {
    SECTION("product tensor, m=1, N=3: commuting projectors, spectrum 0..3") {
        LocalHamiltonian lh(product_tensor(2), 1, 3);
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(lh.dense_matrix());
        std::vector<double> distinct;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            double e = es.eigenvalues()(i);
            if (distinct.empty() || std::abs(distinct.back() - e) > 1e-9) distinct.push_back(e);
        }
        REQUIRE(distinct.size() == 4);
        for (int j = 0; j < 4; ++j) CHECK(std::abs(distinct[static_cast<std::size_t>(j)] - j) < 1e-10);
    }
    SECTION("dense matrix agrees with matrix-free application") {
        LocalHamiltonian lh(aklt_tensor(), 2, 4);
        MatrixXc hm = lh.dense_matrix();
        Rng rng(77);
        VectorXc x(lh.dim());
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(rng.symmetric(), rng.symmetric());
        CHECK((lh.apply(x) - hm * x).norm() < 1e-11 * x.norm());
    }
    SECTION("H is positive semidefinite and frustration free on the window") {
        auto v = aklt_tensor();
        LocalHamiltonian lh(v, 2, 4);
        auto g = gamma_map(v, 2);
        CHECK((lh.local_projector() * g.matrix).norm() < 1e-10);
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(lh.dense_matrix());
        CHECK(es.eigenvalues()(0) > -1e-10);
    }
}

TEST_CASE("ground data") {
    SECTION("product m=1: gap exactly 1") {
        for (int n = 2; n <= 8; ++n) {
            GroundData gd = ground_data(product_tensor(2), 1, n);
            CHECK(gd.kernel_dim == 1);
            CHECK(std::abs(gd.gap - 1.0) < 1e-9);
        }
    }
    SECTION("AKLT m=2, N=4: kernel dimension 4") {
        GroundData gd = ground_data(aklt_tensor(), 2, 4);
        CHECK(gd.kernel_dim == 4);
        CHECK(gd.gap > 0.1);
    }
    SECTION("GHZ m=2, N=5: kernel dimension 2") {
        GroundData gd = ground_data(ghz_tensor(), 2, 5);
        CHECK(gd.kernel_dim == 2);
        CHECK(gd.gap > 0.1);
    }
    SECTION("iterative path agrees with dense on N=6") {
        LocalHamiltonian lh(aklt_tensor(), 2, 6);
        GroundData dense = ground_data(lh, /*dense_threshold=*/1024);
        GroundData iter = ground_data(lh, /*dense_threshold=*/16);
        CHECK(dense.dense);
        CHECK_FALSE(iter.dense);
        CHECK(dense.kernel_dim == iter.kernel_dim);
        CHECK(std::abs(dense.gap - iter.gap) < 2e-5);
    }
}

TEST_CASE("gap scan") {
    SECTION("AKLT N=3..8: constant kernel 4, gap above 0.1 and non-increasing") {
        auto rows = gap_scan(aklt_tensor(), 2, 3, 8);
        REQUIRE(rows.size() == 6);
        double prev = 1e9;
        for (const auto& r : rows) {
            CHECK(r.kernel_dim == 4);
            CHECK(r.gap > 0.1);
            CHECK(r.gap <= prev + 1e-9);
            prev = r.gap;
        }
    }
    SECTION("random primitive tensor at m = injectivity_length + 1: kernel k^2") {
        Rng rng(101);
        auto v = normalize(random_tensor(2, 2, rng));
        REQUIRE(is_primitive(v).primitive);
        auto len = injectivity_length(v);
        REQUIRE(len.has_value());
        for (int n = *len + 1; n <= *len + 3; ++n) {
            GroundData gd = ground_data(v, *len + 1, n);
            CHECK(gd.kernel_dim == 4);
        }
    }
}

TEST_CASE("intersection property") {
    CHECK(intersection_check(aklt_tensor(), 2, 5));
    CHECK(intersection_check(product_tensor(2), 1, 4));
    CHECK(intersection_check(ghz_tensor(), 2, 5));
}

TEST_CASE("kernel equals the range of the N-site gamma map") {
    auto v = aklt_tensor();
    for (int n = 4; n <= 6; ++n) {
        LocalHamiltonian lh(v, 2, n);
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(lh.dense_matrix());
        Eigen::Index kd = 0;
        while (kd < es.eigenvalues().size() && es.eigenvalues()(kd) < 1e-10) ++kd;
        MatrixXc kernel = es.eigenvectors().leftCols(kd);
        MatrixXc gn = range_basis(gamma_map(v, n).matrix, 1e-8);
        REQUIRE(gn.cols() == kd);
        CHECK(same_subspace(kernel, gn, 1e-6));
    }
}

TEST_CASE("gap is gauge invariant") {
    Rng rng(202);
    auto v = aklt_tensor();
    GroundData base = ground_data(v, 2, 4);
    for (int trial = 0; trial < 2; ++trial) {
        MatrixXc w(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) w(i, j) = Complex(rng.symmetric(), rng.symmetric());
        w += 2.5 * MatrixXc::Identity(2, 2);
        MatrixXc winv = w.inverse();
        std::vector<MatrixXc> gauged;
        for (const auto& m : v.mats) gauged.push_back(w * m * winv);
        GroundData gd = ground_data(MPSTensor(gauged), 2, 4);
        CHECK(gd.kernel_dim == base.kernel_dim);
        CHECK(std::abs(gd.gap - base.gap) < 1e-8);
    }
}

TEST_CASE("caps are enforced") {
    CHECK_THROWS_AS(LocalHamiltonian(aklt_tensor(), 2, 15), Error);
    CHECK_THROWS_AS(gamma_map(product_tensor(4), 12), Error);
}
