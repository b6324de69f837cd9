#include <catch2/catch.hpp>

#include "sptk/models.hpp"
#include "sptk/mps.hpp"
#include "sptk/representation.hpp"
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

// Window marginal of the translation-invariant state through the brute-force
// Gamma contraction: rho-weighted average over matrix-unit boundaries.
Complex window_expectation_oracle(const CanonicalMPS& c, const MatrixXc& op, int n_sites) {
    const int k = c.k();
    Complex total = 0;
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            MatrixXc eab = MatrixXc::Zero(k, k);
            eab(a, b) = 1;
            VectorXc psi = brute_force_window(c.tensor, n_sites, eab).conjugate();
            total += c.rho(a) * (psi.adjoint() * op * psi)(0, 0);
        }
    }
    return total;
}

MatrixXc embed_site_op(const MatrixXc& a, int site, int n_sites) {
    const int d = static_cast<int>(a.rows());
    MatrixXc out = MatrixXc::Identity(1, 1);
    for (int i = 0; i < n_sites; ++i)
        out = kron(out, i == site ? a : MatrixXc::Identity(d, d));
    return out;
}

} // namespace

TEST_CASE("transfer operator") {
    SECTION("bond dimension 1 gives the scalar sum of squares") {
        auto t = transfer_op(product_tensor(3));
        REQUIRE(t.matrix.rows() == 1);
        CHECK(std::abs(t.matrix(0, 0) - Complex(1, 0)) < 1e-14);
    }
    SECTION("GHZ transfer matrix is diag(1,0,0,1)") {
        auto t = transfer_op(ghz_tensor());
        MatrixXc expect = MatrixXc::Zero(4, 4);
        expect(0, 0) = 1;
        expect(3, 3) = 1;
        CHECK((t.matrix - expect).norm() < 1e-14);
    }
    SECTION("AKLT eigenvalues {1, -1/3, -1/3, -1/3}") {
        for (const auto& v : {aklt_tensor(), aklt_pauli_tensor()}) {
            auto eigs = transfer_op(v).eigenvalues();
            REQUIRE(eigs.size() == 4);
            CHECK(std::abs(eigs[0] - Complex(1, 0)) < 1e-10);
            for (int i = 1; i < 4; ++i) CHECK(std::abs(eigs[static_cast<std::size_t>(i)] - Complex(-1.0 / 3.0, 0)) < 1e-10);
        }
    }
}

TEST_CASE("normalize") {
    SECTION("AKLT is already normalized") {
        auto v = aklt_tensor();
        auto n = normalize(v);
        for (int mu = 0; mu < 3; ++mu) CHECK((n[mu] - v[mu]).norm() < 1e-12);
    }
    SECTION("scaling by 3 is undone") {
        auto v = aklt_tensor();
        std::vector<MatrixXc> scaled;
        for (const auto& m : v.mats) scaled.push_back(3.0 * m);
        auto n = normalize(MPSTensor(scaled));
        for (int mu = 0; mu < 3; ++mu) CHECK((n[mu] - v[mu]).norm() < 1e-12);
    }
    SECTION("random tensor lands at radius 1, cross-checked by power iteration") {
        Rng rng(41);
        auto v = normalize(random_tensor(2, 2, rng));
        CHECK(std::abs(spectral_radius(v) - 1.0) < 1e-10);
        MatrixXc t = transfer_matrix(v);
        VectorXc x = VectorXc::Ones(4);
        double r = 0;
        for (int it = 0; it < 3000; ++it) {
            x = t * x;
            r = x.norm();
            x /= r;
        }
        CHECK(std::abs(r - 1.0) < 1e-6);
    }
    SECTION("zero tensor is rejected") {
        MatrixXc z = MatrixXc::Zero(2, 2);
        CHECK_THROWS_AS(normalize(MPSTensor({z, z})), Error);
    }
}

TEST_CASE("primitivity triptych") {
    SECTION("product tensor: primitive with span length 1") {
        auto rep = is_primitive(product_tensor(2));
        CHECK(rep.primitive);
        CHECK(rep.criteria_agree);
        REQUIRE(rep.span_length.has_value());
        CHECK(*rep.span_length == 1);
    }
    SECTION("GHZ: not primitive, degenerate peripheral spectrum, span stuck at 2") {
        auto rep = is_primitive(ghz_tensor());
        CHECK_FALSE(rep.primitive);
        CHECK(rep.criteria_agree);
        CHECK(rep.peripheral_eigenvalues.size() == 2);
        CHECK(rep.span_stabilized_short);
        CHECK_FALSE(rep.span_length.has_value());
    }
    SECTION("AKLT: primitive with span length 2") {
        auto rep = is_primitive(aklt_tensor());
        CHECK(rep.primitive);
        CHECK(rep.criteria_agree);
        REQUIRE(rep.span_length.has_value());
        CHECK(*rep.span_length == 2);
    }
    SECTION("scale covariance after normalize") {
        Rng rng(9);
        for (int trial = 0; trial < 3; ++trial) {
            auto v = random_tensor(2, 2, rng);
            std::vector<MatrixXc> scaled;
            for (const auto& m : v.mats) scaled.push_back(0.37 * m);
            auto r1 = is_primitive(normalize(v));
            auto r2 = is_primitive(normalize(MPSTensor(scaled)));
            CHECK(r1.primitive == r2.primitive);
        }
    }
}

TEST_CASE("canonical form") {
    SECTION("AKLT: maximally mixed fixed point") {
        auto c = canonical_form(aklt_tensor());
        REQUIRE(c.k() == 2);
        CHECK(std::abs(c.rho(0) - 0.5) < 1e-10);
        CHECK(std::abs(c.rho(1) - 0.5) < 1e-10);
    }
    SECTION("product tensor: rho = 1") {
        auto c = canonical_form(product_tensor(3));
        CHECK(std::abs(c.rho(0) - 1.0) < 1e-12);
    }
    SECTION("random primitive tensor: fixed point residuals") {
        Rng rng(33);
        auto c = canonical_form(random_tensor(2, 2, rng));
        MatrixXc ti = apply_transfer(c.tensor, MatrixXc::Identity(2, 2));
        CHECK((ti - MatrixXc::Identity(2, 2)).norm() < 1e-10);
        MatrixXc back = MatrixXc::Zero(2, 2);
        for (int mu = 0; mu < c.d(); ++mu) back += c.tensor[mu].adjoint() * c.rho_matrix() * c.tensor[mu];
        CHECK((back - c.rho_matrix()).norm() < 1e-10);
        CHECK(c.rho(0) >= c.rho(1));
    }
    SECTION("non-primitive input is rejected") {
        CHECK_THROWS_AS(canonical_form(ghz_tensor()), Error);
    }
}

TEST_CASE("expectation values") {
    auto c = canonical_form(aklt_tensor());
    auto spins = spin_operators(3);
    const MatrixXc id3 = MatrixXc::Identity(3, 3);

    SECTION("identity string gives 1") {
        CHECK(std::abs(expectation(c, {id3, id3, id3}) - Complex(1, 0)) < 1e-12);
    }
    SECTION("single-site S3 vanishes, cross-checked on an N=6 window") {
        CHECK(std::abs(expectation(c, {spins[2]})) < 1e-12);
        Complex oracle = window_expectation_oracle(c, embed_site_op(spins[2], 2, 6), 6);
        CHECK(std::abs(oracle) < 1e-10);
    }
    SECTION("adjacent S3 S3 equals -4/9, cross-checked on an N=6 window") {
        Complex direct = expectation(c, {spins[2], spins[2]});
        CHECK(std::abs(direct - Complex(-4.0 / 9.0, 0)) < 1e-12);
        MatrixXc pair = embed_site_op(spins[2], 2, 6) * embed_site_op(spins[2], 3, 6);
        Complex oracle = window_expectation_oracle(c, pair, 6);
        CHECK(std::abs(oracle - direct) < 1e-10);
    }
    SECTION("linearity in each slot") {
        Complex lhs = expectation(c, {spins[0] + 2.0 * spins[2], spins[1]});
        Complex rhs = expectation(c, {spins[0], spins[1]}) + 2.0 * expectation(c, {spins[2], spins[1]});
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("correlation length") {
    SECTION("product state: 0") {
        CHECK(correlation_length(canonical_form(product_tensor(2))) == 0.0);
    }
    SECTION("AKLT: 1/ln 3") {
        double xi = correlation_length(canonical_form(aklt_tensor()));
        CHECK(std::abs(xi - 1.0 / std::log(3.0)) < 1e-8);
    }
    SECTION("AKLT connected correlations decay as (1/3)^r and fit the rate") {
        auto c = canonical_form(aklt_tensor());
        auto spins = spin_operators(3);
        const MatrixXc id3 = MatrixXc::Identity(3, 3);
        std::vector<double> log_abs;
        for (int r = 1; r <= 6; ++r) {
            std::vector<MatrixXc> ops;
            ops.push_back(spins[2]);
            for (int i = 1; i < r; ++i) ops.push_back(id3);
            ops.push_back(spins[2]);
            Complex corr = expectation(c, ops);
            double expected = (4.0 / 9.0) * std::pow(1.0 / 3.0, r - 1);
            CHECK(std::abs(std::abs(corr) - expected) < 1e-10);
            log_abs.push_back(std::log(std::abs(corr)));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int r = 2; r <= 6; ++r) {
            double x = r, y = log_abs[static_cast<std::size_t>(r - 1)];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(std::abs(-slope - std::log(3.0)) < 0.02 * std::log(3.0));
    }
}

TEST_CASE("brute force window") {
    SECTION("bond dimension 1 gives the conjugated product vector") {
        auto v = product_tensor(2);
        MatrixXc one = MatrixXc::Identity(1, 1);
        VectorXc psi = brute_force_window(v, 3, one);
        const double a = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < 8; ++i) CHECK(std::abs(psi(i) - Complex(a * a * a, 0)) < 1e-14);
    }
    SECTION("N=1 with identity boundary lists Tr v_mu^*") {
        auto v = aklt_tensor();
        VectorXc psi = brute_force_window(v, 1, MatrixXc::Identity(2, 2));
        for (int mu = 0; mu < 3; ++mu)
            CHECK(std::abs(psi(mu) - std::conj(v[mu].trace())) < 1e-14);
    }
    SECTION("AKLT N=4 two-point ratios agree with expectation()") {
        auto c = canonical_form(aklt_tensor());
        auto spins = spin_operators(3);
        MatrixXc op = embed_site_op(spins[2], 1, 4) * embed_site_op(spins[2], 2, 4);
        Complex oracle = window_expectation_oracle(c, op, 4);
        Complex direct = expectation(c, {spins[2], spins[2]});
        CHECK(std::abs(oracle - direct) < 1e-8);
    }
    SECTION("cap is enforced") {
        CHECK_THROWS_AS(brute_force_window(product_tensor(2), 30, MatrixXc::Identity(1, 1)), Error);
    }
}

TEST_CASE("matrix-unit strings agree with the window oracle") {
    auto c = canonical_form(aklt_tensor());
    Rng rng(73);
    for (int trial = 0; trial < 6; ++trial) {
        int len = 2 + static_cast<int>(rng.below(2)); // strings of 2 or 3 units
        int window = 5;
        int start = 1;
        std::vector<MatrixXc> ops;
        MatrixXc big = MatrixXc::Identity(1, 1);
        for (int site = 0; site < window; ++site) {
            MatrixXc op = MatrixXc::Identity(3, 3);
            if (site >= start && site < start + len) {
                op = MatrixXc::Zero(3, 3);
                op(static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3))) = 1;
                ops.push_back(op);
            }
            big = kron(big, op);
        }
        Complex direct = expectation(c, ops);
        Complex oracle = window_expectation_oracle(c, big, window);
        CHECK(std::abs(direct - oracle) < 1e-8);
    }
}

TEST_CASE("gauge invariance of expectation values") {
    Rng rng(55);
    auto v = aklt_tensor();
    auto c0 = canonical_form(v);
    auto spins = spin_operators(3);
    for (int trial = 0; trial < 3; ++trial) {
        MatrixXc w(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) w(i, j) = Complex(rng.symmetric(), rng.symmetric());
        w += 3.0 * MatrixXc::Identity(2, 2);
        MatrixXc winv = w.inverse();
        std::vector<MatrixXc> gauged;
        for (const auto& m : v.mats) gauged.push_back(w * m * winv);
        auto c1 = canonical_form(MPSTensor(gauged));
        for (const auto& op : {spins[0], spins[2]}) {
            Complex a = expectation(c0, {op, op});
            Complex b = expectation(c1, {op, op});
            CHECK(std::abs(a - b) < 1e-8);
        }
    }
}

TEST_CASE("pauli and spherical AKLT share canonical bond data") {
    auto c1 = canonical_form(aklt_tensor());
    auto c2 = canonical_form(aklt_pauli_tensor());
    CHECK(std::abs(c1.rho(0) - c2.rho(0)) < 1e-10);
    CHECK(std::abs(correlation_length(c1) - correlation_length(c2)) < 1e-10);
}
