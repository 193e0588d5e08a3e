#include "stsvp/svd.hpp"

#include "oracle.hpp"

#include <doctest.h>

using namespace stsvp;

TEST_CASE("truncated_svd on diag(3,2,1), k=2") {
    DenseMatrix d = ((Vector(3) << 3, 2, 1).finished()).asDiagonal();
    LowRankFactorization f = truncated_svd(d, 2, 1e-10);
    REQUIRE(f.rank() == 2);
    CHECK(f.values(0) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.values(1) == doctest::Approx(2.0).epsilon(1e-10));
    // vectors are the first two basis vectors up to sign
    CHECK(std::abs(f.left(0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(f.left(1, 1)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(f.right(0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncated_svd of a rank-1 matrix: sigma_1 = ||u|| ||v||") {
    Rng rng(42);
    Vector u(12), v(9);
    for (Index i = 0; i < 12; ++i) u(i) = rng.next_normal();
    for (Index i = 0; i < 9; ++i) v(i) = rng.next_normal();
    DenseMatrix a = u * v.transpose();
    LowRankFactorization f = truncated_svd(a, 1, 1e-10);
    CHECK(f.values(0) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-10));
}

TEST_CASE("truncated_svd matches the dense oracle on 100 seeded 50x50 matrices") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        DenseMatrix a = oracle::gaussian(50, 50, 1000 + seed);
        LowRankFactorization f = truncated_svd(a, 5, 1e-10);
        oracle::DenseSvd ref = oracle::full_svd(a);
        for (Index i = 0; i < 5; ++i)
            CHECK(std::abs(f.values(i) - ref.s(i)) < 1e-8 * ref.s(0));
        CHECK(f.orthonormality_defect() < 1e-10);
    }
}

TEST_CASE("truncated_svd: rank-deficient input pads with exact zeros") {
    DenseMatrix a = oracle::random_low_rank(20, 15, (Vector(2) << 2, 1).finished(), 7);
    LowRankFactorization f = truncated_svd(a, 4, 1e-10);
    CHECK(f.values(2) == 0.0);
    CHECK(f.values(3) == 0.0);
    CHECK(f.orthonormality_defect() < 1e-10);  // completion stays orthonormal
    CHECK((f.densify() - a).norm() < 1e-9);
}

TEST_CASE("truncated_svd argument errors and convergence failure") {
    DenseMatrix a = oracle::gaussian(10, 8, 3);
    CHECK_THROWS_AS((void)truncated_svd(a, 0, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS((void)truncated_svd(a, 9, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS((void)truncated_svd(a, 2, -1.0), std::invalid_argument);
    // An impossible budget must fail loudly and carry the iteration count.
    SvdOptions opts;
    opts.cap_multiplier = 1;
    try {
        (void)truncated_svd_full(as_block_operator(a), 2, 1e-14, opts);
        FAIL("expected SvdConvergenceError");
    } catch (const SvdConvergenceError& e) {
        CHECK(e.matvecs >= 2);
        CHECK(e.iterations >= 1);
    }
}

TEST_CASE("rank_k_project: Eckart-Young on diagonal and idempotence") {
    DenseMatrix d = ((Vector(3) << 3, 2, 1).finished()).asDiagonal();
    LowRankFactorization p = rank_k_project(d, 2);
    DenseMatrix expect = ((Vector(3) << 3, 2, 0).finished()).asDiagonal();
    CHECK((p.densify() - expect).norm() < 1e-10);

    DenseMatrix a = oracle::random_low_rank(18, 14, (Vector(3) << 3, 1, 0.2).finished(), 9);
    LowRankFactorization p3 = rank_k_project(a, 3);
    CHECK((p3.densify() - a).norm() < 1e-10);  // already rank <= k
    LowRankFactorization again = rank_k_project(p3.densify(), 3);
    CHECK((again.densify() - p3.densify()).norm() < 1e-10);
}

TEST_CASE("rank_k_project tail error matches the oracle tail formula") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 3ULL, 4ULL}) {
        DenseMatrix a = oracle::gaussian(30, 30, 500 + seed);
        LowRankFactorization p = rank_k_project(a, 3);
        double err = (a - p.densify()).norm();
        double expect = oracle::tail_frobenius(oracle::full_svd(a), 3);
        CHECK(err == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("Eckart-Young property: P_k beats random rank-k competitors") {
    Rng pick(99);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        DenseMatrix a = oracle::gaussian(10, 8, 2000 + seed);
        const Index k = 1 + static_cast<Index>(pick.next_below(4));
        LowRankFactorization p = rank_k_project(a, k);
        const double best = (a - p.densify()).norm();
        for (int b = 0; b < 50; ++b) {
            DenseMatrix left = oracle::gaussian(10, k, seed * 100 + b);
            DenseMatrix right = oracle::gaussian(8, k, seed * 100 + b + 50);
            // competitor scaled to the oracle's magnitude
            DenseMatrix cand = left * right.transpose();
            cand *= a.norm() / cand.norm();
            CHECK(best <= (a - cand).norm() + 1e-12);
        }
    }
}

TEST_CASE("spectral_norm examples") {
    DenseMatrix d = ((Vector(2) << 5, 1).finished()).asDiagonal();
    CHECK(spectral_norm(d, 1e-10) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(spectral_norm(DenseMatrix::Zero(6, 4), 1e-10) == 0.0);
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        DenseMatrix a = oracle::gaussian(40, 40, seed);
        double expect = oracle::full_svd(a).s(0);
        CHECK(spectral_norm(a, 1e-10) == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("incoherence: spread, spiked, and brute-force comparison") {
    LowRankFactorization f;
    const Index n = 4;
    f.left = DenseMatrix::Constant(n, 1, 0.5);  // (1/sqrt(4)) * ones
    f.right = f.left;
    f.values = Vector::Constant(1, 3.0);
    CHECK(incoherence(f) == doctest::Approx(1.0).epsilon(1e-12));

    LowRankFactorization spike;
    spike.left = DenseMatrix::Zero(n, 1);
    spike.left(0, 0) = 1.0;
    spike.right = DenseMatrix::Constant(n, 1, 0.5);
    spike.values = Vector::Constant(1, 1.0);
    CHECK(incoherence(spike) == doctest::Approx(2.0).epsilon(1e-12));

    LowRankFactorization g;
    g.left = oracle::orthonormal(100, 5, 77);
    g.right = oracle::orthonormal(100, 5, 78);
    g.values = (Vector(5) << 5, 4, 3, 2, 1).finished();
    double worst_l = 0.0, worst_r = 0.0;
    for (Index i = 0; i < 100; ++i) {
        worst_l = std::max(worst_l, g.left.row(i).norm());
        worst_r = std::max(worst_r, g.right.row(i).norm());
    }
    double expect = std::sqrt(100.0 / 5.0) * std::max(worst_l, worst_r);
    CHECK(incoherence(g) == expect);  // row-norm maximization, exact

    // scale invariance: mu depends only on the singular vectors
    LowRankFactorization scaled = g;
    scaled.values *= 17.5;
    CHECK(incoherence(scaled) == incoherence(g));

    LowRankFactorization zero = LowRankFactorization::zero(5, 5);
    CHECK_THROWS_AS((void)incoherence(zero), std::invalid_argument);
}

TEST_CASE("incoherence stays within its theoretical range") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        LowRankFactorization f;
        f.left = oracle::orthonormal(60, 3, 300 + seed);
        f.right = oracle::orthonormal(40, 3, 400 + seed);
        f.values = (Vector(3) << 2, 1, 0.5).finished();
        double mu = incoherence(f);
        CHECK(mu >= 1.0 - 1e-12);
        CHECK(mu <= std::sqrt(40.0 / 3.0) + 1e-12);
    }
}

TEST_CASE("symmetric_dilation: examples and spectrum property") {
    DenseMatrix one(1, 1);
    one << 1.0;
    DenseMatrix d = symmetric_dilation(one);
    CHECK(d.rows() == 2);
    CHECK(d(0, 1) == 1.0);
    CHECK(d(1, 0) == 1.0);
    CHECK(d(0, 0) == 0.0);
    Vector ev = oracle::symmetric_eigenvalues(d);
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(1.0));

    CHECK(symmetric_dilation(DenseMatrix::Zero(2, 3)).norm() == 0.0);
    CHECK(symmetric_dilation(DenseMatrix::Zero(2, 3)).rows() == 5);

    for (std::uint64_t seed : {5ULL, 6ULL}) {
        DenseMatrix m = oracle::gaussian(4, 6, seed);
        Vector ew = oracle::symmetric_eigenvalues(symmetric_dilation(m))
                        .cwiseAbs();
        std::sort(ew.data(), ew.data() + ew.size(), std::greater<double>());
        Vector sv = oracle::full_svd(m).s;  // size 4
        for (Index i = 0; i < sv.size(); ++i) {
            CHECK(ew(2 * i) == doctest::Approx(sv(i)).epsilon(1e-10));
            CHECK(ew(2 * i + 1) == doctest::Approx(sv(i)).epsilon(1e-10));
        }
        for (Index i = 2 * sv.size(); i < ew.size(); ++i)
            CHECK(ew(i) < 1e-10);
    }
}

TEST_CASE("truncated_svd handles repeated singular values at solver scale") {
    // kappa = r spectra put a multiplicity-(r-1) cluster below sigma_1.
    Vector spec(5);
    spec << 1.0, 0.2, 0.2, 0.2, 0.2;
    DenseMatrix a = oracle::random_low_rank(80, 80, spec, 31);
    LowRankFactorization f = truncated_svd(a, 5, 1e-10);
    for (Index i = 0; i < 5; ++i)
        CHECK(f.values(i) == doctest::Approx(spec(i)).epsilon(1e-8));
    CHECK((f.densify() - a).norm() < 1e-8);
}
