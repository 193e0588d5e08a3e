#include "stsvp/kernels.hpp"
#include "stsvp/structured_operator.hpp"

#include "oracle.hpp"

#include <doctest.h>

using namespace stsvp;

namespace {

std::vector<Sample> random_samples(Index rows, Index cols, double density,
                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Sample> out;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (rng.next_double() < density)
                out.push_back({static_cast<std::int32_t>(i),
                               static_cast<std::int32_t>(j), rng.next_normal()});
    return out;
}

} // namespace

TEST_CASE("csr matvec agrees with dense and with the serial reference") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto samples = random_samples(37, 23, 0.2, seed);
        auto csr = kernels::build_csr(37, 23, samples, false);
        auto csr_t = kernels::build_csr(37, 23, samples, true);
        DenseMatrix dense = DenseMatrix::Zero(37, 23);
        for (const Sample& e : samples) dense(e.row, e.col) = e.value;
        DenseMatrix x = oracle::gaussian(23, 4, seed + 100);
        DenseMatrix xt = oracle::gaussian(37, 4, seed + 200);

        DenseMatrix y_par, y_ser, yt_par, yt_ser;
        kernels::csr_apply(csr, x, y_par);
        kernels::csr_apply_serial(csr, x, y_ser);
        kernels::csr_apply(csr_t, xt, yt_par);
        kernels::csr_apply_serial(csr_t, xt, yt_ser);

        CHECK((y_par - y_ser).cwiseAbs().maxCoeff() == 0.0);  // bitwise
        CHECK((yt_par - yt_ser).cwiseAbs().maxCoeff() == 0.0);
        CHECK((y_par - dense * x).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((yt_par - dense.transpose() * xt).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("lowrank_at_samples matches dense evaluation, serial == parallel") {
    LowRankFactorization f;
    f.left = oracle::orthonormal(30, 3, 11);
    f.right = oracle::orthonormal(20, 3, 12);
    f.values = Vector(3);
    f.values << 2.0, 1.0, 0.5;
    DenseMatrix dense = f.densify();
    auto samples = random_samples(30, 20, 0.3, 5);
    std::vector<double> par, ser;
    kernels::lowrank_at_samples(f, samples, par);
    kernels::lowrank_at_samples_serial(f, samples, ser);
    REQUIRE(par.size() == samples.size());
    for (std::size_t t = 0; t < samples.size(); ++t) {
        CHECK(par[t] == ser[t]);
        CHECK(par[t] == doctest::Approx(dense(samples[t].row, samples[t].col))
                            .epsilon(1e-13));
    }
}

TEST_CASE("sum_squares: chunked parallel equals chunked serial bitwise") {
    Rng rng(7);
    std::vector<double> v(20000);
    for (double& x : v) x = rng.next_normal();
    CHECK(kernels::sum_squares(v) == kernels::sum_squares_serial(v));
    std::vector<double> small(v.begin(), v.begin() + 100);
    CHECK(kernels::sum_squares(small) == kernels::sum_squares_serial(small));
}

TEST_CASE("structured operator matvec equals densified sum on probe vectors") {
    LowRankFactorization f;
    f.left = oracle::orthonormal(25, 2, 21);
    f.right = oracle::orthonormal(18, 2, 22);
    f.values = Vector(2);
    f.values << 1.5, 0.25;
    auto sparse = random_samples(25, 18, 0.15, 23);
    StructuredOperator op(f, sparse, 25, 18);
    DenseMatrix dense = op.densify();
    for (std::uint64_t s : {31ULL, 32ULL, 33ULL}) {
        DenseMatrix x = oracle::gaussian(18, 1, s);
        DenseMatrix xt = oracle::gaussian(25, 1, s + 9);
        double rel = (op.apply(x) - dense * x).norm() / (dense * x).norm();
        double rel_t = (op.apply_transpose(xt) - dense.transpose() * xt).norm() /
                       (dense.transpose() * xt).norm();
        CHECK(rel < 1e-12);
        CHECK(rel_t < 1e-12);
    }
}
