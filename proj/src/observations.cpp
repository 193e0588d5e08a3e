#include "stsvp/observations.hpp"

#include "stsvp/random.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace stsvp {

ObservationSet bernoulli_sample(const DenseMatrix& m, double p,
                                std::uint64_t seed) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("bernoulli_sample: p must be in [0, 1]");
    ObservationSet out;
    out.rows = m.rows();
    out.cols = m.cols();
    out.sampling_prob = p;
    Rng rng(seed);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (rng.next_double() < p)
                out.samples.push_back({static_cast<std::int32_t>(i),
                                       static_cast<std::int32_t>(j), m(i, j)});
    return out;
}

ObservationSet project_onto(const DenseMatrix& a, const ObservationSet& omega) {
    if (a.rows() != omega.rows || a.cols() != omega.cols)
        throw std::invalid_argument("project_onto: dimension mismatch");
    ObservationSet out = omega;
    for (Sample& e : out.samples) e.value = a(e.row, e.col);
    return out;
}

std::vector<ObservationSet> partition(const ObservationSet& omega,
                                      std::size_t parts, std::uint64_t seed) {
    if (parts < 1) throw std::invalid_argument("partition: parts must be >= 1");
    std::vector<ObservationSet> out(parts);
    const double sub_prob =
        omega.prob_known() ? omega.sampling_prob / static_cast<double>(parts)
                           : ObservationSet::kUnknownProb;
    for (ObservationSet& part : out) {
        part.rows = omega.rows;
        part.cols = omega.cols;
        part.sampling_prob = sub_prob;
    }
    Rng rng(seed);
    for (const Sample& e : omega.samples)
        out[rng.next_below(parts)].samples.push_back(e);
    return out;
}

namespace {

StructuredOperator residual_operator(const LowRankFactorization& x,
                                     const ObservationSet& omega,
                                     ResidualScaling scaling) {
    if (omega.samples.empty())
        throw std::invalid_argument("scaled_residual: empty observation set");
    if (x.rows() != omega.rows || x.cols() != omega.cols)
        throw std::invalid_argument("scaled_residual: dimension mismatch");
    double scale;
    if (scaling == ResidualScaling::SampleCount) {
        scale = static_cast<double>(omega.rows) *
                static_cast<double>(omega.cols) /
                static_cast<double>(omega.samples.size());
    } else {
        if (!omega.prob_known() || omega.sampling_prob <= 0.0)
            throw std::invalid_argument(
                "scaled_residual: 1/p scaling needs a known sampling_prob");
        scale = 1.0 / omega.sampling_prob;
    }
    std::vector<double> x_at;
    kernels::lowrank_at_samples(x, omega.samples, x_at);
    std::vector<Sample> sparse(omega.samples);
    for (std::size_t t = 0; t < sparse.size(); ++t)
        sparse[t].value = scale * (omega.samples[t].value - x_at[t]);
    return StructuredOperator(x, std::move(sparse), omega.rows, omega.cols);
}

} // namespace

StructuredOperator scaled_residual(const LowRankFactorization& x,
                                   const ObservationSet& omega,
                                   ResidualScaling scaling) {
    return residual_operator(x, omega, scaling);
}

StructuredOperator scaled_residual(const DenseMatrix& x,
                                   const ObservationSet& omega,
                                   ResidualScaling scaling) {
    Eigen::BDCSVD<DenseMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LowRankFactorization f;
    f.left = svd.matrixU();
    f.values = svd.singularValues();
    f.right = svd.matrixV();
    return residual_operator(f, omega, scaling);
}

double observed_residual(const LowRankFactorization& x,
                         const ObservationSet& omega) {
    std::vector<double> diff;
    kernels::lowrank_at_samples(x, omega.samples, diff);
    for (std::size_t t = 0; t < diff.size(); ++t)
        diff[t] -= omega.samples[t].value;
    return std::sqrt(kernels::sum_squares(diff));
}

double max_abs_value(const ObservationSet& omega) {
    double m = 0.0;
    for (const Sample& e : omega.samples) m = std::max(m, std::abs(e.value));
    return m;
}

} // namespace stsvp
