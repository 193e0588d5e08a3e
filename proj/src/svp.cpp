#include "stsvp/svp.hpp"

#include "stsvp/random.hpp"

#include <cmath>

namespace stsvp {

LowRankFactorization pgd_step(const LowRankFactorization& x,
                              const ObservationSet& omega, Index k,
                              double svd_tol, ResidualScaling scaling) {
    StructuredOperator g = scaled_residual(x, omega, scaling);
    return truncated_svd(g, k, svd_tol);
}

StructuredOperator gd_step(const LowRankFactorization& x,
                           const ObservationSet& omega) {
    return scaled_residual(x, omega);
}

namespace {
constexpr std::uint64_t kPartitionStream = 0x70617274ULL;
}

std::pair<LowRankFactorization, StageTrace> svp_solve(const ObservationSet& omega,
                                                      const SvpConfig& config) {
    if (config.rank < 1)
        throw std::invalid_argument("svp_solve: rank must be >= 1");
    if (!(config.target_error > 0.0))
        throw std::invalid_argument("svp_solve: target_error must be positive");

    const Index n1 = omega.rows, n2 = omega.cols;
    StageTrace trace;
    trace.full_observation = omega.covers_everything();

    const double max_value = config.max_value_override >= 0.0
                                 ? config.max_value_override
                                 : max_abs_value(omega);

    long iters = 1;
    if (max_value > 0.0) {
        const double ratio =
            static_cast<double>(n1 + n2) * max_value / config.target_error;
        iters = std::max<long>(1, static_cast<long>(std::ceil(std::log2(ratio))));
    }
    if (config.max_outer_iters > 0)
        iters = std::min(iters, config.max_outer_iters);

    if (max_value == 0.0) {
        // Nothing observed is nonzero; the zero factorization is already
        // the solution of the observed problem.
        TraceRecord rec;
        rec.stage = 0;
        rec.phase = Phase::Svp;
        rec.iteration = 1;
        rec.residual = 0.0;
        trace.records.push_back(rec);
        return {LowRankFactorization::zero(n1, n2), trace};
    }

    if (static_cast<long>(omega.size()) < iters)
        throw std::invalid_argument(
            "svp_solve: fewer observations than scheduled iterations");

    std::vector<ObservationSet> subsets;
    if (!trace.full_observation)
        subsets = partition(omega, static_cast<std::size_t>(iters),
                            derive_seed(config.seed, kPartitionStream));

    SvdOptions opts;
    opts.cap_multiplier = config.svd_cap_multiplier;
    opts.best_effort = true;

    IterateState state;
    state.iterate = LowRankFactorization::zero(n1, n2);
    for (long t = 0; t < iters; ++t) {
        const ObservationSet& subset =
            trace.full_observation ? omega : subsets[static_cast<std::size_t>(t)];
        if (subset.samples.empty())
            throw EmptySubsetError("svp_solve: empty partition subset " +
                                       std::to_string(t),
                                   static_cast<std::size_t>(t));
        StructuredOperator g = scaled_residual(state.iterate, subset);
        TruncatedSvdResult svd = truncated_svd_full(
            as_block_operator(g), config.rank, config.svd_tol, opts);
        state.iterate = std::move(svd.factorization);
        state.iteration = t + 1;
        state.residual_history.push_back(observed_residual(state.iterate, omega));

        TraceRecord rec;
        rec.stage = 0;
        rec.phase = Phase::Svp;
        rec.iteration = static_cast<int>(state.iteration);
        rec.residual = state.residual_history.back();
        rec.matvecs = svd.matvecs;
        trace.total_matvecs += svd.matvecs;
        trace.records.push_back(rec);
    }
    return {std::move(state.iterate), std::move(trace)};
}

} // namespace stsvp
