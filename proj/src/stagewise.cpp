#include "stsvp/stagewise.hpp"

#include "stsvp/random.hpp"

#include <cmath>

namespace stsvp {

namespace {

struct TopSigmaPair {
    double sigma_k = 0.0;
    double sigma_k1 = 0.0;
    long matvecs = 0;
    LowRankFactorization top_k;  // leading k triplets of the same SVD
};

// One rank-(k+1) factorization serves both the sigma_{k+1} tests and the
// projected iterate; when k+1 exceeds the small dimension, sigma_{k+1} = 0
// by convention.
TopSigmaPair top_sigma_pair(const StructuredOperator& g, Index k, double tol,
                            long cap_multiplier, bool best_effort) {
    TopSigmaPair out;
    const Index mindim = std::min(g.rows(), g.cols());
    const Index kk = std::min<Index>(k + 1, mindim);
    SvdOptions opts;
    opts.cap_multiplier = cap_multiplier;
    opts.best_effort = best_effort;
    TruncatedSvdResult svd = truncated_svd_full(as_block_operator(g), kk, tol, opts);
    out.matvecs = svd.matvecs;
    const Vector& s = svd.factorization.values;
    out.sigma_k = k <= s.size() ? s(k - 1) : 0.0;
    out.sigma_k1 = kk == k + 1 ? s(k) : 0.0;
    const Index keep = std::min<Index>(k, kk);
    out.top_k.left = svd.factorization.left.leftCols(keep);
    out.top_k.values = svd.factorization.values.head(keep);
    out.top_k.right = svd.factorization.right.leftCols(keep);
    return out;
}

constexpr std::uint64_t kPartitionStream = 0x70617274ULL;

} // namespace

bool stage_gap_test(const StructuredOperator& g, Index k, Index n, int exponent,
                    double svd_tol) {
    if (k < 1) throw std::invalid_argument("stage_gap_test: k must be >= 1");
    TopSigmaPair top = top_sigma_pair(g, k, svd_tol, 300, false);
    return top.sigma_k1 >
           top.sigma_k / std::pow(static_cast<double>(n), exponent);
}

bool exit_test(const StructuredOperator& g, Index k, double eps, double mu,
               Index r, double svd_tol) {
    if (k < 1) throw std::invalid_argument("exit_test: k must be >= 1");
    TopSigmaPair top = top_sigma_pair(g, k, svd_tol, 300, false);
    return top.sigma_k1 < eps / (10.0 * mu * mu * static_cast<double>(r));
}

namespace {

long schedule_or_cap(long schedule, long cap) {
    return cap > 0 ? std::min(schedule, cap) : schedule;
}

double exit_mu(const StSvpConfig& config, const LowRankFactorization& x) {
    if (config.mu_mode == MuMode::Provided) return config.incoherence_mu;
    if (x.effective_rank() == 0) return 1.0;
    return incoherence(x);
}

} // namespace

namespace {

RunStageResult run_stage_impl(Index k, const LowRankFactorization& x_in,
                              const std::vector<const ObservationSet*>& stage_subsets,
                              const ObservationSet& omega_full,
                              const StSvpConfig& config) {
    const Index n = omega_full.rows + omega_full.cols;
    const long log_n = std::max<long>(
        1, static_cast<long>(std::ceil(std::log2(static_cast<double>(n)))));
    if (stage_subsets.size() < 2 * static_cast<std::size_t>(log_n))
        throw std::invalid_argument("run_stage: needs 2*ceil(log2 n) subsets");

    SvdOptions opts;
    opts.cap_multiplier = config.svd_cap_multiplier;
    opts.best_effort = true;

    RunStageResult res;
    res.iterate = x_in;

    auto subset_at = [&](std::size_t idx) -> const ObservationSet& {
        const ObservationSet& s = *stage_subsets[idx];
        if (s.samples.empty())
            throw EmptySubsetError("run_stage: stage subset " +
                                       std::to_string(idx) + " is empty",
                                   idx);
        return s;
    };

    // Step I: fresh-sample PGD at rank k, subset t at iteration t.
    const long step1 = schedule_or_cap(log_n, config.step1_cap);
    for (long t = 0; t < step1; ++t) {
        const ObservationSet& sub = subset_at(static_cast<std::size_t>(t));
        StructuredOperator g = scaled_residual(res.iterate, sub);
        TruncatedSvdResult svd =
            truncated_svd_full(as_block_operator(g), k, config.svd_tol, opts);
        res.iterate = std::move(svd.factorization);
        TraceRecord rec;
        rec.stage = static_cast<int>(k);
        rec.phase = Phase::StageI;
        rec.iteration = static_cast<int>(t + 1);
        rec.residual = observed_residual(res.iterate, omega_full);
        rec.matvecs = svd.matvecs;
        res.matvecs += svd.matvecs;
        res.records.push_back(rec);
    }

    // Step II: gap test on the gradient of the last Step-I subset. The
    // sigma_{k+1} read uses a tighter tolerance since a threshold decision
    // depends on it.
    {
        const ObservationSet& sub =
            subset_at(static_cast<std::size_t>(step1 - 1));
        StructuredOperator g = gd_step(res.iterate, sub);
        TopSigmaPair top =
            top_sigma_pair(g, k, config.svd_tol / 10.0, opts.cap_multiplier, true);
        res.matvecs += top.matvecs;
        const bool advance =
            top.sigma_k1 >
            top.sigma_k / std::pow(static_cast<double>(n), config.gap_exponent);
        TraceRecord rec;
        rec.stage = static_cast<int>(k);
        rec.phase = Phase::StageII;
        rec.iteration = 1;
        rec.sigma_k = top.sigma_k;
        rec.sigma_k1 = top.sigma_k1;
        rec.branch = advance ? 1 : 0;
        rec.matvecs = top.matvecs;
        res.records.push_back(rec);
        if (advance) {
            res.outcome = StageOutcome::AdvancedAtGap;
            return res;
        }
    }

    // Step III: same-sample PGD on the full observation set.
    const long step3 = schedule_or_cap(
        std::max<long>(1, static_cast<long>(
                              std::ceil(std::log2(1.0 / config.target_error)))),
        config.step3_cap);
    for (long t = 0; t < step3; ++t) {
        StructuredOperator g = scaled_residual(res.iterate, omega_full);
        TruncatedSvdResult svd =
            truncated_svd_full(as_block_operator(g), k, config.svd_tol, opts);
        res.iterate = std::move(svd.factorization);
        TraceRecord rec;
        rec.stage = static_cast<int>(k);
        rec.phase = Phase::StageIII;
        rec.iteration = static_cast<int>(t + 1);
        rec.residual = observed_residual(res.iterate, omega_full);
        rec.matvecs = svd.matvecs;
        res.matvecs += svd.matvecs;
        res.records.push_back(rec);
    }

    // Step IV: fresh-sample PGD on the reserved second half of the stage
    // budget. Each iterate is the rank-k projection of its gradient
    // operator; the exit test reads sigma_{k+1} off the same factorization.
    const long step4 = schedule_or_cap(log_n, config.step4_cap);
    for (long t = 0; t < step4; ++t) {
        const ObservationSet& sub =
            subset_at(static_cast<std::size_t>(log_n + t));
        StructuredOperator g = gd_step(res.iterate, sub);
        TopSigmaPair top = top_sigma_pair(g, k, config.svd_tol / 10.0,
                                          opts.cap_multiplier, true);
        res.iterate = top.top_k;
        res.matvecs += top.matvecs;

        const double mu = exit_mu(config, res.iterate);
        const double threshold =
            config.target_error /
            (10.0 * mu * mu * static_cast<double>(config.rank));
        const bool exits = top.sigma_k1 < threshold;

        TraceRecord rec;
        rec.stage = static_cast<int>(k);
        rec.phase = Phase::StageIV;
        rec.iteration = static_cast<int>(t + 1);
        rec.residual = observed_residual(res.iterate, omega_full);
        rec.sigma_k = top.sigma_k;
        rec.sigma_k1 = top.sigma_k1;
        rec.exit_value = threshold;
        rec.exited = exits;
        rec.matvecs = top.matvecs;
        res.records.push_back(rec);
        if (exits) {
            res.outcome = StageOutcome::Exited;
            return res;
        }
    }
    res.outcome = StageOutcome::AdvancedAfterIV;
    return res;
}

} // namespace

RunStageResult run_stage(Index k, const LowRankFactorization& x_in,
                         const std::vector<ObservationSet>& stage_subsets,
                         const ObservationSet& omega_full,
                         const StSvpConfig& config) {
    std::vector<const ObservationSet*> views;
    views.reserve(stage_subsets.size());
    for (const ObservationSet& s : stage_subsets) views.push_back(&s);
    return run_stage_impl(k, x_in, views, omega_full, config);
}

std::pair<LowRankFactorization, StageTrace> stsvp_solve(
    const ObservationSet& omega, const StSvpConfig& config) {
    if (config.rank < 1)
        throw std::invalid_argument("stsvp_solve: rank must be >= 1");
    if (!(config.target_error > 0.0))
        throw std::invalid_argument("stsvp_solve: target_error must be positive");
    if (config.mu_mode == MuMode::Provided && config.incoherence_mu < 1.0)
        throw std::invalid_argument("stsvp_solve: incoherence mu must be >= 1");
    if (config.oversampling_alpha < 1.0)
        throw std::invalid_argument("stsvp_solve: alpha must be >= 1");
    if (config.gap_exponent != 2 && config.gap_exponent != 3)
        throw std::invalid_argument("stsvp_solve: gap exponent must be 2 or 3");

    const Index n1 = omega.rows, n2 = omega.cols;
    const Index n = n1 + n2;
    const long log_n = std::max<long>(
        1, static_cast<long>(std::ceil(std::log2(static_cast<double>(n)))));
    const std::size_t total_subsets =
        2 * static_cast<std::size_t>(config.rank) *
        static_cast<std::size_t>(log_n);

    StageTrace trace;
    trace.full_observation = omega.covers_everything();

    if (!trace.full_observation && omega.size() < total_subsets)
        throw std::invalid_argument(
            "stsvp_solve: fewer observations than scheduled subsets");

    std::vector<ObservationSet> subsets;
    if (!trace.full_observation)
        subsets = partition(omega, total_subsets,
                            derive_seed(config.seed, kPartitionStream));

    LowRankFactorization x = LowRankFactorization::zero(n1, n2);
    for (Index k = 1; k <= config.rank; ++k) {
        std::vector<const ObservationSet*> stage_subsets;
        stage_subsets.reserve(2 * static_cast<std::size_t>(log_n));
        for (long t = 0; t < 2 * log_n; ++t) {
            const std::size_t idx =
                static_cast<std::size_t>(k - 1) * 2 *
                    static_cast<std::size_t>(log_n) +
                static_cast<std::size_t>(t);
            stage_subsets.push_back(trace.full_observation ? &omega : &subsets[idx]);
        }
        RunStageResult stage = run_stage_impl(k, x, stage_subsets, omega, config);
        x = std::move(stage.iterate);
        trace.total_matvecs += stage.matvecs;
        for (TraceRecord& rec : stage.records)
            trace.records.push_back(std::move(rec));
        trace.stages.push_back({static_cast<int>(k), stage.outcome});
        if (stage.outcome == StageOutcome::Exited)
            return {std::move(x), std::move(trace)};
    }
    trace.budget_exhausted = true;
    return {std::move(x), std::move(trace)};
}

} // namespace stsvp
