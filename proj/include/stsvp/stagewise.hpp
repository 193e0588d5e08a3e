#pragma once

#include "stsvp/svp.hpp"

namespace stsvp {

enum class MuMode { Provided, Estimate };

struct StSvpConfig {
    Index rank = 1;
    double target_error = 1e-4;  // epsilon
    /// Incoherence bound used by the exit threshold eps / (10 mu^2 r).
    double incoherence_mu = 1.0;
    /// Estimate mode recomputes mu from the current iterate at each exit
    /// test instead of trusting the provided value.
    MuMode mu_mode = MuMode::Provided;
    double oversampling_alpha = 1.0;
    int gap_exponent = 2;  // 2 or 3
    std::uint64_t seed = 0;
    double svd_tol = 1e-9;
    /// Optional per-phase iteration caps; 0 keeps the schedule values
    /// (log2 n for I and IV, log2(1/eps) for III).
    long step1_cap = 0;
    long step3_cap = 0;
    long step4_cap = 0;
    long svd_cap_multiplier = 300;
};

/// sigma_{k+1}(G) > sigma_k(G) / n^exponent: the spectrum past rank k is
/// still significant, so the stage should hand over to the next one.
bool stage_gap_test(const StructuredOperator& g, Index k, Index n, int exponent,
                    double svd_tol);

/// sigma_{k+1}(G) < eps / (10 mu^2 r): the gradient operator is rank-k up
/// to the target accuracy and the solve can stop.
bool exit_test(const StructuredOperator& g, Index k, double eps, double mu,
               Index r, double svd_tol);

struct RunStageResult {
    LowRankFactorization iterate;
    StageOutcome outcome = StageOutcome::AdvancedAtGap;
    std::vector<TraceRecord> records;
    long matvecs = 0;
};

/// One stage of the stagewise solver: Step I (fresh-subset PGD at rank k),
/// Step II (gap test on the last Step-I gradient), and when the gap test
/// fails, Step III (same-sample PGD on the full set) and Step IV
/// (fresh-subset PGD with the exit test after each iterate).
RunStageResult run_stage(Index k, const LowRankFactorization& x_in,
                         const std::vector<ObservationSet>& stage_subsets,
                         const ObservationSet& omega_full,
                         const StSvpConfig& config);

/// Stagewise SVP. Partitions Omega into 2 r ceil(log2 n) subsets up front
/// (one log2 n block per stage for Step I, one for Step IV) and runs stages
/// k = 1..r; returns the first iterate passing the exit test, else the
/// final stage-r iterate with the budget_exhausted flag set in the trace.
/// Full observation sets skip subset thinning, as in svp_solve.
std::pair<LowRankFactorization, StageTrace> stsvp_solve(
    const ObservationSet& omega, const StSvpConfig& config);

} // namespace stsvp
