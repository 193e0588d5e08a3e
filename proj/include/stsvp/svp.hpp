#pragma once

#include "stsvp/observations.hpp"
#include "stsvp/svd.hpp"
#include "stsvp/trace.hpp"

namespace stsvp {

struct SvpConfig {
    Index rank = 1;
    double target_error = 1e-4;  // epsilon
    long max_outer_iters = 0;    // 0: use the computed schedule
    double svd_tol = 1e-9;
    std::uint64_t seed = 0;
    /// Stand-in for the unobservable ||M||_inf in the iteration-count
    /// formula; negative means "use max |observed value|". Callers holding
    /// a tighter magnitude bound (for example a spectral-norm estimate of
    /// the full matrix) can pass it here to lengthen or shorten the
    /// schedule.
    double max_value_override = -1.0;
    long svd_cap_multiplier = 300;
};

struct IterateState {
    LowRankFactorization iterate;
    long iteration = 0;
    std::vector<double> residual_history;  // on observed entries
};

/// One projected-gradient step: P_k(X - s * P_Omega(X - M)).
LowRankFactorization pgd_step(const LowRankFactorization& x,
                              const ObservationSet& omega, Index k,
                              double svd_tol,
                              ResidualScaling scaling = ResidualScaling::SampleCount);

/// The gradient operator X - s * P_Omega(X - M) before projection; Step II
/// of the stagewise solver reads sigma_{k+1} off this object.
StructuredOperator gd_step(const LowRankFactorization& x,
                           const ObservationSet& omega);

/// Basic SVP: T = ceil(log2((n1+n2) max|M_ij| / eps)) projected-gradient
/// iterations at rank r, each on its own random subset of Omega. When the
/// observation set covers every entry, P_Omega is the identity and subset
/// thinning would only inject sampling noise where there is none, so every
/// iteration uses the full set.
std::pair<LowRankFactorization, StageTrace> svp_solve(const ObservationSet& omega,
                                                      const SvpConfig& config);

} // namespace stsvp
