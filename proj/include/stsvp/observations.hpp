#pragma once

#include "stsvp/structured_operator.hpp"
#include "stsvp/types.hpp"

#include <cstdint>

namespace stsvp {

/// Which gradient scaling a residual operator uses. Solvers follow the
/// pseudocode convention n1*n2/|Omega|; the lemma lab uses 1/p where a
/// statement demands the exactly-unbiased estimator.
enum class ResidualScaling { SampleCount, SamplingProb };

/// Includes each index of M independently with probability p.
ObservationSet bernoulli_sample(const DenseMatrix& m, double p,
                                std::uint64_t seed);

/// P_Omega(A): same index set, values read from A.
ObservationSet project_onto(const DenseMatrix& a, const ObservationSet& omega);

/// Assigns every sample to one of `parts` subsets uniformly and
/// independently. Disjoint union of the result is the input; each part
/// keeps sampling_prob p/parts.
std::vector<ObservationSet> partition(const ObservationSet& omega,
                                      std::size_t parts, std::uint64_t seed);

/// X - s * P_Omega(X - M) as a structured operator, where s is
/// n1*n2/|Omega| or 1/p depending on the scaling choice. The sparse part
/// is built only on Omega; nothing is densified.
StructuredOperator scaled_residual(
    const LowRankFactorization& x, const ObservationSet& omega,
    ResidualScaling scaling = ResidualScaling::SampleCount);

/// Dense-X overload; factorizes X first. Test and lab use only.
StructuredOperator scaled_residual(
    const DenseMatrix& x, const ObservationSet& omega,
    ResidualScaling scaling = ResidualScaling::SampleCount);

/// || P_Omega(X - M) ||_F, evaluated on the samples.
double observed_residual(const LowRankFactorization& x,
                         const ObservationSet& omega);

/// Largest |value| among the observations.
double max_abs_value(const ObservationSet& omega);

} // namespace stsvp
