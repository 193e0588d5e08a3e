#pragma once

#include "stsvp/structured_operator.hpp"
#include "stsvp/types.hpp"

#include <functional>

namespace stsvp {

/// Matrix-free operator handed to the truncated SVD: block products with A
/// and A^T. Applications are counted per column by the driver.
struct BlockOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<DenseMatrix(const DenseMatrix&)> apply;
    std::function<DenseMatrix(const DenseMatrix&)> apply_transpose;
};

BlockOperator as_block_operator(const StructuredOperator& op);
BlockOperator as_block_operator(const DenseMatrix& a);

struct SvdOptions {
    /// Matvec budget is cap_multiplier * k, per the library default.
    long cap_multiplier = 300;
    /// When true, a budget overrun returns the current Ritz estimates
    /// (converged = false) instead of throwing. The solvers use this; the
    /// public contract of truncated_svd is strict.
    bool best_effort = false;
};

struct TruncatedSvdResult {
    LowRankFactorization factorization;
    long matvecs = 0;
    long iterations = 0;
    bool converged = true;
};

/// Block subspace iteration with Rayleigh-Ritz extraction. Returns the top
/// k singular triplets; every sigma_i is within tol * sigma_1 of the true
/// value on convergence. When the true rank is below k the trailing values
/// are exactly zero and the vectors are arbitrary orthonormal completions.
TruncatedSvdResult truncated_svd_full(const BlockOperator& op, Index k,
                                      double tol, const SvdOptions& options = {});

LowRankFactorization truncated_svd(const StructuredOperator& op, Index k,
                                   double tol);
LowRankFactorization truncated_svd(const DenseMatrix& a, Index k, double tol);

/// P_k(A): best rank-k approximation.
LowRankFactorization rank_k_project(const StructuredOperator& op, Index k);
LowRankFactorization rank_k_project(const DenseMatrix& a, Index k);

/// sigma_1(A) within relative tol.
double spectral_norm(const StructuredOperator& op, double tol);
double spectral_norm(const DenseMatrix& a, double tol);

/// Smallest mu with max_i ||e_i^T U||_2 <= mu sqrt(r)/sqrt(n1) and the
/// analogous column-side bound, over the factors with nonzero singular
/// value.
double incoherence(const LowRankFactorization& f);

/// [[0, M], [M^T, 0]]; eigenvalues are plus/minus the singular values of M
/// padded with zeros.
DenseMatrix symmetric_dilation(const DenseMatrix& m);

} // namespace stsvp
