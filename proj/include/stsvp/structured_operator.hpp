#pragma once

#include "stsvp/kernels.hpp"
#include "stsvp/types.hpp"

namespace stsvp {

/// Low-rank plus sparse operator, applied without densification. This is
/// the shape of the gradient iterate G = X - s * P_Omega(X - M): the
/// low-rank part holds X and the sparse part holds s * (M - X) on Omega.
class StructuredOperator {
public:
    StructuredOperator(LowRankFactorization low_rank,
                       std::vector<Sample> sparse, Index rows, Index cols);

    /// Builds an operator from a dense matrix (empty low-rank part, one
    /// sparse entry per coefficient). Used by tests and the lemma lab.
    static StructuredOperator from_dense(const DenseMatrix& a);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }

    const LowRankFactorization& low_rank() const { return low_rank_; }
    const std::vector<Sample>& sparse() const { return sparse_; }

    /// Y = op * X.
    DenseMatrix apply(const DenseMatrix& x) const;
    /// Y = op^T * X.
    DenseMatrix apply_transpose(const DenseMatrix& x) const;

    DenseMatrix densify() const;

private:
    Index rows_;
    Index cols_;
    LowRankFactorization low_rank_;
    std::vector<Sample> sparse_;
    kernels::Csr by_row_;
    kernels::Csr by_col_;
};

} // namespace stsvp
