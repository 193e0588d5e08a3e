#include "stsvp/structured_operator.hpp"

namespace stsvp {

StructuredOperator::StructuredOperator(LowRankFactorization low_rank,
                                       std::vector<Sample> sparse, Index rows,
                                       Index cols)
    : rows_(rows), cols_(cols), low_rank_(std::move(low_rank)),
      sparse_(std::move(sparse)) {
    if (low_rank_.rank() > 0 &&
        (low_rank_.rows() != rows_ || low_rank_.cols() != cols_))
        throw std::invalid_argument("StructuredOperator: factor shape mismatch");
    by_row_ = kernels::build_csr(rows_, cols_, sparse_, false);
    by_col_ = kernels::build_csr(rows_, cols_, sparse_, true);
}

StructuredOperator StructuredOperator::from_dense(const DenseMatrix& a) {
    std::vector<Sample> entries;
    entries.reserve(static_cast<std::size_t>(a.size()));
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            entries.push_back({static_cast<std::int32_t>(i),
                               static_cast<std::int32_t>(j), a(i, j)});
    return StructuredOperator(LowRankFactorization::zero(a.rows(), a.cols()),
                              std::move(entries), a.rows(), a.cols());
}

DenseMatrix StructuredOperator::apply(const DenseMatrix& x) const {
    DenseMatrix y;
    kernels::csr_apply(by_row_, x, y);
    if (low_rank_.rank() > 0) {
        DenseMatrix t = low_rank_.right.transpose() * x;
        t = low_rank_.values.asDiagonal() * t;
        y.noalias() += low_rank_.left * t;
    }
    return y;
}

DenseMatrix StructuredOperator::apply_transpose(const DenseMatrix& x) const {
    DenseMatrix y;
    kernels::csr_apply(by_col_, x, y);
    if (low_rank_.rank() > 0) {
        DenseMatrix t = low_rank_.left.transpose() * x;
        t = low_rank_.values.asDiagonal() * t;
        y.noalias() += low_rank_.right * t;
    }
    return y;
}

DenseMatrix StructuredOperator::densify() const {
    DenseMatrix d = low_rank_.rank() > 0 ? low_rank_.densify()
                                         : DenseMatrix::Zero(rows_, cols_);
    for (const Sample& e : sparse_) d(e.row, e.col) += e.value;
    return d;
}

} // namespace stsvp
