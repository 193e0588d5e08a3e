#pragma once

#include "stsvp/types.hpp"

namespace stsvp::kernels {

/// Compressed row storage built once from coordinate samples. `transposed`
/// variants are materialized separately so both A*x and A^T*x walk rows,
/// which keeps every output element owned by exactly one thread.
struct Csr {
    Index rows = 0;
    Index cols = 0;
    std::vector<Index> offsets;       // rows + 1
    std::vector<std::int32_t> index;  // column of each entry
    std::vector<double> value;

    std::size_t nnz() const { return value.size(); }
};

Csr build_csr(Index rows, Index cols, const std::vector<Sample>& samples,
              bool transposed);

/// Y = S * X. OpenMP over rows; per-row accumulation order is fixed, so the
/// result is bit-identical to the serial reference for any thread count.
void csr_apply(const Csr& s, const DenseMatrix& x, DenseMatrix& y);
void csr_apply_serial(const Csr& s, const DenseMatrix& x, DenseMatrix& y);

/// out[t] = sum_l sigma_l * U(i_t, l) * V(j_t, l) for each sample t:
/// evaluates a low-rank iterate at the observed positions.
void lowrank_at_samples(const LowRankFactorization& f,
                        const std::vector<Sample>& samples,
                        std::vector<double>& out);
void lowrank_at_samples_serial(const LowRankFactorization& f,
                               const std::vector<Sample>& samples,
                               std::vector<double>& out);

/// Deterministic sum of squares: parallel fill of fixed-size chunk partials
/// followed by a serial combine, so the result does not depend on the
/// number of threads.
double sum_squares(const std::vector<double>& v);
double sum_squares_serial(const std::vector<double>& v);

} // namespace stsvp::kernels
