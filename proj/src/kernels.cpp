#include "stsvp/kernels.hpp"

#include <omp.h>

namespace stsvp::kernels {

Csr build_csr(Index rows, Index cols, const std::vector<Sample>& samples,
              bool transposed) {
    Csr s;
    s.rows = transposed ? cols : rows;
    s.cols = transposed ? rows : cols;
    s.offsets.assign(static_cast<std::size_t>(s.rows) + 1, 0);
    for (const Sample& e : samples) {
        Index r = transposed ? e.col : e.row;
        ++s.offsets[static_cast<std::size_t>(r) + 1];
    }
    for (std::size_t i = 1; i < s.offsets.size(); ++i)
        s.offsets[i] += s.offsets[i - 1];
    s.index.resize(samples.size());
    s.value.resize(samples.size());
    std::vector<Index> cursor(s.offsets.begin(), s.offsets.end() - 1);
    for (const Sample& e : samples) {
        Index r = transposed ? e.col : e.row;
        Index c = transposed ? e.row : e.col;
        Index at = cursor[static_cast<std::size_t>(r)]++;
        s.index[static_cast<std::size_t>(at)] = static_cast<std::int32_t>(c);
        s.value[static_cast<std::size_t>(at)] = e.value;
    }
    return s;
}

void csr_apply_serial(const Csr& s, const DenseMatrix& x, DenseMatrix& y) {
    const Index b = x.cols();
    y.setZero(s.rows, b);
    for (Index r = 0; r < s.rows; ++r) {
        for (Index at = s.offsets[static_cast<std::size_t>(r)];
             at < s.offsets[static_cast<std::size_t>(r) + 1]; ++at) {
            const Index c = s.index[static_cast<std::size_t>(at)];
            const double v = s.value[static_cast<std::size_t>(at)];
            for (Index j = 0; j < b; ++j) y(r, j) += v * x(c, j);
        }
    }
}

void csr_apply(const Csr& s, const DenseMatrix& x, DenseMatrix& y) {
    const Index b = x.cols();
    y.setZero(s.rows, b);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < s.rows; ++r) {
        for (Index at = s.offsets[static_cast<std::size_t>(r)];
             at < s.offsets[static_cast<std::size_t>(r) + 1]; ++at) {
            const Index c = s.index[static_cast<std::size_t>(at)];
            const double v = s.value[static_cast<std::size_t>(at)];
            for (Index j = 0; j < b; ++j) y(r, j) += v * x(c, j);
        }
    }
}

namespace {

inline double eval_sample(const LowRankFactorization& f, const Sample& e) {
    double acc = 0.0;
    const Index k = f.rank();
    for (Index l = 0; l < k; ++l)
        acc += f.values[l] * f.left(e.row, l) * f.right(e.col, l);
    return acc;
}

} // namespace

void lowrank_at_samples_serial(const LowRankFactorization& f,
                               const std::vector<Sample>& samples,
                               std::vector<double>& out) {
    out.resize(samples.size());
    for (std::size_t t = 0; t < samples.size(); ++t)
        out[t] = eval_sample(f, samples[t]);
}

void lowrank_at_samples(const LowRankFactorization& f,
                        const std::vector<Sample>& samples,
                        std::vector<double>& out) {
    out.resize(samples.size());
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t)
        out[static_cast<std::size_t>(t)] =
            eval_sample(f, samples[static_cast<std::size_t>(t)]);
}

namespace {

constexpr std::size_t kChunk = 4096;

// Shared chunk layout: both variants sum each chunk left-to-right and then
// combine the partials in chunk order, so they agree bitwise.
double chunk_sum(const std::vector<double>& v, std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(v.size(), lo + kChunk);
    double acc = 0.0;
    for (std::size_t t = lo; t < hi; ++t) acc += v[t] * v[t];
    return acc;
}

} // namespace

double sum_squares_serial(const std::vector<double>& v) {
    const std::size_t chunks = (v.size() + kChunk - 1) / kChunk;
    double acc = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) acc += chunk_sum(v, c);
    return acc;
}

double sum_squares(const std::vector<double>& v) {
    const std::size_t chunks = (v.size() + kChunk - 1) / kChunk;
    if (chunks <= 1) return sum_squares_serial(v);
    std::vector<double> partial(chunks, 0.0);
    const std::int64_t m = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < m; ++c)
        partial[static_cast<std::size_t>(c)] =
            chunk_sum(v, static_cast<std::size_t>(c));
    double acc = 0.0;
    for (double x : partial) acc += x;
    return acc;
}

} // namespace stsvp::kernels
