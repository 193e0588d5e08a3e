#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stsvp {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an iterative factorization does not reach its tolerance
/// within the matvec budget.
class SvdConvergenceError : public std::runtime_error {
public:
    SvdConvergenceError(const std::string& what, long matvecs, long iterations)
        : std::runtime_error(what), matvecs(matvecs), iterations(iterations) {}
    long matvecs;
    long iterations;
};

/// Thrown by the solvers when a partition subset that the schedule needs
/// turns out to be empty.
class EmptySubsetError : public std::runtime_error {
public:
    EmptySubsetError(const std::string& what, std::size_t subset_index)
        : std::runtime_error(what), subset_index(subset_index) {}
    std::size_t subset_index;
};

/// U * diag(sigma) * V^T with orthonormal columns in U and V and
/// nonincreasing nonnegative sigma. Trailing zero singular values are
/// allowed; rank 0 (empty factors) represents the zero matrix.
struct LowRankFactorization {
    DenseMatrix left;   // n1 x k
    Vector values;      // k, sigma_1 >= ... >= sigma_k >= 0
    DenseMatrix right;  // n2 x k

    Index rows() const { return left.rows(); }
    Index cols() const { return right.rows(); }
    Index rank() const { return values.size(); }

    static LowRankFactorization zero(Index n1, Index n2) {
        LowRankFactorization f;
        f.left = DenseMatrix::Zero(n1, 0);
        f.values = Vector::Zero(0);
        f.right = DenseMatrix::Zero(n2, 0);
        return f;
    }

    DenseMatrix densify() const {
        if (rank() == 0) return DenseMatrix::Zero(rows(), cols());
        return left * values.asDiagonal() * right.transpose();
    }

    /// Number of strictly positive singular values.
    Index effective_rank() const {
        Index r = 0;
        for (Index i = 0; i < values.size(); ++i)
            if (values[i] > 0.0) ++r;
        return r;
    }

    /// Largest deviation of U^T U and V^T V from the identity.
    double orthonormality_defect() const;
};

struct Sample {
    std::int32_t row;
    std::int32_t col;
    double value;
};

/// The observed index set Omega with values, plus the Bernoulli sampling
/// probability when it is known.
struct ObservationSet {
    Index rows = 0;
    Index cols = 0;
    std::vector<Sample> samples;
    double sampling_prob = kUnknownProb;  // kUnknownProb when not known

    static constexpr double kUnknownProb = -1.0;

    std::size_t size() const { return samples.size(); }
    bool prob_known() const { return sampling_prob >= 0.0; }
    bool covers_everything() const {
        return static_cast<Index>(samples.size()) == rows * cols;
    }
};

} // namespace stsvp
