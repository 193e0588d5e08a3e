#pragma once

#include "stsvp/stagewise.hpp"

#include <iosfwd>
#include <string>

namespace stsvp {

/// Random low-rank instance: M = U Sigma V^T with U, V drawn as
/// orthonormalized independent standard-normal factors.
struct SyntheticSpec {
    Index n1 = 0;
    Index n2 = 0;
    Index rank = 1;
    Vector spectrum;  // positive nonincreasing, size = rank
    std::uint64_t seed = 0;

    /// sigma_1 = 1 and sigma_i = 1/kappa for i >= 2.
    static Vector kappa_spectrum(Index rank, double kappa);
};

std::pair<DenseMatrix, LowRankFactorization> generate_synthetic(
    const SyntheticSpec& spec);

enum class SweepAxis { Rank, Kappa, Size };

SweepAxis sweep_axis_from_name(const std::string& name);

struct ExperimentConfig {
    SyntheticSpec base;
    double sample_factor = 5.0;
    double eps = 1e-4;
    double alpha = 1.0;
    int gap_exponent = 2;
    double svd_tol = 1e-7;
    long trials = 5;
    std::uint64_t seed = 0;
    /// Incoherence handed to the stagewise solver; non-positive means
    /// "measure it on the ground truth".
    double mu = -1.0;
    /// Rebuild the spectrum as kappa_spectrum(rank, rank) at each grid
    /// point of a rank sweep (the kappa = rank scheme).
    bool kappa_equals_rank = false;
    double kappa = -1.0;  // fixed kappa when > 0 and spectrum not given
};

struct ExperimentRow {
    long trial = 0;
    Index n1 = 0, n2 = 0, rank = 0;
    double kappa = 1.0;
    double sample_factor = 0.0;
    long omega_size = 0;
    std::string algorithm;  // "svp" or "stsvp"
    long iterations = 0;
    long matvecs = 0;
    double err_spectral = 0.0;  // ||Mhat - M||_2 / ||M||_2, NaN on failure
    double err_frob = 0.0;
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
};

/// Expected observation count factor * (n1+n2) * r * ceil(log2(n1+n2)),
/// expressed as a Bernoulli probability (capped at 1).
double sampling_probability(Index n1, Index n2, Index rank, double factor);

/// Runs both solvers on every (grid point, trial) instance with equal
/// sample budgets. Grid points run in parallel with per-point derived
/// seeds; rows come back in deterministic (grid, trial, algorithm) order.
/// A solver failure is recorded in-row as NaN errors and the sweep
/// continues.
std::vector<ExperimentRow> run_experiment(SweepAxis axis,
                                          const std::vector<double>& grid,
                                          const ExperimentConfig& config);

extern const char* const kCsvHeader;

void write_csv(const std::vector<ExperimentRow>& rows, std::ostream& os);

} // namespace stsvp
