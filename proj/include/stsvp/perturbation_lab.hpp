#pragma once

#include "stsvp/observations.hpp"
#include "stsvp/types.hpp"

#include <cstdint>
#include <string>

namespace stsvp::lab {

/// Orthonormal basis U* of the subspace generating a tangent space
/// T(A) = { U* L0 U*^T + U* L1 W^T + W L2 U*^T }.
struct TangentSpaceBasis {
    DenseMatrix u;  // n x r, orthonormal columns
};

/// Basis from the top-k eigenvectors (by magnitude) of a symmetric matrix.
TangentSpaceBasis tangent_basis_topk(const DenseMatrix& a, Index k);

/// Splits symmetric B into its tangent-space component and the
/// perpendicular component (I - P) B (I - P) with P = U* U*^T.
/// The two parts add back to B exactly and are mutually orthogonal.
std::pair<DenseMatrix, DenseMatrix> tangent_project(const DenseMatrix& b,
                                                    const TangentSpaceBasis& basis);

struct CheckReport {
    std::string name;
    long trials = 0;
    long violations = 0;
    long skipped = 0;
    double worst_ratio = 0.0;  // observed quantity / bound, max over trials
    std::vector<std::uint64_t> violation_seeds;  // capped at 32 entries
    /// Lemma-5 exploratory statistic: violations of the conjectured
    /// min-form right hand side. -1 when not applicable.
    long min_form_violations = -1;

    /// "check=<name> trials=... violations=... worst=... seeds=[...]".
    std::string to_line() const;
    void record_violation(std::uint64_t seed);
};

/// Seeded recipe producing a symmetric random matrix with independent
/// entries (up to symmetry). The first two kinds satisfy the moment model
/// (zero mean, |h| < 1, E|h|^a <= 1/n); the broken kinds deliberately do
/// not and drive the negative controls.
struct MomentMatrixSpec {
    enum class Kind {
        SparseResidual,   // scaled A - (1/p) P_Omega(A) on a random incoherent A
        Rademacher,       // +-1/sqrt(n)
        BrokenScale,      // +-3/sqrt(n): second moment 9/n
        BrokenConstant    // all entries 0.9: mean far from zero
    };
    Index n = 0;
    Kind kind = Kind::Rademacher;
    double sparse_p = 0.2;  // used by SparseResidual

    DenseMatrix generate(std::uint64_t seed) const;
};

/// Seeded recipe for an incoherent rank-r symmetric PSD matrix with a
/// prescribed spectrum; also reports the realized incoherence.
struct SymmetricLowRankSpec {
    Index n = 0;
    Vector eigenvalues;  // positive nonincreasing, size r
    /// When true the single factor direction is the normalized all-ones
    /// vector (mu = 1 exactly); only valid for rank 1.
    bool ones_direction = false;

    DenseMatrix generate(std::uint64_t seed, double* mu_out = nullptr) const;
};

// ---- single-instance checks -------------------------------------------

/// Weyl: |lambda_i(A + N) - lambda_i(A)| <= ||N||_2 for all i.
CheckReport check_weyl(const DenseMatrix& a, const DenseMatrix& n);

/// Rank-k projection perturbation:
/// ||P_k(A+E) - P_k(A)||_F <= c (sqrt(k) ||E||_2 + ||E||_F)
/// under sigma_{k+1}(A) <= sigma_k(A)/4 and ||E||_F < sigma_k(A)/4.
/// Hypothesis-violating input is reported as skipped.
CheckReport check_davis_kahan_ext(const DenseMatrix& a, const DenseMatrix& e,
                                  Index k, double c);

/// ||P_{T(A)^perp}(B)||_F <= ||A - B||_F^2 / sigma_k(B) for symmetric A
/// and symmetric rank-k B.
CheckReport check_perp_bound(const DenseMatrix& a, const DenseMatrix& b,
                             Index k);

/// Moment conditions of B = (sqrt(p) / (2 sqrt(n) ||A||_inf)) (A - (1/p) P_Omega(A)):
/// analytic E|B_ij|^a <= 1/n for a = 2..2*log2(n), plus empirical 5-sigma
/// zero-mean checks over `trials` sampled Omegas.
CheckReport check_moment_conditions(const DenseMatrix& a, double p, long trials,
                                    std::uint64_t seed);

/// ||X+ - P_k(M)||_F <= (1/10) ||X - P_k(M)||_F + (1/p) ||M - P_k(M)||_F
/// where X+ is the 1/p-scaled PGD update. Hypotheses
/// ||M - P_k(M)||_F < sigma_k/n^3 and ||X - P_k(M)||_F < sigma_k/n^3 are
/// verified first; a failing instance is reported as skipped.
CheckReport check_same_sample_decay(const DenseMatrix& m,
                                    const LowRankFactorization& x,
                                    const ObservationSet& omega, Index k);

// ---- Monte-Carlo suites -------------------------------------------------

CheckReport weyl_suite(Index n, long trials, std::uint64_t seed);
CheckReport davis_kahan_suite(Index max_n, long satisfying_trials, double c,
                              std::uint64_t seed);
CheckReport perp_bound_suite(Index max_n, long trials, std::uint64_t seed);
CheckReport moment_suite(Index n, double p, long trials, std::uint64_t seed);

/// ||H||_2 <= 3 sqrt(alpha) over draws from the generator.
CheckReport check_spectral_bound(const MomentMatrixSpec& spec, double alpha,
                                 long trials, std::uint64_t seed);

/// ||M - P_k(M + beta H)||_inf <= (mu^2 r^2 / n)(sigma_{k+1} + 15 |beta|
/// sqrt(alpha) log2 n) under |beta| <= sigma_k / (200 sqrt(alpha)).
CheckReport check_error_decay(const SymmetricLowRankSpec& m_spec,
                              const MomentMatrixSpec& h_spec, Index k,
                              double beta, double alpha, long trials,
                              std::uint64_t seed);

/// |<e_r, H^a u>| <= (c log2 n)^a ||u||_inf for every coordinate r.
CheckReport check_hpower_bound(const MomentMatrixSpec& spec, Index a,
                               const Vector& u, double c, long trials,
                               std::uint64_t seed);

/// Constructs instances at the stated sampling rate and runs
/// check_same_sample_decay on each. `broken` bypasses the hypotheses with
/// an oversized perturbation at starved sampling (negative control).
CheckReport same_sample_suite(Index n, Index k, double p, long trials,
                              std::uint64_t seed, bool broken = false);

/// ||M B M - M||_inf <= (mu^2 r / n) ||M B M - M||_2 for incoherent
/// rank-r symmetric M and arbitrary symmetric B.
CheckReport lemma11_suite(Index n, Index r, long trials, std::uint64_t seed);

/// Resolvent bounds for P_k(A + E) = U L U^T under ||E||_2 < |beta_k|/2:
/// ||A - A U L^-1 U^T A||_2 <= |beta_{k+1}| + 5 ||E||_2 and
/// ||A U L^-a U^T A||_2 <= 4 (|beta_k|/2)^(2-a) for a >= 2.
CheckReport lemma12_suite(Index n, long trials, std::uint64_t seed);

} // namespace stsvp::lab
