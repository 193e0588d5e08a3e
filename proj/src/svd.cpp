#include "stsvp/svd.hpp"

#include "stsvp/random.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace stsvp {

double LowRankFactorization::orthonormality_defect() const {
    if (rank() == 0) return 0.0;
    const Index k = rank();
    DenseMatrix gl = left.transpose() * left - DenseMatrix::Identity(k, k);
    DenseMatrix gr = right.transpose() * right - DenseMatrix::Identity(k, k);
    return std::max(gl.cwiseAbs().maxCoeff(), gr.cwiseAbs().maxCoeff());
}

BlockOperator as_block_operator(const StructuredOperator& op) {
    BlockOperator b;
    b.rows = op.rows();
    b.cols = op.cols();
    b.apply = [&op](const DenseMatrix& x) { return op.apply(x); };
    b.apply_transpose = [&op](const DenseMatrix& x) {
        return op.apply_transpose(x);
    };
    return b;
}

BlockOperator as_block_operator(const DenseMatrix& a) {
    BlockOperator b;
    b.rows = a.rows();
    b.cols = a.cols();
    b.apply = [&a](const DenseMatrix& x) -> DenseMatrix { return a * x; };
    b.apply_transpose = [&a](const DenseMatrix& x) -> DenseMatrix {
        return a.transpose() * x;
    };
    return b;
}

namespace {

// Fixed seed: truncated_svd is a pure function of its inputs, so the
// starting block must not depend on ambient state.
constexpr std::uint64_t kStartSeed = 0x53564453ULL;

DenseMatrix random_block(Index n, Index b, Rng& rng) {
    DenseMatrix x(n, b);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < b; ++j) x(i, j) = rng.next_normal();
    return x;
}

// Modified Gram-Schmidt of a block against an existing basis and itself,
// with the triangular coefficients returned. Columns that vanish (Krylov
// breakdown, rank-deficient operators) are replaced by fresh random
// directions; their true, near-zero coefficients are kept in r_out.
DenseMatrix purified_block(DenseMatrix w, const DenseMatrix& basis,
                           Index basis_cols, double scale, DenseMatrix& r_out,
                           Rng& rng) {
    const Index n = w.rows();
    const Index b = w.cols();
    DenseMatrix q(n, b);
    r_out = DenseMatrix::Zero(b, b);
    const double tiny = 1e-13 * scale + 1e-300;
    for (Index j = 0; j < b; ++j) {
        Vector v = w.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            if (basis_cols > 0) {
                Vector proj = basis.leftCols(basis_cols).transpose() * v;
                v.noalias() -= basis.leftCols(basis_cols) * proj;
            }
            for (Index i = 0; i < j; ++i) {
                const double c = q.col(i).dot(v);
                if (pass == 0) r_out(i, j) += c;
                v.noalias() -= c * q.col(i);
            }
        }
        double norm = v.norm();
        r_out(j, j) = norm;
        if (norm <= tiny) {
            // breakdown: inject a random direction; the recorded
            // coefficient stays at the true (negligible) value
            for (int attempt = 0; attempt < 3 && norm <= tiny; ++attempt) {
                for (Index i = 0; i < n; ++i) v(i) = rng.next_normal();
                for (int pass = 0; pass < 2; ++pass) {
                    if (basis_cols > 0) {
                        Vector proj =
                            basis.leftCols(basis_cols).transpose() * v;
                        v.noalias() -= basis.leftCols(basis_cols) * proj;
                    }
                    for (Index i = 0; i < j; ++i)
                        v.noalias() -= q.col(i).dot(v) * q.col(i);
                }
                norm = v.norm();
            }
            r_out(j, j) = 0.0;
        }
        q.col(j) = norm > 0.0 ? Vector(v / norm) : Vector(Vector::Zero(n));
    }
    return q;
}

} // namespace

// Block Golub-Kahan bidiagonalization with full reorthogonalization and
// Rayleigh-Ritz extraction from the accumulated Krylov space. The projected
// matrix is kept dense so that breakdown replacements stay exact.
TruncatedSvdResult truncated_svd_full(const BlockOperator& op, Index k,
                                      double tol, const SvdOptions& options) {
    const Index mindim = std::min(op.rows, op.cols);
    if (k < 1 || k > mindim)
        throw std::invalid_argument("truncated_svd: k out of range");
    if (!(tol > 0.0))
        throw std::invalid_argument("truncated_svd: tol must be positive");

    const Index b = std::min(mindim, std::max<Index>(3, k + 2));
    const long cap = options.cap_multiplier * static_cast<long>(k);
    const Index max_blocks =
        std::min<Index>((mindim + b - 1) / b + 1,
                        static_cast<Index>(cap / (2 * b)) + 2);

    TruncatedSvdResult res;
    Rng rng(kStartSeed);

    DenseMatrix u_basis(op.rows, max_blocks * b);
    DenseMatrix v_basis(op.cols, (max_blocks + 1) * b);
    DenseMatrix big = DenseMatrix::Zero(max_blocks * b, max_blocks * b);

    DenseMatrix coeff;
    v_basis.leftCols(b) =
        purified_block(random_block(op.cols, b, rng), v_basis, 0, 1.0, coeff, rng);

    DenseMatrix y = op.apply(v_basis.leftCols(b));
    res.matvecs += b;
    double scale = std::max(y.norm(), 1e-300);
    DenseMatrix r0;
    u_basis.leftCols(b) = purified_block(std::move(y), u_basis, 0, scale, r0, rng);
    big.topLeftCorner(b, b) = r0;

    Index m = 1;  // completed block columns of the projected matrix
    Vector sigma;
    DenseMatrix ritz_p, ritz_q;
    bool converged = false;

    // Full Ritz extraction costs O((m b)^3); run it every loop while the
    // space is small and on a sparse schedule at depth, plus whenever a
    // stop is forced.
    auto ritz_due = [](Index blocks) {
        if (blocks <= 12) return true;
        if (blocks <= 40) return blocks % 5 == 0;
        return blocks % 10 == 0;
    };

    bool dense_exact = false;
    while (true) {
        // The frame cannot grow past the small dimension. When the Krylov
        // space gets there, finish with a dense factorization, charged to
        // the same matvec budget.
        if ((m + 1) * b > mindim) {
            if (res.matvecs + op.cols > cap && !options.best_effort)
                throw SvdConvergenceError(
                    "truncated_svd: no convergence within matvec budget",
                    res.matvecs, res.iterations);
            dense_exact = true;
            break;
        }

        ++res.iterations;
        // extend the right space: W = A^T U_{m-1} minus its basis component
        DenseMatrix w =
            op.apply_transpose(u_basis.middleCols((m - 1) * b, b));
        res.matvecs += b;
        DenseMatrix w_coeff = v_basis.leftCols(m * b).transpose() * w;
        w.noalias() -= v_basis.leftCols(m * b) * w_coeff;
        DenseMatrix c;
        v_basis.middleCols(m * b, b) =
            purified_block(std::move(w), v_basis, m * b, scale, c, rng);

        const bool budget_out = res.matvecs >= cap || m + 1 >= max_blocks;

        if (ritz_due(m) || budget_out) {
            // Rayleigh-Ritz on the projected matrix
            Eigen::BDCSVD<DenseMatrix> ritz(
                big.topLeftCorner(m * b, m * b),
                Eigen::ComputeFullU | Eigen::ComputeFullV);
            sigma = ritz.singularValues();
            ritz_p = ritz.matrixU();
            ritz_q = ritz.matrixV();
            const double sigma1 = sigma(0);
            scale = std::max(scale, sigma1);

            if (sigma1 == 0.0) {
                converged = true;  // zero operator
                break;
            }
            double worst = 0.0;
            for (Index i = 0; i < k; ++i)
                worst = std::max(worst, (c * ritz_p.col(i).tail(b)).norm());
            if (worst <= tol * sigma1) {
                converged = true;
                break;
            }
        }
        if (budget_out) {
            if (!options.best_effort)
                throw SvdConvergenceError(
                    "truncated_svd: no convergence within matvec budget",
                    res.matvecs, res.iterations);
            converged = false;
            break;
        }

        // extend the left space: Z = A V_m minus its basis component
        DenseMatrix z = op.apply(v_basis.middleCols(m * b, b));
        res.matvecs += b;
        DenseMatrix z_coeff = u_basis.leftCols(m * b).transpose() * z;
        z.noalias() -= u_basis.leftCols(m * b) * z_coeff;
        DenseMatrix r;
        u_basis.middleCols(m * b, b) =
            purified_block(std::move(z), u_basis, m * b, scale, r, rng);
        big.block(0, m * b, m * b, b) = z_coeff;
        big.block(m * b, m * b, b, b) = r;
        ++m;
    }

    LowRankFactorization f;
    if (dense_exact) {
        DenseMatrix dense = op.apply(DenseMatrix::Identity(op.cols, op.cols));
        res.matvecs += op.cols;
        res.converged = true;
        Eigen::BDCSVD<DenseMatrix> svd(dense, Eigen::ComputeThinU |
                                                 Eigen::ComputeThinV);
        f.left = svd.matrixU().leftCols(k);
        f.values = svd.singularValues().head(k);
        f.right = svd.matrixV().leftCols(k);
    } else {
        res.converged = converged;
        f.left = u_basis.leftCols(m * b) * ritz_p.leftCols(k);
        f.right = v_basis.leftCols(m * b) * ritz_q.leftCols(k);
        f.values = sigma.head(k);
    }
    // Values below the resolution guaranteed by tol are reported as exact
    // zeros with their (arbitrary orthonormal) completion vectors kept.
    const double snap = tol * f.values(0);
    for (Index i = 0; i < f.values.size(); ++i)
        if (f.values(i) <= snap) f.values(i) = 0.0;
    res.factorization = std::move(f);
    return res;
}

LowRankFactorization truncated_svd(const StructuredOperator& op, Index k,
                                   double tol) {
    return truncated_svd_full(as_block_operator(op), k, tol).factorization;
}

LowRankFactorization truncated_svd(const DenseMatrix& a, Index k, double tol) {
    return truncated_svd_full(as_block_operator(a), k, tol).factorization;
}

namespace {
constexpr double kProjectTol = 1e-10;
}

LowRankFactorization rank_k_project(const StructuredOperator& op, Index k) {
    return truncated_svd(op, k, kProjectTol);
}

LowRankFactorization rank_k_project(const DenseMatrix& a, Index k) {
    return truncated_svd(a, k, kProjectTol);
}

double spectral_norm(const StructuredOperator& op, double tol) {
    return truncated_svd(op, 1, tol).values(0);
}

double spectral_norm(const DenseMatrix& a, double tol) {
    if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    return truncated_svd(a, 1, tol).values(0);
}

double incoherence(const LowRankFactorization& f) {
    const Index r_eff = f.effective_rank();
    if (r_eff == 0)
        throw std::invalid_argument("incoherence: all-zero factorization");
    const double n1 = static_cast<double>(f.rows());
    const double n2 = static_cast<double>(f.cols());
    double worst_left = 0.0, worst_right = 0.0;
    for (Index i = 0; i < f.rows(); ++i)
        worst_left = std::max(worst_left, f.left.row(i).head(r_eff).norm());
    for (Index j = 0; j < f.cols(); ++j)
        worst_right = std::max(worst_right, f.right.row(j).head(r_eff).norm());
    const double r = static_cast<double>(r_eff);
    return std::max(std::sqrt(n1 / r) * worst_left,
                    std::sqrt(n2 / r) * worst_right);
}

DenseMatrix symmetric_dilation(const DenseMatrix& m) {
    const Index n1 = m.rows(), n2 = m.cols();
    DenseMatrix d = DenseMatrix::Zero(n1 + n2, n1 + n2);
    d.topRightCorner(n1, n2) = m;
    d.bottomLeftCorner(n2, n1) = m.transpose();
    return d;
}

} // namespace stsvp
