#include "stsvp/synthetic.hpp"

#include "stsvp/random.hpp"
#include "stsvp/svd.hpp"

#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace stsvp {

Vector SyntheticSpec::kappa_spectrum(Index rank, double kappa) {
    if (rank < 1 || kappa < 1.0)
        throw std::invalid_argument("kappa_spectrum: need rank >= 1, kappa >= 1");
    Vector s = Vector::Constant(rank, 1.0 / kappa);
    s(0) = 1.0;
    return s;
}

std::pair<DenseMatrix, LowRankFactorization> generate_synthetic(
    const SyntheticSpec& spec) {
    if (spec.rank < 1 || spec.rank > std::min(spec.n1, spec.n2))
        throw std::invalid_argument("generate_synthetic: rank out of range");
    if (spec.spectrum.size() != spec.rank)
        throw std::invalid_argument("generate_synthetic: spectrum size != rank");
    for (Index i = 0; i < spec.rank; ++i) {
        if (!(spec.spectrum(i) > 0.0))
            throw std::invalid_argument("generate_synthetic: spectrum must be positive");
        if (i > 0 && spec.spectrum(i) > spec.spectrum(i - 1))
            throw std::invalid_argument(
                "generate_synthetic: spectrum must be nonincreasing");
    }
    Rng rng(spec.seed);
    auto orthonormal = [&rng](Index n, Index k) {
        DenseMatrix g(n, k);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < k; ++j) g(i, j) = rng.next_normal();
        Eigen::HouseholderQR<DenseMatrix> qr(g);
        return DenseMatrix(qr.householderQ() * DenseMatrix::Identity(n, k));
    };
    LowRankFactorization truth;
    truth.left = orthonormal(spec.n1, spec.rank);
    truth.values = spec.spectrum;
    truth.right = orthonormal(spec.n2, spec.rank);
    return {truth.densify(), std::move(truth)};
}

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "rank") return SweepAxis::Rank;
    if (name == "kappa") return SweepAxis::Kappa;
    if (name == "size") return SweepAxis::Size;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

double sampling_probability(Index n1, Index n2, Index rank, double factor) {
    const double n = static_cast<double>(n1 + n2);
    const double target = factor * n * static_cast<double>(rank) *
                          std::ceil(std::log2(n));
    const double total = static_cast<double>(n1) * static_cast<double>(n2);
    return std::min(1.0, target / total);
}

const char* const kCsvHeader =
    "trial,n1,n2,rank,kappa,sample_factor,omega_size,algorithm,iterations,"
    "matvecs,err_spectral,err_frob,wall_ms,seed";

namespace {

struct SolveOutcome {
    long iterations = 0;
    long matvecs = 0;
    double err_spectral = std::numeric_limits<double>::quiet_NaN();
    double err_frob = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
};

SolveOutcome measure(const DenseMatrix& m, const LowRankFactorization& mhat,
                     const StageTrace& trace, double wall_ms) {
    SolveOutcome out;
    out.matvecs = trace.total_matvecs;
    out.iterations = 0;
    for (const TraceRecord& r : trace.records)
        if (r.phase != Phase::StageII) ++out.iterations;
    DenseMatrix diff = mhat.densify() - m;
    const double m_spec = spectral_norm(m, 1e-6);
    const double diff_spec =
        diff.cwiseAbs().maxCoeff() == 0.0 ? 0.0 : spectral_norm(diff, 1e-6);
    out.err_spectral = m_spec > 0.0 ? diff_spec / m_spec : diff_spec;
    out.err_frob = m.norm() > 0.0 ? diff.norm() / m.norm() : diff.norm();
    out.wall_ms = wall_ms;
    return out;
}

double measured_mu(const LowRankFactorization& truth) {
    return incoherence(truth);
}

} // namespace

std::vector<ExperimentRow> run_experiment(SweepAxis axis,
                                          const std::vector<double>& grid,
                                          const ExperimentConfig& config) {
    if (grid.empty())
        throw std::invalid_argument("run_experiment: empty grid");
    const std::size_t points = grid.size();
    const std::size_t per_point = static_cast<std::size_t>(config.trials);
    std::vector<ExperimentRow> rows(points * per_point * 2);

    const std::int64_t total = static_cast<std::int64_t>(points * per_point);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t flat = 0; flat < total; ++flat) {
        const std::size_t gi = static_cast<std::size_t>(flat) / per_point;
        const std::size_t trial = static_cast<std::size_t>(flat) % per_point;
        const double g = grid[gi];

        SyntheticSpec spec = config.base;
        double kappa = config.kappa;
        switch (axis) {
            case SweepAxis::Rank:
                spec.rank = static_cast<Index>(g);
                if (config.kappa_equals_rank) kappa = g;
                break;
            case SweepAxis::Kappa:
                kappa = g;
                break;
            case SweepAxis::Size:
                spec.n1 = spec.n2 = static_cast<Index>(g);
                break;
        }
        if (kappa > 0.0 || spec.spectrum.size() != spec.rank)
            spec.spectrum =
                SyntheticSpec::kappa_spectrum(spec.rank, std::max(1.0, kappa));
        const std::uint64_t run_seed =
            derive_seed(config.seed, static_cast<std::uint64_t>(flat));
        spec.seed = run_seed;

        auto [m, truth] = generate_synthetic(spec);
        const double p =
            sampling_probability(spec.n1, spec.n2, spec.rank, config.sample_factor);
        ObservationSet omega = bernoulli_sample(m, p, derive_seed(run_seed, 11));

        ExperimentRow base_row;
        base_row.trial = static_cast<long>(trial);
        base_row.n1 = spec.n1;
        base_row.n2 = spec.n2;
        base_row.rank = spec.rank;
        base_row.kappa = spec.spectrum(0) / spec.spectrum(spec.rank - 1);
        base_row.sample_factor = config.sample_factor;
        base_row.omega_size = static_cast<long>(omega.size());
        base_row.seed = run_seed;

        ExperimentRow svp_row = base_row;
        svp_row.algorithm = "svp";
        try {
            SvpConfig sc;
            sc.rank = spec.rank;
            sc.target_error = config.eps;
            sc.svd_tol = config.svd_tol;
            sc.seed = run_seed;
            auto start = std::chrono::steady_clock::now();
            auto [mhat, trace] = svp_solve(omega, sc);
            const double ms =
                std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
            SolveOutcome o = measure(m, mhat, trace, ms);
            svp_row.iterations = o.iterations;
            svp_row.matvecs = o.matvecs;
            svp_row.err_spectral = o.err_spectral;
            svp_row.err_frob = o.err_frob;
            svp_row.wall_ms = o.wall_ms;
        } catch (const std::exception&) {
            // failure sentinel: NaN errors, zero counters
        }

        ExperimentRow st_row = base_row;
        st_row.algorithm = "stsvp";
        try {
            StSvpConfig tc;
            tc.rank = spec.rank;
            tc.target_error = config.eps;
            tc.incoherence_mu =
                config.mu > 0.0 ? config.mu : measured_mu(truth);
            tc.oversampling_alpha = config.alpha;
            tc.gap_exponent = config.gap_exponent;
            tc.svd_tol = config.svd_tol;
            tc.seed = run_seed;
            auto start = std::chrono::steady_clock::now();
            auto [mhat, trace] = stsvp_solve(omega, tc);
            const double ms =
                std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
            SolveOutcome o = measure(m, mhat, trace, ms);
            st_row.iterations = o.iterations;
            st_row.matvecs = o.matvecs;
            st_row.err_spectral = o.err_spectral;
            st_row.err_frob = o.err_frob;
            st_row.wall_ms = o.wall_ms;
        } catch (const std::exception&) {
        }

        rows[static_cast<std::size_t>(flat) * 2] = std::move(svp_row);
        rows[static_cast<std::size_t>(flat) * 2 + 1] = std::move(st_row);
    }
    return rows;
}

void write_csv(const std::vector<ExperimentRow>& rows, std::ostream& os) {
    os << kCsvHeader << '\n';
    char buf[512];
    for (const ExperimentRow& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%ld,%lld,%lld,%lld,%.17g,%.17g,%ld,%s,%ld,%ld,%.17g,%.17g,"
                      "%.6g,%llu",
                      r.trial, static_cast<long long>(r.n1),
                      static_cast<long long>(r.n2), static_cast<long long>(r.rank),
                      r.kappa, r.sample_factor, r.omega_size,
                      r.algorithm.c_str(), r.iterations, r.matvecs,
                      r.err_spectral, r.err_frob, r.wall_ms,
                      static_cast<unsigned long long>(r.seed));
        os << buf << '\n';
    }
}

} // namespace stsvp
