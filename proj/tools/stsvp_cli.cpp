// Command-line harness: synthetic instance generation, observation
// sampling, solver runs, lemma-lab checks, and CSV experiment sweeps.
//
// Exit codes: 0 success, 1 argument error, 2 solver/check failure.

#include "stsvp/io.hpp"
#include "stsvp/perturbation_lab.hpp"
#include "stsvp/stagewise.hpp"
#include "stsvp/svp.hpp"
#include "stsvp/synthetic.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace stsvp;

namespace {

Vector parse_spectrum(const std::vector<double>& values, Index rank,
                      double kappa) {
    if (!values.empty()) {
        Vector s(static_cast<Index>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i)
            s(static_cast<Index>(i)) = values[i];
        return s;
    }
    return SyntheticSpec::kappa_spectrum(rank, kappa > 0.0 ? kappa : 1.0);
}

int run_synth(Index n1, Index n2, Index rank,
              const std::vector<double>& spectrum, double kappa,
              std::uint64_t seed, const std::string& out) {
    SyntheticSpec spec;
    spec.n1 = n1;
    spec.n2 = n2;
    spec.rank = rank;
    spec.spectrum = parse_spectrum(spectrum, rank, kappa);
    spec.seed = seed;
    auto [m, truth] = generate_synthetic(spec);
    io::write_matrix_file(out, m);
    io::write_factorization(out + ".gt", truth);
    std::cout << "wrote " << out << " and ground truth " << out
              << ".gt.{U,S,V}.txt\n";
    return 0;
}

int run_sample(const std::string& in, double p, double sample_factor,
               Index rank, std::uint64_t seed, const std::string& out) {
    DenseMatrix m = io::read_matrix_file(in);
    double prob = p;
    if (prob < 0.0) {
        if (rank < 1)
            throw CLI::ValidationError(
                "--rank is required when sampling by --sample-factor");
        prob = sampling_probability(m.rows(), m.cols(), rank, sample_factor);
    }
    ObservationSet omega = bernoulli_sample(m, prob, seed);
    io::write_observations_file(out, omega);
    std::cout << "wrote " << omega.size() << " observations (p=" << prob
              << ") to " << out << "\n";
    return 0;
}

int run_solve(const std::string& algo, const std::string& obs, Index rank,
              double eps, double mu, double alpha, int gap_exponent,
              double svd_tol, std::uint64_t seed, const std::string& out,
              const std::string& trace_path) {
    ObservationSet omega = io::read_observations_file(obs);
    LowRankFactorization mhat;
    StageTrace trace;
    if (algo == "svp") {
        SvpConfig cfg;
        cfg.rank = rank;
        cfg.target_error = eps;
        cfg.svd_tol = svd_tol;
        cfg.seed = seed;
        std::tie(mhat, trace) = svp_solve(omega, cfg);
    } else {
        StSvpConfig cfg;
        cfg.rank = rank;
        cfg.target_error = eps;
        if (mu > 0.0) {
            cfg.incoherence_mu = mu;
        } else {
            cfg.mu_mode = MuMode::Estimate;
        }
        cfg.oversampling_alpha = alpha;
        cfg.gap_exponent = gap_exponent;
        cfg.svd_tol = svd_tol;
        cfg.seed = seed;
        std::tie(mhat, trace) = stsvp_solve(omega, cfg);
    }
    io::write_factorization(out, mhat);
    if (!trace_path.empty()) {
        std::ofstream ts(trace_path);
        ts << trace.to_log();
    }
    std::cout << "solved with " << algo << ": rank " << mhat.rank()
              << ", matvecs " << trace.total_matvecs
              << (trace.budget_exhausted ? ", budget exhausted" : "") << "\n";
    return 0;
}

int run_bench(const std::string& sweep, const std::vector<double>& grid,
              Index n1, Index n2, Index rank, double kappa,
              bool kappa_equals_rank, double sample_factor, double eps,
              double mu, double alpha, int gap_exponent, long trials,
              std::uint64_t seed, const std::string& out) {
    ExperimentConfig cfg;
    cfg.base.n1 = n1;
    cfg.base.n2 = n2;
    cfg.base.rank = rank;
    cfg.sample_factor = sample_factor;
    cfg.eps = eps;
    cfg.mu = mu;
    cfg.alpha = alpha;
    cfg.gap_exponent = gap_exponent;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.kappa = kappa;
    cfg.kappa_equals_rank = kappa_equals_rank;
    auto rows = run_experiment(sweep_axis_from_name(sweep), grid, cfg);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    write_csv(rows, os);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
    return 0;
}

int run_verify(const std::string& check, long trials, std::uint64_t seed,
               Index n, double alpha, double c, double p) {
    lab::CheckReport rep;
    if (check == "weyl") {
        rep = lab::weyl_suite(n > 0 ? n : 20, trials, seed);
    } else if (check == "davis_kahan") {
        rep = lab::davis_kahan_suite(n > 0 ? n : 30, trials, c, seed);
    } else if (check == "perp_bound") {
        rep = lab::perp_bound_suite(n > 0 ? n : 25, trials, seed);
    } else if (check == "moment_conditions") {
        rep = lab::moment_suite(n > 0 ? n : 50, p, trials, seed);
    } else if (check == "spectral_bound") {
        lab::MomentMatrixSpec spec{n > 0 ? n : 200,
                                   lab::MomentMatrixSpec::Kind::Rademacher, p};
        rep = lab::check_spectral_bound(spec, alpha, trials, seed);
    } else if (check == "error_decay") {
        lab::SymmetricLowRankSpec m_spec;
        m_spec.n = n > 0 ? n : 200;
        m_spec.eigenvalues = (Vector(3) << 1.0, 0.8, 0.6).finished();
        lab::MomentMatrixSpec h{m_spec.n,
                                lab::MomentMatrixSpec::Kind::Rademacher, p};
        const double beta = 0.6 / (200.0 * std::sqrt(alpha)) * 0.9;
        rep = lab::check_error_decay(m_spec, h, 3, beta, alpha, trials, seed);
    } else if (check == "hpower") {
        const Index nn = n > 0 ? n : 128;
        lab::MomentMatrixSpec spec{nn, lab::MomentMatrixSpec::Kind::Rademacher,
                                   p};
        rep = lab::check_hpower_bound(spec, 3, Vector::Ones(nn), c, trials,
                                      seed);
    } else if (check == "same_sample_decay") {
        rep = lab::same_sample_suite(n > 0 ? n : 100, 2, p > 0.0 ? p : 0.4,
                                     trials, seed);
    } else if (check == "lemma11") {
        rep = lab::lemma11_suite(n > 0 ? n : 30, 3, trials, seed);
    } else if (check == "lemma12") {
        rep = lab::lemma12_suite(n > 0 ? n : 20, trials, seed);
    } else {
        throw CLI::ValidationError("unknown check: " + check);
    }
    std::cout << rep.to_line() << "\n";
    return rep.violations == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank matrix completion toolkit (SVP / stagewise SVP)"};
    app.require_subcommand(1);

    // shared option storage
    Index n1 = 100, n2 = 100, rank = 1;
    std::vector<double> spectrum;
    double kappa = -1.0, sample_factor = 5.0, eps = 1e-4, mu = -1.0,
           alpha = 1.0, p = -1.0, c = 8.0;
    int gap_exponent = 2;
    double svd_tol = 1e-8;
    std::uint64_t seed = 0;
    long trials = 5;
    std::string out = "out.txt", in, obs, algo = "stsvp", sweep = "rank",
                check, trace_path;
    std::vector<double> grid;
    bool kappa_equals_rank = false;

    auto* synth = app.add_subcommand("synth", "generate a synthetic instance");
    synth->add_option("--n1", n1);
    synth->add_option("--n2", n2);
    synth->add_option("--rank", rank);
    synth->add_option("--spectrum", spectrum, "explicit singular values");
    synth->add_option("--kappa", kappa, "sigma_1=1, sigma_i=1/kappa");
    synth->add_option("--seed", seed);
    synth->add_option("--out", out)->required();

    auto* sample = app.add_subcommand("sample", "sample observations from a matrix file");
    sample->add_option("--in", in)->required();
    sample->add_option("--p", p, "Bernoulli probability");
    sample->add_option("--sample-factor", sample_factor);
    sample->add_option("--rank", rank);
    sample->add_option("--seed", seed);
    sample->add_option("--out", out)->required();

    auto* solve = app.add_subcommand("solve", "run a solver on an observation file");
    solve->add_option("--algo", algo)->check(CLI::IsMember({"svp", "stsvp"}));
    solve->add_option("--obs", obs)->required();
    solve->add_option("--rank", rank)->required();
    solve->add_option("--eps", eps);
    solve->add_option("--mu", mu, "incoherence bound; omit to estimate");
    solve->add_option("--alpha", alpha);
    solve->add_option("--gap-exponent", gap_exponent);
    solve->add_option("--svd-tol", svd_tol);
    solve->add_option("--seed", seed);
    solve->add_option("--out", out)->required();
    solve->add_option("--trace", trace_path);

    auto* bench = app.add_subcommand("bench", "CSV experiment sweep");
    bench->add_option("--sweep", sweep)->check(CLI::IsMember({"rank", "kappa", "size"}));
    bench->add_option("--grid", grid, "sweep values")->required();
    bench->add_option("--n1", n1);
    bench->add_option("--n2", n2);
    bench->add_option("--rank", rank);
    bench->add_option("--kappa", kappa);
    bench->add_flag("--kappa-equals-rank", kappa_equals_rank);
    bench->add_option("--sample-factor", sample_factor);
    bench->add_option("--eps", eps);
    bench->add_option("--mu", mu);
    bench->add_option("--alpha", alpha);
    bench->add_option("--gap-exponent", gap_exponent);
    bench->add_option("--trials", trials);
    bench->add_option("--seed", seed);
    bench->add_option("--out", out)->required();

    auto* verify = app.add_subcommand("verify", "run a perturbation-lab check");
    verify->add_option("--check", check)->required();
    verify->add_option("--trials", trials);
    verify->add_option("--seed", seed);
    verify->add_option("--n", n1);
    verify->add_option("--alpha", alpha);
    verify->add_option("--c", c);
    verify->add_option("--p", p);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (synth->parsed())
            return run_synth(n1, n2, rank, spectrum, kappa, seed, out);
        if (sample->parsed())
            return run_sample(in, p, sample_factor, rank, seed, out);
        if (solve->parsed())
            return run_solve(algo, obs, rank, eps, mu, alpha, gap_exponent,
                             svd_tol, seed, out, trace_path);
        if (bench->parsed())
            return run_bench(sweep, grid, n1, n2, rank, kappa,
                             kappa_equals_rank, sample_factor, eps, mu, alpha,
                             gap_exponent, trials, seed, out);
        if (verify->parsed())
            return run_verify(check, trials, seed, n1, alpha, c, p);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
