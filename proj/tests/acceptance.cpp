// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Thresholds are pinned here, not configurable.

#include "stsvp/io.hpp"
#include "stsvp/perturbation_lab.hpp"
#include "stsvp/stagewise.hpp"
#include "stsvp/svp.hpp"
#include "stsvp/synthetic.hpp"

#include "oracle.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace stsvp;

namespace {

int failures = 0;

void report(int number, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", number,
                name, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// --- 1: oracle equivalence -------------------------------------------------

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    double worst_sigma = 0.0, worst_recon = 0.0;
    for (int trial = 0; trial < 100 && pass; ++trial) {
        const Index n1 = 20 + (trial * 7) % 41;           // 20..60
        const Index n2 = (trial % 3 == 0) ? n1 : 20 + (trial * 11) % 41;
        const Index k = std::min<Index>(5, std::min(n1, n2));
        DenseMatrix a = oracle::gaussian(n1, n2, 10000 + trial);
        oracle::DenseSvd ref = oracle::full_svd(a);

        LowRankFactorization f = truncated_svd(a, k, 1e-10);
        for (Index i = 0; i < k; ++i) {
            const double rel = std::abs(f.values(i) - ref.s(i)) / ref.s(i);
            worst_sigma = std::max(worst_sigma, rel);
            if (rel > 1e-8) pass = false;
        }
        LowRankFactorization p = rank_k_project(a, k);
        const double err = (a - p.densify()).norm();
        const double expect = oracle::tail_frobenius(ref, k);
        const double rel = std::abs(err - expect) / a.norm();
        worst_recon = std::max(worst_recon, rel);
        if (rel > 1e-8) pass = false;
    }
    const double secs = seconds_since(t0);
    if (secs >= 10.0) pass = false;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "worst sigma rel %.2e, worst recon rel %.2e, %.1fs",
                  worst_sigma, worst_recon, secs);
    report(1, "truncated SVD matches the dense oracle", pass, buf);
}

// --- 2: exact recovery at full observation ----------------------------------

void criterion2() {
    bool pass = true;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 40 + (trial * 13) % 161;  // 40..200
        const Index r = 1 + trial % 4;
        SyntheticSpec spec;
        spec.n1 = spec.n2 = n;
        spec.rank = r;
        spec.spectrum = SyntheticSpec::kappa_spectrum(r, 1.0 + trial % 3);
        spec.seed = 20000 + trial;
        auto [m, truth] = generate_synthetic(spec);
        (void)truth;
        ObservationSet omega = bernoulli_sample(m, 1.0, spec.seed + 1);

        SvpConfig sc;
        sc.rank = r;
        sc.target_error = 1e-6;
        sc.seed = spec.seed;
        auto [m_svp, tr1] = svp_solve(omega, sc);
        (void)tr1;
        StSvpConfig tc;
        tc.rank = r;
        tc.target_error = 1e-6;
        tc.incoherence_mu = incoherence(truth);
        tc.seed = spec.seed;
        auto [m_st, tr2] = stsvp_solve(omega, tc);
        (void)tr2;
        const double e1 = oracle::full_svd(m_svp.densify() - m).s(0);
        const double e2 = oracle::full_svd(m_st.densify() - m).s(0);
        worst = std::max({worst, e1, e2});
        if (e1 > 1e-8 || e2 > 1e-8) pass = false;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worst spectral error %.2e", worst);
    report(2, "both solvers recover exactly at full observation", pass, buf);
}

// --- 3: desk-scale recovery ---------------------------------------------------

void criterion3() {
    bool pass = true;
    std::string detail;
    for (double kappa : {2.0, 5.0}) {
        double err_sum = 0.0;
        double worst_secs = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            SyntheticSpec spec;
            spec.n1 = spec.n2 = 500;
            spec.rank = 5;
            spec.spectrum = SyntheticSpec::kappa_spectrum(5, kappa);
            spec.seed = 30000 + trial + static_cast<int>(kappa) * 100;
            auto [m, truth] = generate_synthetic(spec);
            const double p = sampling_probability(500, 500, 5, 5.0);
            ObservationSet omega = bernoulli_sample(m, p, spec.seed + 1);

            StSvpConfig tc;
            tc.rank = 5;
            tc.target_error = 1e-4;
            tc.incoherence_mu = incoherence(truth);
            tc.seed = spec.seed;
            tc.svd_tol = 1e-8;
            auto t0 = std::chrono::steady_clock::now();
            auto [mhat, trace] = stsvp_solve(omega, tc);
            (void)trace;
            worst_secs = std::max(worst_secs, seconds_since(t0));
            DenseMatrix diff = mhat.densify() - m;
            const double denom = spec.spectrum(0);
            err_sum += (diff.cwiseAbs().maxCoeff() == 0.0
                            ? 0.0
                            : oracle::full_svd(diff).s(0)) /
                       denom;
        }
        const double mean_err = err_sum / 5.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "kappa=%g mean err %.2e worst %.1fs; ",
                      kappa, mean_err, worst_secs);
        detail += buf;
        if (mean_err > 1e-3 || worst_secs >= 120.0) pass = false;
    }
    report(3, "St-SVP reaches 1e-3 at n=500 r=5 sample factor 5", pass, detail);
}

// --- 4: condition-number robustness -------------------------------------------

void criterion4() {
    // Equal sample budgets at both condition numbers, in the
    // partial-convergence regime where the conditioning of the gradient
    // operator actually reaches the inner factorizations (sample factor
    // 4.5, a three-iteration schedule, tight inner tolerance). Build-time
    // measurements: SVP recovery degrades from ~0.02 to ~0.5 relative
    // error and its matvec count grows ~1.9x; the stagewise count stays
    // flat (~0.95x). The >= 3x bound asserted below is not reached by this
    // implementation in any measured configuration; see the bench data.
    const double factor = 4.5;
    const int trials = 3;
    double svp_mv[2] = {0.0, 0.0};
    double st_mv[2] = {0.0, 0.0};
    double svp_err[2] = {0.0, 0.0};
    int idx = 0;
    for (double kappa : {2.0, 50.0}) {
        for (int trial = 0; trial < trials; ++trial) {
            SyntheticSpec spec;
            spec.n1 = spec.n2 = 500;
            spec.rank = 5;
            spec.spectrum = SyntheticSpec::kappa_spectrum(5, kappa);
            spec.seed = 40000 + trial + static_cast<int>(kappa) * 1000;
            auto [m, truth] = generate_synthetic(spec);
            const double p = sampling_probability(500, 500, 5, factor);
            ObservationSet omega = bernoulli_sample(m, p, spec.seed + 1);

            SvpConfig sc;
            sc.rank = 5;
            sc.target_error = 1e-4;
            sc.seed = spec.seed;
            sc.svd_tol = 1e-10;
            sc.max_outer_iters = 3;
            auto [m1, tr1] = svp_solve(omega, sc);
            svp_mv[idx] += static_cast<double>(tr1.total_matvecs);
            svp_err[idx] +=
                (m1.densify() - m).norm() / m.norm() / static_cast<double>(trials);

            StSvpConfig tc;
            tc.rank = 5;
            tc.target_error = 1e-4;
            tc.incoherence_mu = incoherence(truth);
            tc.seed = spec.seed;
            tc.svd_tol = 1e-10;
            auto [m2, tr2] = stsvp_solve(omega, tc);
            (void)m2;
            st_mv[idx] += static_cast<double>(tr2.total_matvecs);
        }
        ++idx;
    }
    const double svp_growth = svp_mv[1] / svp_mv[0];
    const double st_growth = st_mv[1] / st_mv[0];
    const bool pass = svp_growth >= 3.0 && st_growth < 2.0;
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "SVP matvec growth %.2fx (need >= 3), St-SVP %.2fx (need < 2); "
                  "SVP err %.2g -> %.2g across kappa",
                  svp_growth, st_growth, svp_err[0], svp_err[1]);
    report(4, "kappa sensitivity of matvec counts", pass, buf);
}

// --- 5: deterministic lemma suites ---------------------------------------------

void criterion5() {
    bool pass = true;
    std::string detail;
    auto run_timed = [&](const char* label, auto&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        lab::CheckReport rep = fn();
        const double secs = seconds_since(t0);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s: %ld viol %.1fs; ", label,
                      rep.violations, secs);
        detail += buf;
        if (rep.violations != 0 || secs >= 60.0) pass = false;
    };
    run_timed("weyl", [] { return lab::weyl_suite(25, 500, 51); });
    run_timed("perp", [] { return lab::perp_bound_suite(30, 500, 52); });
    run_timed("lemma11", [] { return lab::lemma11_suite(30, 3, 500, 53); });
    run_timed("lemma12", [] { return lab::lemma12_suite(24, 500, 54); });
    run_timed("davis_kahan",
              [] { return lab::davis_kahan_suite(30, 2000, 10.0, 55); });
    run_timed("moments", [] { return lab::moment_suite(64, 0.25, 0, 56); });
    report(5, "deterministic perturbation lemmas hold", pass, detail);
}

// --- 6: probabilistic lemma checks with negative controls ----------------------

void criterion6() {
    bool pass = true;
    std::string detail;
    auto frac_ok = [&](const char* label, const lab::CheckReport& rep,
                       long denom) {
        const double frac =
            static_cast<double>(rep.violations) / static_cast<double>(denom);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s %.1f%%; ", label, 100.0 * frac);
        detail += buf;
        if (frac > 0.01) pass = false;
    };
    auto control_ok = [&](const char* label, const lab::CheckReport& rep) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s ctrl %ld; ", label, rep.violations);
        detail += buf;
        if (rep.violations < 1) pass = false;
    };

    lab::MomentMatrixSpec rade200{200, lab::MomentMatrixSpec::Kind::Rademacher, 0.2};
    frac_ok("spectral", lab::check_spectral_bound(rade200, 2.0, 200, 61), 200);
    lab::MomentMatrixSpec broken{200, lab::MomentMatrixSpec::Kind::BrokenScale, 0.2};
    control_ok("spectral", lab::check_spectral_bound(broken, 1.0, 20, 62));

    lab::SymmetricLowRankSpec m3;
    m3.n = 200;
    m3.eigenvalues = (Vector(3) << 1.0, 0.8, 0.6).finished();
    const double beta = 0.6 / (200.0 * std::sqrt(2.0)) * 0.9;
    frac_ok("decay",
            lab::check_error_decay(m3, rade200, 3, beta, 2.0, 200, 63), 200);
    lab::SymmetricLowRankSpec ones;
    ones.n = 400;
    ones.eigenvalues = Vector::Constant(1, 1.0);
    ones.ones_direction = true;
    lab::MomentMatrixSpec aligned{400, lab::MomentMatrixSpec::Kind::BrokenConstant,
                                  0.2};
    control_ok("decay", lab::check_error_decay(ones, aligned, 1,
                                               1.0 / 200.0 * 0.9, 1.0, 5, 64));

    lab::MomentMatrixSpec rade128{128, lab::MomentMatrixSpec::Kind::Rademacher, 0.2};
    frac_ok("hpower",
            lab::check_hpower_bound(rade128, 3, Vector::Ones(128), 8.0, 500, 65),
            500);
    lab::MomentMatrixSpec constant{128, lab::MomentMatrixSpec::Kind::BrokenConstant,
                                   0.2};
    control_ok("hpower", lab::check_hpower_bound(constant, 2, Vector::Ones(128),
                                                 8.0, 5, 66));

    frac_ok("same_sample", lab::same_sample_suite(100, 2, 0.4, 100, 67), 100);
    control_ok("same_sample",
               lab::same_sample_suite(60, 2, 0.4, 20, 68, /*broken=*/true));

    report(6, "probabilistic checks within 1% and controls trip", pass, detail);
}

// --- 7: stage invariant ---------------------------------------------------------

void criterion7() {
    const Index n1 = 300, r = 3;
    Vector spectrum(3);
    spectrum << 1.0, 0.1, 0.01;
    int good_runs = 0;
    for (int trial = 0; trial < 20; ++trial) {
        SyntheticSpec spec;
        spec.n1 = spec.n2 = n1;
        spec.rank = r;
        spec.spectrum = spectrum;
        spec.seed = 70000 + trial;
        auto [m, truth] = generate_synthetic(spec);
        const double mu = incoherence(truth);
        const double p = sampling_probability(n1, n1, r, 7.0);
        ObservationSet omega = bernoulli_sample(m, p, spec.seed + 1);

        StSvpConfig cfg;
        cfg.rank = r;
        cfg.target_error = 1e-5;
        cfg.incoherence_mu = mu;
        cfg.seed = spec.seed;

        // Re-run the stage loop explicitly so the boundary iterates are
        // observable: boundary entering stage k+1 carries a sigma_{k+1}
        // bound.
        const Index n = 2 * n1;
        const long log_n =
            static_cast<long>(std::ceil(std::log2(static_cast<double>(n))));
        std::vector<ObservationSet> subsets;
        const bool full = omega.covers_everything();
        if (!full)
            subsets = partition(omega, 2 * static_cast<std::size_t>(r) *
                                           static_cast<std::size_t>(log_n),
                                derive_seed(cfg.seed, 0x70617274ULL));
        LowRankFactorization x = LowRankFactorization::zero(n1, n1);
        bool all_hold =
            m.cwiseAbs().maxCoeff() <
            4.0 * mu * mu * 9.0 / static_cast<double>(n) * spectrum(0);
        for (Index k = 1; k <= r && all_hold; ++k) {
            std::vector<ObservationSet> stage_subsets;
            for (long t = 0; t < 2 * log_n; ++t)
                stage_subsets.push_back(
                    full ? omega
                         : subsets[static_cast<std::size_t>((k - 1) * 2 * log_n + t)]);
            RunStageResult stage = run_stage(k, x, stage_subsets, omega, cfg);
            x = stage.iterate;
            if (stage.outcome == StageOutcome::Exited) break;
            const double sigma_next = k < r ? spectrum(k) : 0.0;
            if (k < r) {
                const double bound = 4.0 * mu * mu * 9.0 /
                                     static_cast<double>(n) * sigma_next;
                const double err = (x.densify() - m).cwiseAbs().maxCoeff();
                if (!(err < bound)) all_hold = false;
            }
        }
        if (all_hold) ++good_runs;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d/20 runs satisfied every boundary",
                  good_runs);
    report(7, "stage invariant at n=300 r=3", good_runs >= 18, buf);
}

// --- 8: determinism --------------------------------------------------------------

void criterion8() {
    bool pass = true;
    std::string detail;

    Vector spec = SyntheticSpec::kappa_spectrum(3, 2.0);
    SyntheticSpec synth;
    synth.n1 = synth.n2 = 80;
    synth.rank = 3;
    synth.spectrum = spec;
    synth.seed = 80001;
    auto [m, truth] = generate_synthetic(synth);
    (void)truth;
    ObservationSet omega = bernoulli_sample(m, 0.6, 80002);

    StSvpConfig cfg;
    cfg.rank = 3;
    cfg.target_error = 1e-4;
    cfg.incoherence_mu = 2.0;
    cfg.seed = 99;
    auto [x1, t1] = stsvp_solve(omega, cfg);
    auto [x2, t2] = stsvp_solve(omega, cfg);
    io::write_factorization("/tmp/stsvp_acc_a", x1);
    io::write_factorization("/tmp/stsvp_acc_b", x2);
    for (const char* suffix : {".U.txt", ".S.txt", ".V.txt"}) {
        std::ifstream fa(std::string("/tmp/stsvp_acc_a") + suffix);
        std::ifstream fb(std::string("/tmp/stsvp_acc_b") + suffix);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str() != sb.str()) pass = false;
    }
    if (t1.to_log() != t2.to_log()) pass = false;
    detail += pass ? "factorization+trace identical; " : "solver mismatch; ";

    ExperimentConfig ec;
    ec.base.n1 = ec.base.n2 = 50;
    ec.base.rank = 2;
    ec.trials = 2;
    ec.sample_factor = 3.0;
    ec.seed = 424242;
    auto rows1 = run_experiment(SweepAxis::Kappa, {2.0, 5.0}, ec);
    auto rows2 = run_experiment(SweepAxis::Kappa, {2.0, 5.0}, ec);
    std::ostringstream c1, c2;
    write_csv(rows1, c1);
    write_csv(rows2, c2);
    auto strip_wall = [](const std::string& csv) {
        std::istringstream is(csv);
        std::string line, out;
        while (std::getline(is, line)) {
            auto last = line.rfind(',');
            auto prev = line.rfind(',', last - 1);
            out += line.substr(0, prev) + line.substr(last) + "\n";
        }
        return out;
    };
    if (strip_wall(c1.str()) != strip_wall(c2.str())) {
        pass = false;
        detail += "CSV mismatch";
    } else {
        detail += "CSV identical modulo wall_ms";
    }
    report(8, "repeated runs are byte-identical", pass, detail);
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
