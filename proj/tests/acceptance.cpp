// Empirical acceptance gate: twelve checks over the full benchmark stack,
// one [PASS]/[FAIL] line each, tolerances pinned here. Expensive runs are
// shared across the checks that read them. Exit code is the failure count.
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "fapprox/experiments.hpp"

using namespace fapprox;

namespace {

int failures = 0;

void report(int id, bool pass, const char* fmt, ...) {
    std::printf("[%s] criterion %2d: ", pass ? "PASS" : "FAIL", id);
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::printf("\n");
    std::fflush(stdout);
    if (!pass) ++failures;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

double iqr_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
}

}  // namespace

int main() {
    const double t_start = omp_get_wtime();
    const GridPtr grid = make_grid(1, 1000);
    const GridFunction f = target_function(grid);

    constexpr int kTrials = 100;
    constexpr int kNMax = 100;
    constexpr std::uint64_t kMasterSeed = 0;

    // Shared run A: 100 greedy trials at the benchmark configuration
    // (criteria 1, 2, 3). Seeded like the experiment runner's greedy salt.
    std::vector<GreedyTrace> greedy(kTrials);
    const double t_greedy0 = omp_get_wtime();
    {
        GreedyConfig cfg;  // defaults are the benchmark configuration
        cfg.max_steps = kNMax;
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < kTrials; ++t) {
            Rng rng(child_seed(kMasterSeed, static_cast<std::uint64_t>(t), 1));
            greedy[t] = run_greedy(cfg, f, rng);
        }
    }
    const double greedy_seconds = omp_get_wtime() - t_greedy0;

    // Criterion 1: rate bound on every zero-shortfall trial, at least 90
    // zero-shortfall trials, wall time within 3 minutes.
    {
        const double mp2 = 1.5 * 1.5;
        int zero_shortfall = 0;
        int bound_violations = 0;
        for (const GreedyTrace& tr : greedy) {
            if (tr.shortfall_count() != 0) continue;
            ++zero_shortfall;
            for (int n = 1; n <= kNMax; ++n) {
                const double bound = mp2 * tr.e0_sq / (n * tr.e0_sq + mp2);
                if (tr.steps[n - 1].e_sq > bound) ++bound_violations;
            }
        }
        const bool pass = zero_shortfall >= 90 && bound_violations == 0 &&
                          greedy_seconds <= 180.0;
        report(1, pass,
               "rate bound: %d/100 zero-shortfall trials (need >= 90), "
               "%d bound violations (need 0), %.1fs (cap 180s)",
               zero_shortfall, bound_violations, greedy_seconds);
    }

    // Criterion 2: greedy error shape, median bar_e falls at least 10x
    // from n=5 to n=100.
    {
        std::vector<double> at5(kTrials), at100(kTrials);
        for (int t = 0; t < kTrials; ++t) {
            at5[t] = greedy[t].steps[4].bar_e;
            at100[t] = greedy[t].steps[99].bar_e;
        }
        const double m5 = median_of(at5), m100 = median_of(at100);
        const bool pass = m100 <= 0.10 * m5;
        report(2, pass,
               "error shape: median bar_e(100)=%.4g vs 0.10 x median "
               "bar_e(5)=%.4g",
               m100, 0.10 * m5);
    }

    // Shared run B: 100 random-basis trials, same trial count and grid,
    // with residual-orthogonality instrumentation (criteria 3, 4, 5).
    std::vector<RandomBasisCurve> random_runs(kTrials);
    {
        const ParameterBox box{0.0, 200.0, -200.0, 200.0};
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < kTrials; ++t) {
            Rng rng(child_seed(kMasterSeed, static_cast<std::uint64_t>(t), 2));
            random_runs[t] = run_random_basis(box, f, kNMax, 1e12, rng, true);
        }
    }

    // Criterion 3: greedy beats random in median at n=100 and has the
    // tighter spread at n=50.
    {
        std::vector<double> g100(kTrials), r100(kTrials), g50(kTrials),
            r50(kTrials);
        for (int t = 0; t < kTrials; ++t) {
            g100[t] = greedy[t].steps[99].bar_e;
            r100[t] = random_runs[t].bar_e[99];
            g50[t] = greedy[t].steps[49].bar_e;
            r50[t] = random_runs[t].bar_e[49];
        }
        const double mg = median_of(g100), mr = median_of(r100);
        const double ig = iqr_of(g50), ir = iqr_of(r50);
        const bool pass = mr > mg && ir > ig;
        report(3, pass,
               "ordering: median random %.4g > median greedy %.4g; "
               "IQR(50) random %.4g > greedy %.4g",
               mr, mg, ir, ig);
    }

    // Criterion 4: per-trial random-basis error is nonincreasing, exactly.
    {
        int violations = 0;
        for (const RandomBasisCurve& c : random_runs)
            for (int n = 1; n < kNMax; ++n)
                if (c.bar_e[n] > c.bar_e[n - 1]) ++violations;
        report(4, violations == 0,
               "nestedness: %d nonmonotone steps across %d trials (need 0)",
               violations, kTrials);
    }

    // Criterion 5: every fitted model keeps the residual orthogonal to the
    // retained elements to 1e-8 relative.
    {
        double worst = 0.0;
        for (const RandomBasisCurve& c : random_runs)
            for (double o : c.orth_max) worst = std::max(worst, o);
        report(5, worst <= 1e-8,
               "least-squares optimality: max |<resid, g>|/(|f||g|) = %.3g "
               "(cap 1e-8)",
               worst);
    }

    // Criterion 6: coefficient identity sum(c) = 1 - prod(1 - alpha).
    {
        Rng rng(600);
        double worst = 0.0;
        for (int rep = 0; rep < 1000; ++rep) {
            std::vector<double> alphas(100);
            double prod = 1.0;
            for (double& a : alphas) {
                a = rng.uniform01();
                prod *= 1.0 - a;
            }
            const std::vector<double> c = unroll_coefficients(alphas);
            double sum = 0.0;
            for (double v : c) sum += v;
            worst = std::max(worst, std::abs(sum - (1.0 - prod)));
        }
        report(6, worst <= 1e-12,
               "coefficient identity: max |sum c - (1 - prod(1-a))| = %.3g "
               "(cap 1e-12)",
               worst);
    }

    // Shared run C: Monte-Carlo pointwise estimates at x=0.5, 200 sets per
    // size, wide kernels so the estimator has spread (criteria 7, 8).
    std::vector<VarianceEstimate> mc_table;
    {
        ExperimentPlan mc_plan;
        mc_plan.trials = 200;
        mc_plan.master_seed = kMasterSeed;
        mc_plan.grid_points = 1000;
        mc_plan.mc_alpha = 2.0;
        mc_plan.mc_omega = 2.0;
        mc_plan.mc_x = 0.5;
        mc_plan.mc_ns = {32, 128, 512, 2048};
        mc_table = run_mc_variance(f, mc_plan);
    }

    // Criterion 7: empirical variance decays like 1/n, log-log slope in
    // [-1.4, -0.6].
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int m = static_cast<int>(mc_table.size());
        for (const VarianceEstimate& v : mc_table) {
            const double x = std::log(static_cast<double>(v.n));
            const double y = std::log(v.empirical_var);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const bool pass = slope >= -1.4 && slope <= -0.6;
        report(7, pass,
               "variance law: log-log slope %.4f (window [-1.4, -0.6])",
               slope);
    }

    // Criterion 8: the spread bound holds empirically, coverage within
    // epsilon of the estimator mean is at least 1 - gamma - 0.1 per size.
    {
        bool pass = true;
        double worst_margin = 1e9;
        int worst_n = 0;
        double worst_cov = 0, worst_bar = 0;
        for (const VarianceEstimate& v : mc_table) {
            const double bar = 1.0 - v.gamma - 0.1;
            const double margin = v.coverage_vs_mean - bar;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst_n = v.n;
                worst_cov = v.coverage_vs_mean;
                worst_bar = bar;
            }
            pass = pass && v.coverage_vs_mean >= bar;
        }
        report(8, pass,
               "spread coverage: worst size n=%d coverage %.3f vs bar %.3f "
               "(coverage vs target %.3f at n=%d, diagnostic)",
               worst_n, worst_cov, worst_bar, mc_table.back().coverage_vs_target,
               mc_table.back().n);
    }

    // Criterion 9: network ordering over 20 seeds with the tuned per-size
    // recipes shared with the experiment runner.
    {
        const double t9 = omp_get_wtime();
        constexpr int kSeeds = 20;
        const std::vector<int> ns = {2, 4, 6, 8, 10, 20, 100};
        std::vector<double> mean(ns.size(), 0.0);
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const int n = ns[k];
            double sum = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(+ : sum)
            for (int s = 0; s < kSeeds; ++s) {
                Rng rng(child_seed(9, static_cast<std::uint64_t>(s),
                                   static_cast<std::uint64_t>(n)));
                const TrainResult r =
                    train_mlp(init_mlp(n, 1, rng), f, mlp_full_config(n), rng);
                sum += r.bar_e;
            }
            mean[k] = sum / kSeeds;
        }

        double linear_mean = 0.0;
        {
            const ParameterBox box{0.0, 200.0, -200.0, 200.0};
            const TrainConfig cfg = mlp_linear_config();
#pragma omp parallel for schedule(dynamic) reduction(+ : linear_mean)
            for (int s = 0; s < kSeeds; ++s) {
                Rng rng(child_seed(19, static_cast<std::uint64_t>(s), 0));
                const TrainResult r = train_mlp(
                    init_mlp_frozen_basis(kNMax, 1, box, rng), f, cfg, rng);
                linear_mean += r.bar_e;
            }
            linear_mean /= kSeeds;
        }

        bool decreasing = true;
        for (int k = 1; k <= 4; ++k)
            decreasing = decreasing && mean[k] < mean[k - 1];
        const bool small_ok = mean[4] <= 4e-3;
        const bool large_ok = mean[5] <= 1e-3 && mean[6] <= 1e-3;
        const bool linear_ok = linear_mean > mean[1];
        const bool pass = decreasing && small_ok && large_ok && linear_ok;
        report(9, pass,
               "network ordering: means over %d seeds "
               "[n2 %.3g, n4 %.3g, n6 %.3g, n8 %.3g, n10 %.3g, n20 %.3g, "
               "n100 %.3g] decreasing(2..10)=%d, n10<=4e-3=%d, "
               "n20,n100<=1e-3=%d; linear n100 %.3g > full n4 = %d (%.0fs)",
               kSeeds, mean[0], mean[1], mean[2], mean[3], mean[4], mean[5],
               mean[6], decreasing, small_ok, large_ok, linear_mean, linear_ok,
               omp_get_wtime() - t9);
    }

    // Criterion 10: analytic gradient vs central differences on 20 random
    // small instances.
    {
        Rng rng(21);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 1 + static_cast<int>(rng.uniform01() * 4) % 4;
            const int d = trial % 2 == 0 ? 1 : 2;
            MlpParams p = init_mlp(n, d, rng);
            for (int i = 0; i < n; ++i) p.c[i] = rng.uniform(-1.5, 1.5);
            const int m = 16;
            std::vector<double> xs(static_cast<std::size_t>(m) * d), ys(m);
            for (auto& v : xs) v = rng.uniform01();
            for (auto& v : ys) v = rng.uniform(-1.0, 1.0);
            worst = std::max(worst, grad_check(p, TrainMode::full, xs, ys));
        }
        report(10, worst <= 1e-5,
               "gradient check: max relative deviation %.3g (cap 1e-5)", worst);
    }

    // Criterion 11: a comparison run at seed 0 is byte-deterministic across
    // repeats. Reduced scale; the full-scale run is the same code path.
    {
        ExperimentPlan p;
        p.trials = 8;
        p.n_max = 30;
        p.master_seed = 0;
        p.grid_points = 400;
        p.mlp_trials = 4;
        p.mlp_ns = {2, 5, 10};
        p.mlp_epoch_cap = 2000;
        const GridFunction f_small = target_function(make_grid(1, p.grid_points));
        const auto paths_a = run_compare(f_small, p, "acceptance_cmp_a");
        const auto paths_b = run_compare(f_small, p, "acceptance_cmp_b");
        bool pass = paths_a.size() == paths_b.size();
        int mismatched = 0;
        for (std::size_t i = 0; pass && i < paths_a.size(); ++i)
            if (read_text_file(paths_a[i]) != read_text_file(paths_b[i]))
                ++mismatched;
        pass = pass && mismatched == 0;
        report(11, pass,
               "determinism: %zu comparison outputs, %d byte mismatches "
               "between repeated seed-0 runs (need 0)",
               paths_a.size(), mismatched);
    }

    // Criterion 12: supervisory reinitialization at quality threshold 0.01,
    // n=100, 100 meta-trials, cap 20 resamples. Every meta-trial must
    // terminate within the cap and the met fraction must be inside (0,1).
    // The follow-up line probes threshold 0.2, where the mechanism's
    // accept/resample behavior is visible on this target.
    {
        const ParameterBox box{0.0, 200.0, -200.0, 200.0};
        auto run_meta = [&](double threshold, std::uint64_t salt, int& met,
                            int& over_cap, double& mean_reinits) {
            met = 0;
            over_cap = 0;
            long total_reinits = 0;
            for (int mt = 0; mt < 100; ++mt) {
                Rng rng(child_seed(salt, static_cast<std::uint64_t>(mt), 0));
                const ReinitResult r =
                    fit_with_reinit(box, f, 100, threshold, 20, 1e12, rng);
                met += r.met ? 1 : 0;
                over_cap += r.reinit_count > 20 ? 1 : 0;
                total_reinits += r.reinit_count;
            }
            mean_reinits = static_cast<double>(total_reinits) / 100.0;
        };
        int met = 0, over_cap = 0;
        double mean_reinits = 0.0;
        run_meta(0.01, 12, met, over_cap, mean_reinits);
        const bool pass = over_cap == 0 && met > 0 && met < 100;
        report(12, pass,
               "reinitialization at threshold 0.01: met %d/100 (need strictly "
               "inside (0,1)), %d over cap, mean resamples %.1f",
               met, over_cap, mean_reinits);
        int met2 = 0, over2 = 0;
        double mean2 = 0.0;
        run_meta(0.2, 1200, met2, over2, mean2);
        std::printf(
            "       diagnostic at threshold 0.2: met %d/100, %d over cap, "
            "mean resamples %.1f (mechanism accepts and resamples as designed)\n",
            met2, over2, mean2);
    }

    std::printf("%d/12 criteria passed, total %.0fs\n", 12 - failures,
                omp_get_wtime() - t_start);
    return failures;
}
