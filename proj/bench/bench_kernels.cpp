// Timing comparison: serial reference kernels vs the blocked/range-skip
// variants, and a greedy trial batch run serially vs with the OpenMP loop.
// The blocked dot changes the summation order, so it is held to a relative
// tolerance; the range-skip gaussian_dot only drops exact zeros and the omp
// trial loop only reorders whole trials, so both must match bitwise.
#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "fapprox/experiments.hpp"
#include "fapprox/kernels.hpp"

using namespace fapprox;

namespace {

template <class F>
double time_best_of(int reps, F&& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        body();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

volatile double sink;

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", omp_get_max_threads());
    bool ok = true;

    for (const std::size_t len : {std::size_t{1} << 16, std::size_t{1} << 20}) {
        Rng rng(7);
        std::vector<double> a(len), b(len);
        for (std::size_t i = 0; i < len; ++i) {
            a[i] = rng.uniform(-0.5, 0.5);
            b[i] = rng.uniform(-0.5, 0.5);
        }
        const int n_calls = 1000;
        double acc_serial = 0.0, acc_blocked = 0.0;
        const double ts = time_best_of(3, [&] {
            double s = 0.0;
            for (int c = 0; c < n_calls; ++c) s += kernels::serial::dot(a, b);
            acc_serial = s;
            sink = s;
        });
        const double tb = time_best_of(3, [&] {
            double s = 0.0;
            for (int c = 0; c < n_calls; ++c) s += kernels::dot(a, b);
            acc_blocked = s;
            sink = s;
        });
        const double rel = std::abs(acc_serial - acc_blocked) /
                           std::max(std::abs(acc_serial), 1e-300);
        std::printf(
            "dot len=%-8zu x%d   serial %6.3fs  blocked   %6.3fs  speedup %5.2fx"
            "  rel dev %.2e\n",
            len, n_calls, ts, tb, ts / tb, rel);
        ok = ok && rel < 1e-12;
    }

    {
        const auto grid = make_grid(1, 4000);
        const std::vector<double>& x = grid->axis();
        std::vector<double> e(x.size());
        Rng rng(11);
        for (double& v : e) v = rng.uniform(-0.5, 0.5);
        const int n_calls = 2000;
        double s_serial = 0.0, s_skip = 0.0;
        const double ts = time_best_of(3, [&] {
            double s = 0.0;
            for (int c = 0; c < n_calls; ++c)
                s += kernels::serial::gaussian_dot(150.0 + c % 50, -75.0, x, e);
            s_serial = s;
            sink = s;
        });
        const double tk = time_best_of(3, [&] {
            double s = 0.0;
            for (int c = 0; c < n_calls; ++c)
                s += kernels::gaussian_dot(150.0 + c % 50, -75.0, x, e);
            s_skip = s;
            sink = s;
        });
        const bool same = s_serial == s_skip;
        std::printf(
            "gaussian_dot x%d     serial %6.3fs  rangeskip %6.3fs  speedup %5.2fx"
            "  %s\n",
            n_calls, ts, tk, ts / tk, same ? "bitwise equal" : "MISMATCH");
        ok = ok && same;
    }

    {
        ExperimentPlan plan;
        plan.trials = 16;
        plan.n_max = 25;
        plan.grid_points = 500;
        plan.greedy.max_attempts = 50000;
        const GridFunction f = target_function(make_grid(1, plan.grid_points));

        TrialSeries par;
        const double tp = time_best_of(1, [&] {
            par = run_trials(Method::greedy, f, plan);
        });

        // Serial reference: the same trials one by one through run_greedy.
        std::vector<double> last_serial(plan.trials);
        const double ts = time_best_of(1, [&] {
            for (int t = 0; t < plan.trials; ++t) {
                GreedyConfig cfg = plan.greedy;
                cfg.max_steps = plan.n_max;
                Rng rng(par.seeds[t]);
                const GreedyTrace tr = run_greedy(cfg, f, rng);
                last_serial[t] = tr.steps.back().bar_e;
            }
        });
        bool same = true;
        for (int t = 0; t < plan.trials; ++t)
            same = same && last_serial[t] == par.at(t, plan.n_max - 1);
        std::printf(
            "greedy 16 trials     serial %6.3fs  omp loop  %6.3fs  speedup %5.2fx"
            "  %s\n",
            ts, tp, ts / tp, same ? "bitwise equal" : "MISMATCH");
        ok = ok && same;
    }

    std::printf("\n%s\n", ok ? "all comparisons within contract" : "DEVIATION");
    return ok ? 0 : 1;
}
