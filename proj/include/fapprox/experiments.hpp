#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fapprox/greedy.hpp"
#include "fapprox/grid.hpp"
#include "fapprox/mlp.hpp"
#include "fapprox/random_basis.hpp"
#include "fapprox/rng.hpp"

namespace fapprox {

enum class Method { greedy, random, mc_direct, mlp_full, mlp_linear };

const char* method_name(Method m);
Method method_from_name(const std::string& name);  // throws std::invalid_argument

// Everything a benchmark run needs; mirrors the CLI flags and the JSON
// config file one to one.
struct ExperimentPlan {
    int trials = 100;
    int n_max = 100;
    std::uint64_t master_seed = 0;
    int grid_points = 1000;

    GreedyConfig greedy;

    ParameterBox random_box{0.0, 200.0, -200.0, 200.0};
    double cond_threshold = 1e12;

    int mlp_trials = 0;  // 0 = min(trials, 24)
    std::vector<int> mlp_ns = {2, 4, 6, 8, 10, 20, 40, 60, 80, 100};
    int mlp_epoch_cap = 0;  // 0 = off; caps max_epochs for quick runs

    double mc_alpha = 10.0;
    double mc_omega = 200.0;
    double mc_x = 0.5;
    std::vector<int> mc_ns = {32, 128, 512, 2048};

    void validate() const;  // throws std::invalid_argument
    int effective_mlp_trials() const;
    // greedy/random: 1..n_max. mlp_full: mlp_ns clipped to n_max.
    // mlp_linear: {n_max}. mc_direct: mc_ns.
    std::vector<int> sizes_for(Method m) const;
};

// JSON <-> plan. parse accepts a partial document (absent fields keep their
// defaults) and rejects unknown keys; both throw std::invalid_argument.
ExperimentPlan parse_plan_json(const std::string& text);
std::string render_plan_json(const ExperimentPlan& plan);

// Trial-by-size result matrix. Failed cells hold NaN and are omitted from
// CSV output. Every method records the normalized error of its n-element
// construction; for mc_direct that is the error of the tabulated
// Monte-Carlo approximant.
struct TrialSeries {
    Method method = Method::greedy;
    std::vector<int> ns;  // ascending sizes
    int trials = 0;
    std::vector<std::uint64_t> seeds;  // one per trial
    std::vector<double> values;        // trials * ns.size(), size-major rows

    double at(int trial, std::size_t size_index) const {
        return values[static_cast<std::size_t>(trial) * ns.size() + size_index];
    }
    double& at(int trial, std::size_t size_index) {
        return values[static_cast<std::size_t>(trial) * ns.size() + size_index];
    }
};

// Runs plan.trials (or the mlp count) independent seeded trials of one
// method, in parallel across trials. Per-trial failures become NaN rows.
TrialSeries run_trials(Method method, const GridFunction& f,
                       const ExperimentPlan& plan);

struct BoxStats {
    int n = 0;
    double median = 0.0;
    double box_lo = 0.0;      // 25th percentile
    double box_hi = 0.0;      // 75th percentile
    double whisker_lo = 0.0;  // 12.5th percentile
    double whisker_hi = 0.0;  // 87.5th percentile
    std::vector<double> outliers;  // values strictly outside the whiskers
};

// Linear-interpolation quantile (the R-7 rule) of an ascending sample.
double quantile_sorted(const std::vector<double>& sorted, double q);

// Per-size box statistics over the non-missing values; every size needs at
// least 4 of them.
std::vector<BoxStats> boxplot_stats(const TrialSeries& s);

// CSV schema: method,trial,seed,n,bar_e_n with one row per non-missing cell,
// sorted by (trial, n); values use 17 significant digits.
std::string render_series_csv(const TrialSeries& s);
// CSV schema: method,n,median,box_lo,box_hi,whisker_lo,whisker_hi,n_outliers.
std::string render_stats_csv(const TrialSeries& s,
                             const std::vector<BoxStats>& stats);
// Inverse of render_series_csv; missing cells come back as NaN.
TrialSeries parse_series_csv(const std::string& text);

// Writes content to path, throwing std::runtime_error naming the path.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

struct SvgSeries {
    std::string label;
    std::string color;  // "#rrggbb"
    std::vector<BoxStats> stats;
    bool subsample_boxes = false;  // draw box glyphs every 5th size only
};

// Standalone log-y SVG: box glyphs, whiskers, outlier crosses, and a median
// polyline per series, plus the normalized rate-bound polyline when
// bound_bar is nonempty (bound_bar[k] pairs with bound_ns[k]).
std::string render_svg(const std::vector<SvgSeries>& series,
                       const std::vector<int>& bound_ns,
                       const std::vector<double>& bound_bar);

// Tuned per-size training configs used by the benchmark runs.
TrainConfig mlp_full_config(int n);
TrainConfig mlp_linear_config();

// Pointwise Monte-Carlo estimates at plan.mc_x, one per (trial, size) with
// the same seeds as the mc_direct series, folded into spread diagnostics.
// epsilon is 2x the pooled standard deviation across the sizes. Needs
// plan.trials >= 30.
std::vector<VarianceEstimate> run_mc_variance(const GridFunction& f,
                                              const ExperimentPlan& plan);
std::string render_variance_csv(const std::vector<VarianceEstimate>& table);

// JSON summary: run config echo, per-method median bar_e at the reporting
// sizes {10,25,50,100} that each series actually ran, and the normalized
// rate bound at those sizes. e0_sq is the squared target norm.
std::string render_summary_json(const ExperimentPlan& plan,
                                const std::vector<TrialSeries>& series,
                                double e0_sq);

// greedy + random + mlp_full + mlp_linear; writes per-method series and
// stats CSVs, compare.svg, and summary.json under out_dir (created if
// absent). Returns the written paths in order.
std::vector<std::string> run_compare(const GridFunction& f,
                                     const ExperimentPlan& plan,
                                     const std::string& out_dir);

}  // namespace fapprox
