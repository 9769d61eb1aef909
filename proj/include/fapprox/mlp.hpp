#pragma once

#include <cstdint>
#include <vector>

#include "fapprox/basis.hpp"
#include "fapprox/grid.hpp"
#include "fapprox/rng.hpp"

namespace fapprox {

// One-hidden-layer network f(x) = sum_i c_i / (1 + exp(w_i.x + b_i)).
struct MlpParams {
    int n = 0;
    int dimension = 0;
    std::vector<double> w;  // n * dimension, unit-major
    std::vector<double> b;  // n
    std::vector<double> c;  // n
};

enum class TrainMode { full, linear_only };

struct TrainConfig {
    TrainMode mode = TrainMode::full;
    int max_epochs = 30000;
    int sample_count = 512;  // fresh uniform inputs drawn every epoch
    int batch = 64;          // optimizer step granularity; 0 = full batch
    double lr0 = 0.002;
    double lr_min = 1e-5;
    // The hidden-layer parameters travel two orders of magnitude farther
    // than the output weights on this family of targets, so they get a
    // proportionally larger step.
    double wb_lr_scale = 100.0;
    int eval_interval = 200;      // epochs between grid evaluations
    double early_stop_bar_e = 0;  // stop once best bar_e <= this; 0 = off
    int early_stop_patience = 0;  // evals without improvement; 0 = off
    double divergence_limit = 1e6;
    // Independent inits per call; the best parameters across starts win.
    // Small nets have genuine bad local minima, and a fresh start is the
    // reliable escape. Full mode only; each extra start redraws from the
    // standard init distribution. max_epochs applies per start.
    int restarts = 1;

    void validate() const;  // throws std::invalid_argument
};

struct TrainResult {
    MlpParams params;  // best parameters seen at any evaluation
    double bar_e = 1.0;
    bool diverged = false;
    int epochs_run = 0;
    std::vector<double> eval_history;  // grid bar_e at each evaluation
};

// Network output at a point; x has p.dimension coordinates.
double mlp_eval(const MlpParams& p, const double* x);

// Normalized squared error of the network against f on f's grid.
double mlp_bar_e(const MlpParams& p, const GridFunction& f);

// w, b uniform in [-1,1]/sqrt(d), c = 0.
MlpParams init_mlp(int n, int dimension, Rng& rng);

// Frozen random sigmoid basis drawn from box (for linear-only training);
// c = 0. Draw order matches sample_params element by element.
MlpParams init_mlp_frozen_basis(int n, int dimension, const ParameterBox& box,
                                Rng& rng);

// Adam with cosine step decay on resampled uniform inputs; targets are
// linear interpolations of f. Requires f on a 1-d grid. In linear_only
// mode w and b are never written. With restarts > 1 the first start uses
// `start` and later starts draw fresh inits from rng; early_stop_bar_e,
// once met, skips the remaining starts, while patience only ends the
// current start.
TrainResult train_mlp(const MlpParams& start, const GridFunction& f,
                      const TrainConfig& cfg, Rng& rng);

// Max relative deviation between the analytic batch gradient and central
// finite differences (step h) over the parameters the mode trains. A
// nonzero analytic gradient for a masked parameter counts as deviation 1.
double grad_check(const MlpParams& p, TrainMode mode,
                  const std::vector<double>& inputs,
                  const std::vector<double>& targets, double h = 1e-6);

}  // namespace fapprox
