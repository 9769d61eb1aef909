#pragma once

#include <vector>

#include "fapprox/basis.hpp"
#include "fapprox/grid.hpp"
#include "fapprox/rng.hpp"

namespace fapprox {

// Least-squares fit of linear coefficients over a sampled pool.
struct RandomBasisModel {
    std::vector<BasisElement> pool;
    std::vector<double> coefficients;  // zeros at discarded positions
    std::vector<bool> retained;
    double gram_condition = 1.0;  // max retained diag / min squared pivot
    int discarded_count = 0;
    double resid_sq = 0.0;  // ||f - fit||^2 via the projection identity
    double bar_e = 1.0;     // resid_sq / ||f||^2
    // max over retained i of |<residual, g_i>| / (||f|| ||g_i||)
    double orth_max = 0.0;
};

// Appends one uniformly sampled element; earlier entries stay untouched, so
// successive pools are nested.
void grow_pool(std::vector<BasisElement>& pool, BasisKind kind, int dimension,
               const ParameterBox& box, Rng& rng);

// Minimizes ||f - sum c_i g_i|| over the retained elements, processing the
// pool in order. An element is discarded when joining it would push the
// incremental Gram condition estimate above cond_threshold (duplicates have
// zero pivot and are always discarded). ridge > 0 switches to the dense
// regularized solve (G + ridge*I) c = beta with no discards, available as a
// diagnostic only.
RandomBasisModel fit_linear(const std::vector<BasisElement>& pool,
                            const GridFunction& f, double cond_threshold = 1e12,
                            double ridge = 0.0);

// Incremental error curve: grow the pool one element at a time and refit.
// bar_e[n-1] is the normalized error of the n-element fit and is
// nonincreasing exactly (the reported residual accumulates nonnegative
// projection terms). orth_max[n-1] is filled when want_orthogonality is set.
struct RandomBasisCurve {
    std::vector<double> bar_e;
    std::vector<double> orth_max;
    std::vector<BasisElement> pool;
};

RandomBasisCurve run_random_basis(const ParameterBox& box, const GridFunction& f,
                                  int n_max, double cond_threshold, Rng& rng,
                                  bool want_orthogonality = false);

// Supervisory re-initialization: sample a fresh pool of size n and fit,
// up to max_reinits resamples, until bar_e <= quality_threshold.
struct ReinitResult {
    RandomBasisModel model;  // first accepted model, or best seen
    int reinit_count = 0;    // resamples used (0 = first pool accepted)
    bool met = false;
};

ReinitResult fit_with_reinit(const ParameterBox& box, const GridFunction& f, int n,
                             double quality_threshold, int max_reinits,
                             double cond_threshold, Rng& rng);

// One draw omega = (y, w, u) for the direct Monte-Carlo construction, over
// the box [0,1]^d x ([0,Omega] x [-Omega,Omega]^{d-1}) x [-2dOmega, 2dOmega].
struct McSample {
    std::vector<double> y;
    std::vector<double> w;
    double u = 0.0;
    double alpha = 0.0;
    double omega = 0.0;

    // Always derived, never stored: b = -alpha (w.y + u).
    double b() const;
    // c_k = alpha prod(w_i) / 2^{d-1} * f(y_k).
    double weight(double f_y) const;
};

std::vector<McSample> draw_mc_samples(int n, int dimension, double alpha,
                                      double omega, Rng& rng);

// Volume of the sampling box above.
double mc_box_volume(int dimension, double omega);

// F(x) = (4/n) sum_k c_k exp(-(alpha w_k.x + b_k)^2) tabulated on the grid;
// f_at_y[k] supplies f(y_k) for the weights.
GridFunction mc_tabulate(const std::vector<McSample>& samples,
                         const std::vector<double>& f_at_y, const GridPtr& grid);

// The same sum evaluated at one point x (dimension matching the samples).
double mc_eval_at(const std::vector<McSample>& samples,
                  const std::vector<double>& f_at_y, const double* x);

// Spread diagnostics for repeated estimates of f_n(x) at one network size.
struct VarianceEstimate {
    int n = 0;
    double x = 0.0;
    double empirical_var = 0.0;  // unbiased sample variance of the values
    double sigma_sq = 0.0;       // integrand variance: empirical_var * n / |box|
    double gamma = 0.0;          // Chebyshev bound empirical_var / epsilon^2
    double epsilon = 0.0;
    // P(|X - EX| < eps) with the sample mean standing in for EX; this is the
    // quantity the Chebyshev inequality bounds.
    double coverage_vs_mean = 0.0;
    // Fraction within eps of the reference value (the target); reported as a
    // diagnostic since the estimator's absolute level carries an unknown
    // proportionality constant.
    double coverage_vs_target = 0.0;
};

// Requires at least 30 values (independent runs at the same n).
VarianceEstimate estimate_variance(const std::vector<double>& values, int n,
                                   int dimension, double omega, double x,
                                   double reference, double epsilon);

}  // namespace fapprox
