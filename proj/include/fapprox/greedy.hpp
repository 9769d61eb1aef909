#pragma once

#include <utility>
#include <vector>

#include "fapprox/basis.hpp"
#include "fapprox/grid.hpp"
#include "fapprox/rng.hpp"

namespace fapprox {

// Step-size rule for the convex update f_{n+1} = (1-a) f_n + a g.
//   line_search     exact minimizer of the post-step error (default; monotone
//                   by construction and never worse than the closed formula,
//                   so the rate bound is inherited step by step)
//   error_ratio_normalized  a = ebar/(M''^2 + ebar) with the normalized error
//   error_ratio_absolute    a = e^2/(M''^2 + e^2) with the absolute squared error
enum class AlphaRule { line_search, error_ratio_normalized, error_ratio_absolute };

struct GreedyConfig {
    double m_prime = 1.5;
    double m_double_prime = 2.0;
    double epsilon = 1e-6;  // first-step selection threshold
    int max_steps = 100;
    long max_attempts = 1'000'000;
    ParameterBox search_box{0.0, 200.0, -100.0, 0.0};
    AlphaRule alpha_rule = AlphaRule::line_search;
    BasisKind kind = BasisKind::gaussian;

    void validate() const;
};

struct CandidateResult {
    BasisElement element;
    double condition_value = 0.0;
    long attempts_used = 0;
    bool shortfall = false;
};

struct GreedyStep {
    int step = 0;  // 1-based
    double alpha = 0.0;
    BasisElement element;
    double e_sq = 0.0;   // ||f_n - f||^2 after this step
    double bar_e = 0.0;  // e_sq / e0_sq
    double bound = 0.0;  // rate-bound value at this n
    long attempts_used = 0;
    double condition_value = 0.0;  // <f_{n-1} - f, g_n - f> at selection
    bool shortfall = false;
};

struct GreedyTrace {
    std::vector<GreedyStep> steps;
    double e0_sq = 0.0;
    // True when m_prime exceeds sup||g|| + ||f|| (family norms are <= 1, so
    // the check uses 1 + ||f||). A violation voids the rate-bound guarantee
    // but the run proceeds.
    bool m_prime_ok = true;
    GridFunction approximant;

    int shortfall_count() const;
};

// Samples elements from the box until <f_n - f, g - f> < threshold; returns
// the first hit, or the lowest-condition element seen flagged as a shortfall.
CandidateResult candidate_search(const GridFunction& f_n, const GridFunction& f,
                                 double threshold, const ParameterBox& box,
                                 long max_attempts, Rng& rng,
                                 BasisKind kind = BasisKind::gaussian);

// Deterministic convex update with a = e^2/(M''^2 + e^2).
std::pair<GridFunction, double> error_ratio_step(const GridFunction& f_n,
                                                 double e_n_sq,
                                                 const GridFunction& g_n,
                                                 double m_double_prime);

// Minimizer of ||(1-a) f_n + a g - f||^2 over a, clamped to [0, 1).
// e_sq = ||f_n - f||^2, condition_value = <f_n - f, g - f>,
// g_to_f_sq = ||g - f||^2.
double line_search_alpha(double e_sq, double condition_value, double g_to_f_sq);

GreedyTrace run_greedy(const GreedyConfig& config, const GridFunction& f, Rng& rng);

// c_i = alpha_i * prod_{j > i} (1 - alpha_j); sum c = 1 - prod(1 - alpha_i).
std::vector<double> unroll_coefficients(const std::vector<double>& alphas);

// bound[n] = M'^2 e0^2 / (n e0^2 + M'^2) for n = 0..n_max (bound[0] = e0^2).
std::vector<double> bound_curve(double e0_sq, double m_prime, int n_max);

}  // namespace fapprox
