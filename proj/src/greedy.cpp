#include "fapprox/greedy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fapprox/kernels.hpp"

namespace fapprox {

void GreedyConfig::validate() const {
    if (!(m_double_prime > m_prime) || !(m_prime > 0.0))
        throw std::invalid_argument("GreedyConfig: need M'' > M' > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("GreedyConfig: epsilon <= 0");
    if (max_steps < 1) throw std::invalid_argument("GreedyConfig: max_steps < 1");
    if (max_attempts < 1) throw std::invalid_argument("GreedyConfig: max_attempts < 1");
    search_box.validate();
}

int GreedyTrace::shortfall_count() const {
    int c = 0;
    for (const auto& s : steps) c += s.shortfall ? 1 : 0;
    return c;
}

namespace {

// Search over sampled (w, b) given the residual values e = f_n - f and the
// precomputed t_ef = <e, f>. The selection value <e, g - f> = <e, g> - t_ef
// only needs one basis evaluation pass per attempt.
CandidateResult search_impl(const std::vector<double>& e, const GridPtr& grid,
                            double t_ef, double threshold, const ParameterBox& box,
                            long max_attempts, Rng& rng, BasisKind kind) {
    box.validate();
    if (!std::isfinite(threshold))
        throw std::invalid_argument("candidate_search: threshold not finite");
    const bool fast = grid->dimension == 1 && kind == BasisKind::gaussian;

    CandidateResult best;
    best.condition_value = std::numeric_limits<double>::infinity();
    double best_w = 0.0, best_b = 0.0;
    BasisElement best_generic;

    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        double cond;
        double w1 = 0.0, b1 = 0.0;
        BasisElement g;
        if (fast) {
            w1 = rng.uniform(box.w_lo, box.w_hi);
            b1 = rng.uniform(box.b_lo, box.b_hi);
            cond = grid->cell_weight * kernels::gaussian_dot(w1, b1, grid->axis(), e) -
                   t_ef;
        } else {
            g = sample_params(kind, grid->dimension, box, rng);
            cond = grid->cell_weight * kernels::dot(tabulate(g, grid).values, e) - t_ef;
        }
        if (cond < threshold) {
            CandidateResult r;
            r.element = fast ? BasisElement{kind, {w1}, b1} : std::move(g);
            r.condition_value = cond;
            r.attempts_used = attempt;
            r.shortfall = false;
            return r;
        }
        if (cond < best.condition_value) {
            best.condition_value = cond;
            if (fast) {
                best_w = w1;
                best_b = b1;
            } else {
                best_generic = std::move(g);
            }
        }
    }
    best.element = fast ? BasisElement{kind, {best_w}, best_b} : std::move(best_generic);
    best.attempts_used = max_attempts;
    best.shortfall = true;
    return best;
}

}  // namespace

CandidateResult candidate_search(const GridFunction& f_n, const GridFunction& f,
                                 double threshold, const ParameterBox& box,
                                 long max_attempts, Rng& rng, BasisKind kind) {
    if (!f_n.grid || !f.grid || !f_n.grid->compatible(*f.grid))
        throw std::invalid_argument("candidate_search: incompatible grids");
    const std::vector<double> e = kernels::sub(f_n.values, f.values);
    const double t_ef = f.grid->cell_weight * kernels::dot(e, f.values);
    return search_impl(e, f.grid, t_ef, threshold, box, max_attempts, rng, kind);
}

std::pair<GridFunction, double> error_ratio_step(const GridFunction& f_n,
                                                 double e_n_sq,
                                                 const GridFunction& g_n,
                                                 double m_double_prime) {
    if (e_n_sq < 0.0) throw std::invalid_argument("error_ratio_step: e_n_sq < 0");
    if (!(m_double_prime > 0.0)) throw std::invalid_argument("error_ratio_step: M'' <= 0");
    const double alpha = e_n_sq / (m_double_prime * m_double_prime + e_n_sq);
    GridFunction next = f_n;
    kernels::mix(next.values, alpha, g_n.values);
    return {std::move(next), alpha};
}

double line_search_alpha(double e_sq, double condition_value, double g_to_f_sq) {
    // ||f_n - g||^2 expanded through the selection value.
    const double denom = e_sq - 2.0 * condition_value + g_to_f_sq;
    if (!(denom > 0.0)) return 0.0;
    double alpha = (e_sq - condition_value) / denom;
    if (alpha < 0.0) alpha = 0.0;
    const double hi = 1.0 - 1e-12;
    if (alpha > hi) alpha = hi;
    return alpha;
}

GreedyTrace run_greedy(const GreedyConfig& config, const GridFunction& f, Rng& rng) {
    config.validate();
    const double f_sq = norm_sq(f);
    if (!(f_sq > 0.0)) throw std::invalid_argument("run_greedy: zero target");

    GreedyTrace trace;
    trace.e0_sq = f_sq;  // f_0 = 0
    trace.m_prime_ok = config.m_prime > 1.0 + std::sqrt(f_sq);
    trace.steps.reserve(config.max_steps);

    const std::vector<double> bounds =
        bound_curve(trace.e0_sq, config.m_prime, config.max_steps);
    const double msq = config.m_double_prime * config.m_double_prime;
    const double threshold_coef = (msq - config.m_prime * config.m_prime) / (2.0 * msq);

    GridFunction fn = zero_function(f.grid);
    double e_sq = f_sq;
    std::vector<double> e = kernels::sub(fn.values, f.values);

    for (int step = 1; step <= config.max_steps; ++step) {
        const double threshold =
            step == 1 ? config.epsilon : threshold_coef * e_sq;
        const double t_ef = f.grid->cell_weight * kernels::dot(e, f.values);
        CandidateResult cand =
            search_impl(e, f.grid, t_ef, threshold, config.search_box,
                        config.max_attempts, rng, config.kind);

        const GridFunction g = tabulate(cand.element, f.grid);
        double alpha;
        switch (config.alpha_rule) {
            case AlphaRule::line_search: {
                const std::vector<double> gf = kernels::sub(g.values, f.values);
                const double g_to_f_sq = f.grid->cell_weight * kernels::dot(gf, gf);
                alpha = line_search_alpha(e_sq, cand.condition_value, g_to_f_sq);
                break;
            }
            case AlphaRule::error_ratio_normalized: {
                const double bar = e_sq / trace.e0_sq;
                alpha = bar / (msq + bar);
                break;
            }
            case AlphaRule::error_ratio_absolute:
                alpha = e_sq / (msq + e_sq);
                break;
            default:
                throw std::invalid_argument("run_greedy: unknown alpha rule");
        }

        kernels::mix(fn.values, alpha, g.values);
        e = kernels::sub(fn.values, f.values);
        e_sq = f.grid->cell_weight * kernels::dot(e, e);

        GreedyStep rec;
        rec.step = step;
        rec.alpha = alpha;
        rec.element = std::move(cand.element);
        rec.e_sq = e_sq;
        rec.bar_e = e_sq / trace.e0_sq;
        rec.bound = bounds[static_cast<std::size_t>(step)];
        rec.attempts_used = cand.attempts_used;
        rec.condition_value = cand.condition_value;
        rec.shortfall = cand.shortfall;
        trace.steps.push_back(std::move(rec));
    }
    trace.approximant = std::move(fn);
    return trace;
}

std::vector<double> unroll_coefficients(const std::vector<double>& alphas) {
    for (double a : alphas)
        if (!(a >= 0.0) || !(a < 1.0))
            throw std::invalid_argument("unroll_coefficients: alpha outside [0,1)");
    std::vector<double> c(alphas.size());
    double tail = 1.0;
    for (std::size_t i = alphas.size(); i-- > 0;) {
        c[i] = alphas[i] * tail;
        tail *= 1.0 - alphas[i];
    }
    return c;
}

std::vector<double> bound_curve(double e0_sq, double m_prime, int n_max) {
    if (!(e0_sq > 0.0)) throw std::invalid_argument("bound_curve: e0_sq <= 0");
    if (!(m_prime > 0.0)) throw std::invalid_argument("bound_curve: M' <= 0");
    if (n_max < 0) throw std::invalid_argument("bound_curve: n_max < 0");
    const double mp_sq = m_prime * m_prime;
    std::vector<double> bound(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n)
        bound[static_cast<std::size_t>(n)] = mp_sq * e0_sq / (n * e0_sq + mp_sq);
    return bound;
}

}  // namespace fapprox
