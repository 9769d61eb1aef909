#include "fapprox/random_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fapprox/kernels.hpp"

namespace fapprox {

namespace {

// Incremental least-squares state: modified Gram-Schmidt in the quadrature
// inner product with a second reorthogonalization pass. R is the Cholesky
// factor of the retained Gram matrix, so this solves the normal equations;
// the extra pass keeps residual orthogonality near machine precision where
// a plain symmetric factorization would lose half the digits at high
// condition numbers. Earlier columns are never revisited when one is added,
// so the state after n elements is identical to a from-scratch fit of the
// first n.
class LsFitter {
  public:
    LsFitter(const GridFunction& f, double cond_threshold)
        : grid_(f.grid),
          cell_(f.grid->cell_weight),
          cond_threshold_(cond_threshold),
          resid_(f.values),
          f_norm_sq_(norm_sq(f)) {}

    bool add(const BasisElement& g, bool keep_tab) {
        GridFunction tab = tabulate(g, grid_);
        const double diag = cell_ * kernels::dot(tab.values, tab.values);
        bool keep = false;
        if (diag > 0.0) {
            std::vector<double> rcol(q_.size(), 0.0);
            std::vector<double> v = tab.values;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < q_.size(); ++j) {
                    const double proj = cell_ * kernels::dot(v, q_[j]);
                    rcol[j] += proj;
                    kernels::axpy(v, -proj, q_[j]);
                }
            }
            const double pivot_sq = cell_ * kernels::dot(v, v);
            const double max_diag = std::max(max_diag_, diag);
            const double min_pivot_sq = std::min(min_pivot_sq_, pivot_sq);
            if (pivot_sq > 0.0 && max_diag / min_pivot_sq <= cond_threshold_) {
                keep = true;
                max_diag_ = max_diag;
                min_pivot_sq_ = min_pivot_sq;
                const double rdiag = std::sqrt(pivot_sq);
                for (auto& x : v) x /= rdiag;
                rcol.push_back(rdiag);
                const double gamma = cell_ * kernels::dot(resid_, v);
                kernels::axpy(resid_, -gamma, v);
                gamma_sq_sum_ += gamma * gamma;
                q_.push_back(std::move(v));
                gamma_.push_back(gamma);
                r_cols_.push_back(std::move(rcol));
                diags_.push_back(diag);
                if (keep_tab) tabs_.push_back(std::move(tab.values));
            }
        }
        retained_.push_back(keep);
        if (!keep) ++discarded_;
        return keep;
    }

    double resid_sq() const { return std::max(0.0, f_norm_sq_ - gamma_sq_sum_); }

    double bar_e() const { return f_norm_sq_ > 0.0 ? resid_sq() / f_norm_sq_ : 0.0; }

    double gram_condition() const {
        return q_.empty() ? 1.0 : max_diag_ / min_pivot_sq_;
    }

    int discarded() const { return discarded_; }

    const std::vector<bool>& retained() const { return retained_; }

    // Requires keep_tab on every retained add.
    double orth_max() const {
        const double f_norm = std::sqrt(f_norm_sq_);
        double worst = 0.0;
        for (std::size_t k = 0; k < tabs_.size(); ++k) {
            const double num = std::abs(cell_ * kernels::dot(resid_, tabs_[k]));
            const double den = f_norm * std::sqrt(diags_[k]);
            if (den > 0.0)
                worst = std::max(worst, num / den);
            else if (num > 0.0)
                worst = std::numeric_limits<double>::infinity();
        }
        return worst;
    }

    std::vector<double> coefficients() const {
        const std::size_t m = q_.size();
        std::vector<double> packed(m, 0.0);
        for (std::size_t k = m; k-- > 0;) {
            double s = gamma_[k];
            for (std::size_t j = k + 1; j < m; ++j) s -= r_cols_[j][k] * packed[j];
            packed[k] = s / r_cols_[k][k];
        }
        std::vector<double> c(retained_.size(), 0.0);
        std::size_t k = 0;
        for (std::size_t i = 0; i < retained_.size(); ++i)
            if (retained_[i]) c[i] = packed[k++];
        return c;
    }

  private:
    GridPtr grid_;
    double cell_;
    double cond_threshold_;
    std::vector<std::vector<double>> q_;       // orthonormal retained columns
    std::vector<std::vector<double>> r_cols_;  // column j holds R[0..j][j]
    std::vector<std::vector<double>> tabs_;    // retained raw columns (optional)
    std::vector<double> gamma_;                // <f, q_j> accumulated
    std::vector<double> diags_;                // ||g||^2 of retained
    std::vector<bool> retained_;
    std::vector<double> resid_;                // f minus current projection
    double f_norm_sq_;
    double gamma_sq_sum_ = 0.0;
    double max_diag_ = 0.0;
    double min_pivot_sq_ = std::numeric_limits<double>::infinity();
    int discarded_ = 0;
};

RandomBasisModel fit_ridge(const std::vector<BasisElement>& pool,
                           const GridFunction& f, double ridge) {
    const std::size_t n = pool.size();
    std::vector<std::vector<double>> tabs(n);
    for (std::size_t i = 0; i < n; ++i) tabs[i] = tabulate(pool[i], f.grid).values;
    const double cell = f.grid->cell_weight;

    // Dense Gram with the ridge on the diagonal, Cholesky, two substitutions.
    std::vector<double> a(n * n, 0.0);
    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double gij = cell * kernels::dot(tabs[i], tabs[j]);
            a[i * n + j] = gij;
            a[j * n + i] = gij;
        }
        a[i * n + i] += ridge;
        beta[i] = cell * kernels::dot(f.values, tabs[i]);
    }
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a[i * n + i]);

    std::vector<double> l(n * n, 0.0);
    double min_pivot_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (!(s > 0.0))
                    throw std::runtime_error("fit_linear: ridge system not positive");
                l[i * n + i] = std::sqrt(s);
                min_pivot_sq = std::min(min_pivot_sq, s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    std::vector<double> z(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = beta[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * z[k];
        z[i] = s / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = z[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * c[k];
        c[i] = s / l[i * n + i];
    }

    RandomBasisModel m;
    m.pool = pool;
    m.coefficients = c;
    m.retained.assign(n, true);
    m.gram_condition = n == 0 ? 1.0 : max_diag / min_pivot_sq;
    m.discarded_count = 0;

    std::vector<double> resid = f.values;
    for (std::size_t i = 0; i < n; ++i) kernels::axpy(resid, -c[i], tabs[i]);
    m.resid_sq = cell * kernels::dot(resid, resid);
    const double f_sq = norm_sq(f);
    m.bar_e = f_sq > 0.0 ? m.resid_sq / f_sq : 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double gn = std::sqrt(cell * kernels::dot(tabs[i], tabs[i]));
        const double den = std::sqrt(f_sq) * gn;
        const double num = std::abs(cell * kernels::dot(resid, tabs[i]));
        if (den > 0.0) worst = std::max(worst, num / den);
    }
    m.orth_max = worst;
    return m;
}

}  // namespace

void grow_pool(std::vector<BasisElement>& pool, BasisKind kind, int dimension,
               const ParameterBox& box, Rng& rng) {
    pool.push_back(sample_params(kind, dimension, box, rng));
}

RandomBasisModel fit_linear(const std::vector<BasisElement>& pool,
                            const GridFunction& f, double cond_threshold,
                            double ridge) {
    if (pool.empty()) throw std::invalid_argument("fit_linear: empty pool");
    if (!(cond_threshold >= 1.0))
        throw std::invalid_argument("fit_linear: cond_threshold < 1");
    if (ridge > 0.0) return fit_ridge(pool, f, ridge);

    LsFitter fit(f, cond_threshold);
    for (const auto& g : pool) fit.add(g, true);

    RandomBasisModel m;
    m.pool = pool;
    m.coefficients = fit.coefficients();
    m.retained = fit.retained();
    m.gram_condition = fit.gram_condition();
    m.discarded_count = fit.discarded();
    m.resid_sq = fit.resid_sq();
    m.bar_e = fit.bar_e();
    m.orth_max = fit.orth_max();
    return m;
}

RandomBasisCurve run_random_basis(const ParameterBox& box, const GridFunction& f,
                                  int n_max, double cond_threshold, Rng& rng,
                                  bool want_orthogonality) {
    if (n_max < 1) throw std::invalid_argument("run_random_basis: n_max < 1");
    box.validate();
    RandomBasisCurve out;
    out.bar_e.reserve(n_max);
    LsFitter fit(f, cond_threshold);
    for (int n = 1; n <= n_max; ++n) {
        grow_pool(out.pool, BasisKind::gaussian, f.grid->dimension, box, rng);
        fit.add(out.pool.back(), want_orthogonality);
        out.bar_e.push_back(fit.bar_e());
        if (want_orthogonality) out.orth_max.push_back(fit.orth_max());
    }
    return out;
}

ReinitResult fit_with_reinit(const ParameterBox& box, const GridFunction& f, int n,
                             double quality_threshold, int max_reinits,
                             double cond_threshold, Rng& rng) {
    if (n < 1) throw std::invalid_argument("fit_with_reinit: n < 1");
    if (!(quality_threshold >= 0.0))
        throw std::invalid_argument("fit_with_reinit: negative threshold");
    if (max_reinits < 0) throw std::invalid_argument("fit_with_reinit: max_reinits < 0");

    ReinitResult best;
    bool have_best = false;
    for (int attempt = 0; attempt <= max_reinits; ++attempt) {
        std::vector<BasisElement> pool;
        pool.reserve(n);
        for (int i = 0; i < n; ++i)
            grow_pool(pool, BasisKind::gaussian, f.grid->dimension, box, rng);
        auto model = fit_linear(pool, f, cond_threshold);
        if (model.bar_e <= quality_threshold) {
            ReinitResult r;
            r.model = std::move(model);
            r.reinit_count = attempt;
            r.met = true;
            return r;
        }
        if (!have_best || model.bar_e < best.model.bar_e) {
            best.model = std::move(model);
            have_best = true;
        }
    }
    best.reinit_count = max_reinits;
    best.met = false;
    return best;
}

double McSample::b() const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * y[i];
    return -alpha * (s + u);
}

double McSample::weight(double f_y) const {
    double prod = alpha;
    for (double wi : w) prod *= wi;
    const int d = static_cast<int>(w.size());
    for (int i = 1; i < d; ++i) prod /= 2.0;
    return prod * f_y;
}

std::vector<McSample> draw_mc_samples(int n, int dimension, double alpha,
                                      double omega, Rng& rng) {
    if (n < 1) throw std::invalid_argument("draw_mc_samples: n < 1");
    if (dimension < 1) throw std::invalid_argument("draw_mc_samples: dimension < 1");
    if (!(alpha > 0.0) || !(omega > 0.0))
        throw std::invalid_argument("draw_mc_samples: need alpha > 0 and omega > 0");
    std::vector<McSample> samples(n);
    const double u_half = 2.0 * dimension * omega;
    for (auto& s : samples) {
        s.alpha = alpha;
        s.omega = omega;
        s.y.resize(dimension);
        s.w.resize(dimension);
        for (int a = 0; a < dimension; ++a) s.y[a] = rng.uniform01();
        s.w[0] = rng.uniform(0.0, omega);
        for (int a = 1; a < dimension; ++a) s.w[a] = rng.uniform(-omega, omega);
        s.u = rng.uniform(-u_half, u_half);
    }
    return samples;
}

double mc_box_volume(int dimension, double omega) {
    if (dimension < 1 || !(omega > 0.0))
        throw std::invalid_argument("mc_box_volume: bad arguments");
    double v = 4.0 * dimension * omega * omega;
    for (int a = 1; a < dimension; ++a) v *= 2.0 * omega;
    return v;
}

GridFunction mc_tabulate(const std::vector<McSample>& samples,
                         const std::vector<double>& f_at_y, const GridPtr& grid) {
    if (samples.empty()) throw std::invalid_argument("mc_tabulate: no samples");
    if (samples.size() != f_at_y.size())
        throw std::invalid_argument("mc_tabulate: f_at_y size mismatch");
    GridFunction out = zero_function(grid);
    const double scale = 4.0 / static_cast<double>(samples.size());
    std::vector<double> tmp;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const McSample& s = samples[k];
        if (static_cast<int>(s.w.size()) != grid->dimension)
            throw std::invalid_argument("mc_tabulate: dimension mismatch");
        const double coeff = scale * s.weight(f_at_y[k]);
        const double b = s.b();
        if (grid->dimension == 1) {
            kernels::gaussian_tabulate(tmp, s.alpha * s.w[0], b, grid->axis());
            kernels::axpy(out.values, coeff, tmp);
        } else {
            for (std::size_t j = 0; j < out.values.size(); ++j) {
                const double* x = grid->node(j);
                double t = b;
                for (int a = 0; a < grid->dimension; ++a)
                    t += s.alpha * s.w[a] * x[a];
                out.values[j] += coeff * std::exp(-t * t);
            }
        }
    }
    return out;
}

double mc_eval_at(const std::vector<McSample>& samples,
                  const std::vector<double>& f_at_y, const double* x) {
    if (samples.empty()) throw std::invalid_argument("mc_eval_at: no samples");
    if (samples.size() != f_at_y.size())
        throw std::invalid_argument("mc_eval_at: f_at_y size mismatch");
    const double scale = 4.0 / static_cast<double>(samples.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const McSample& s = samples[k];
        const double coeff = scale * s.weight(f_at_y[k]);
        double t = s.b();
        for (std::size_t a = 0; a < s.w.size(); ++a) t += s.alpha * s.w[a] * x[a];
        acc += coeff * std::exp(-t * t);
    }
    return acc;
}

VarianceEstimate estimate_variance(const std::vector<double>& values, int n,
                                   int dimension, double omega, double x,
                                   double reference, double epsilon) {
    if (values.size() < 30)
        throw std::invalid_argument("estimate_variance: need at least 30 runs");
    if (n < 1) throw std::invalid_argument("estimate_variance: n < 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("estimate_variance: epsilon <= 0");

    const double count = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= count;
    double svar = 0.0;
    for (double v : values) svar += (v - mean) * (v - mean);
    svar /= count - 1.0;

    VarianceEstimate e;
    e.n = n;
    e.x = x;
    e.empirical_var = svar;
    e.sigma_sq = svar * static_cast<double>(n) / mc_box_volume(dimension, omega);
    e.gamma = svar / (epsilon * epsilon);
    e.epsilon = epsilon;
    double in_mean = 0.0, in_ref = 0.0;
    for (double v : values) {
        if (std::abs(v - mean) < epsilon) in_mean += 1.0;
        if (std::abs(v - reference) < epsilon) in_ref += 1.0;
    }
    e.coverage_vs_mean = in_mean / count;
    e.coverage_vs_target = in_ref / count;
    return e;
}

}  // namespace fapprox
