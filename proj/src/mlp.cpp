#include "fapprox/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fapprox {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
// Relative improvement that resets the early-stop patience counter.
constexpr double kImproveRelTol = 1e-3;

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(s)); }

void check_params(const MlpParams& p) {
    if (p.n < 1 || p.dimension < 1)
        throw std::invalid_argument("mlp: n and dimension must be >= 1");
    if (p.w.size() != static_cast<std::size_t>(p.n) * p.dimension ||
        p.b.size() != static_cast<std::size_t>(p.n) ||
        p.c.size() != static_cast<std::size_t>(p.n))
        throw std::invalid_argument("mlp: parameter array sizes inconsistent");
}

// Mean squared error over m points and its gradient in the layout
// [w (n*d), b (n), c (n)]. linear_only leaves the w and b slots zero.
// sig is an n*m scratch buffer for the unit outputs.
double batch_grad(const MlpParams& p, TrainMode mode, const double* xs,
                  const double* ys, int m, std::vector<double>& resid,
                  std::vector<double>& sig, std::vector<double>& grad) {
    const int n = p.n, d = p.dimension;
    resid.assign(m, 0.0);
    for (int j = 0; j < m; ++j) resid[j] = -ys[j];
    for (int i = 0; i < n; ++i) {
        const double* wi = p.w.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < m; ++j) {
            double s = p.b[i];
            for (int a = 0; a < d; ++a) s += wi[a] * xs[j * d + a];
            const double v = sigmoid(s);
            sig[static_cast<std::size_t>(i) * m + j] = v;
            resid[j] += p.c[i] * v;
        }
    }
    double sse = 0.0;
    for (int j = 0; j < m; ++j) sse += resid[j] * resid[j];

    std::fill(grad.begin(), grad.end(), 0.0);
    const double sc = 2.0 / m;
    const bool lin = mode == TrainMode::linear_only;
    for (int i = 0; i < n; ++i) {
        const double* si = sig.data() + static_cast<std::size_t>(i) * m;
        double gc = 0.0;
        if (lin) {
            for (int j = 0; j < m; ++j) gc += resid[j] * si[j];
        } else {
            double gb = 0.0;
            double* gw = grad.data() + static_cast<std::size_t>(i) * d;
            for (int j = 0; j < m; ++j) {
                const double v = si[j];
                gc += resid[j] * v;
                // d sigmoid / d s = v * (v - 1)
                const double t = resid[j] * p.c[i] * v * (v - 1.0);
                gb += t;
                for (int a = 0; a < d; ++a) gw[a] += t * xs[j * d + a];
            }
            for (int a = 0; a < d; ++a) gw[a] *= sc;
            grad[static_cast<std::size_t>(n) * d + i] = sc * gb;
        }
        grad[static_cast<std::size_t>(n) * d + n + i] = sc * gc;
    }
    return sse / m;
}

}  // namespace

void TrainConfig::validate() const {
    if (max_epochs < 1) throw std::invalid_argument("mlp: max_epochs must be >= 1");
    if (sample_count < 1) throw std::invalid_argument("mlp: sample_count must be >= 1");
    if (batch < 0 || batch > sample_count)
        throw std::invalid_argument("mlp: batch must be in [0, sample_count]");
    if (!(lr0 > 0.0)) throw std::invalid_argument("mlp: lr0 must be positive");
    if (lr_min < 0.0 || lr_min > lr0)
        throw std::invalid_argument("mlp: lr_min must be in [0, lr0]");
    if (!(wb_lr_scale > 0.0)) throw std::invalid_argument("mlp: wb_lr_scale must be positive");
    if (eval_interval < 1) throw std::invalid_argument("mlp: eval_interval must be >= 1");
    if (early_stop_bar_e < 0.0)
        throw std::invalid_argument("mlp: early_stop_bar_e must be >= 0");
    if (early_stop_patience < 0)
        throw std::invalid_argument("mlp: early_stop_patience must be >= 0");
    if (!(divergence_limit > 0.0))
        throw std::invalid_argument("mlp: divergence_limit must be positive");
    if (restarts < 1) throw std::invalid_argument("mlp: restarts must be >= 1");
    if (restarts > 1 && mode == TrainMode::linear_only)
        throw std::invalid_argument(
            "mlp: restarts require full mode (linear_only is a convex fit and "
            "its basis is pinned)");
}

double mlp_eval(const MlpParams& p, const double* x) {
    double out = 0.0;
    for (int i = 0; i < p.n; ++i) {
        double s = p.b[i];
        const double* wi = p.w.data() + static_cast<std::size_t>(i) * p.dimension;
        for (int a = 0; a < p.dimension; ++a) s += wi[a] * x[a];
        out += p.c[i] * sigmoid(s);
    }
    return out;
}

double mlp_bar_e(const MlpParams& p, const GridFunction& f) {
    check_params(p);
    if (p.dimension != f.grid->dimension)
        throw std::invalid_argument("mlp_bar_e: dimension mismatch");
    GridFunction approx = zero_function(f.grid);
    const std::size_t count = f.grid->node_count();
    for (std::size_t k = 0; k < count; ++k)
        approx.values[k] = mlp_eval(p, f.grid->node(k));
    return normalized_error(approx, f);
}

MlpParams init_mlp(int n, int dimension, Rng& rng) {
    if (n < 1 || dimension < 1)
        throw std::invalid_argument("init_mlp: n and dimension must be >= 1");
    MlpParams p;
    p.n = n;
    p.dimension = dimension;
    p.w.resize(static_cast<std::size_t>(n) * dimension);
    p.b.resize(n);
    p.c.assign(n, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dimension));
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < dimension; ++a)
            p.w[static_cast<std::size_t>(i) * dimension + a] =
                scale * rng.uniform(-1.0, 1.0);
        p.b[i] = scale * rng.uniform(-1.0, 1.0);
    }
    return p;
}

MlpParams init_mlp_frozen_basis(int n, int dimension, const ParameterBox& box,
                                Rng& rng) {
    if (n < 1) throw std::invalid_argument("init_mlp_frozen_basis: n must be >= 1");
    MlpParams p;
    p.n = n;
    p.dimension = dimension;
    p.w.resize(static_cast<std::size_t>(n) * dimension);
    p.b.resize(n);
    p.c.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        BasisElement g = sample_params(BasisKind::sigmoid, dimension, box, rng);
        for (int a = 0; a < dimension; ++a)
            p.w[static_cast<std::size_t>(i) * dimension + a] = g.w[a];
        p.b[i] = g.b;
    }
    return p;
}

TrainResult train_mlp(const MlpParams& start, const GridFunction& f,
                      const TrainConfig& cfg, Rng& rng) {
    cfg.validate();
    check_params(start);
    if (f.grid->dimension != 1 || start.dimension != 1)
        throw std::invalid_argument("train_mlp: training targets need a 1-d grid");

    const int n = start.n;
    const int m = cfg.sample_count;
    const int batch = cfg.batch == 0 ? m : cfg.batch;
    const std::size_t sz = static_cast<std::size_t>(n) * 3;
    const bool lin = cfg.mode == TrainMode::linear_only;

    TrainResult out;
    out.params = start;
    out.bar_e = mlp_bar_e(start, f);
    out.eval_history.push_back(out.bar_e);
    double best = out.bar_e;

    std::vector<double> mom(sz), vel(sz), grad(sz);
    std::vector<double> xs(m), ys(m), resid, sig(static_cast<std::size_t>(n) * batch);

    for (int rs = 0; rs < cfg.restarts; ++rs) {
        if (cfg.early_stop_bar_e > 0.0 && best <= cfg.early_stop_bar_e) break;
        MlpParams p = rs == 0 ? start : init_mlp(n, 1, rng);
        double start_best = out.bar_e;
        if (rs > 0) {
            start_best = mlp_bar_e(p, f);
            out.eval_history.push_back(start_best);
            if (start_best < best) {
                best = start_best;
                out.params = p;
                out.bar_e = start_best;
            }
        }
        std::fill(mom.begin(), mom.end(), 0.0);
        std::fill(vel.begin(), vel.end(), 0.0);
        double b1t = 1.0, b2t = 1.0;
        int since_improve = 0;

        for (int ep = 1; ep <= cfg.max_epochs; ++ep) {
            for (int j = 0; j < m; ++j) {
                xs[j] = rng.uniform01();
                ys[j] = interp1(f, xs[j]);
            }
            const double lr =
                cfg.lr_min + 0.5 * (cfg.lr0 - cfg.lr_min) *
                                 (1.0 + std::cos(M_PI * ep / cfg.max_epochs));
            double ep_sse = 0.0;
            for (int off = 0; off < m; off += batch) {
                const int bs = std::min(batch, m - off);
                const double mse = batch_grad(p, cfg.mode, xs.data() + off,
                                              ys.data() + off, bs, resid, sig, grad);
                ep_sse += mse * bs;
                b1t *= kBeta1;
                b2t *= kBeta2;
                const std::size_t lo = lin ? static_cast<std::size_t>(n) * 2 : 0;
                for (std::size_t k = lo; k < sz; ++k) {
                    mom[k] = kBeta1 * mom[k] + (1.0 - kBeta1) * grad[k];
                    vel[k] = kBeta2 * vel[k] + (1.0 - kBeta2) * grad[k] * grad[k];
                    const double step =
                        (k < static_cast<std::size_t>(n) * 2 ? cfg.wb_lr_scale : 1.0) * lr;
                    const double upd = step * (mom[k] / (1.0 - b1t)) /
                                       (std::sqrt(vel[k] / (1.0 - b2t)) + kAdamEps);
                    if (k < static_cast<std::size_t>(n))
                        p.w[k] -= upd;
                    else if (k < static_cast<std::size_t>(n) * 2)
                        p.b[k - n] -= upd;
                    else
                        p.c[k - static_cast<std::size_t>(n) * 2] -= upd;
                }
            }
            ++out.epochs_run;
            if (ep_sse / m > cfg.divergence_limit) {
                out.diverged = true;
                return out;
            }
            if (ep % cfg.eval_interval == 0 || ep == cfg.max_epochs) {
                const double e = mlp_bar_e(p, f);
                out.eval_history.push_back(e);
                // Patience is judged within the current start so a fresh
                // init gets a full horizon before it can beat `best`.
                if (e < start_best * (1.0 - kImproveRelTol))
                    since_improve = 0;
                else
                    ++since_improve;
                if (e < start_best) start_best = e;
                if (e < best) {
                    best = e;
                    out.params = p;
                    out.bar_e = e;
                }
                if (cfg.early_stop_bar_e > 0.0 && best <= cfg.early_stop_bar_e)
                    return out;
                if (cfg.early_stop_patience > 0 &&
                    since_improve >= cfg.early_stop_patience)
                    break;
            }
        }
    }
    return out;
}

double grad_check(const MlpParams& p, TrainMode mode,
                  const std::vector<double>& inputs,
                  const std::vector<double>& targets, double h) {
    check_params(p);
    if (targets.empty() ||
        inputs.size() != targets.size() * static_cast<std::size_t>(p.dimension))
        throw std::invalid_argument("grad_check: inputs/targets size mismatch");
    const int n = p.n, d = p.dimension;
    const int m = static_cast<int>(targets.size());
    const std::size_t sz = static_cast<std::size_t>(n) * (d + 2);

    std::vector<double> resid, sig(static_cast<std::size_t>(n) * m), grad(sz);
    batch_grad(p, mode, inputs.data(), targets.data(), m, resid, sig, grad);

    auto loss_at = [&](const MlpParams& q) {
        double sse = 0.0;
        for (int j = 0; j < m; ++j) {
            const double r = mlp_eval(q, inputs.data() + static_cast<std::size_t>(j) * d) -
                             targets[j];
            sse += r * r;
        }
        return sse / m;
    };

    const std::size_t wb_count = static_cast<std::size_t>(n) * (d + 1);
    double worst = 0.0;
    MlpParams q = p;
    for (std::size_t k = 0; k < sz; ++k) {
        double* slot = k < static_cast<std::size_t>(n) * d ? &q.w[k]
                       : k < wb_count                      ? &q.b[k - static_cast<std::size_t>(n) * d]
                                                           : &q.c[k - wb_count];
        if (mode == TrainMode::linear_only && k < wb_count) {
            // Masked parameters must have identically zero analytic gradient.
            if (grad[k] != 0.0) return 1.0;
            continue;
        }
        const double saved = *slot;
        *slot = saved + h;
        const double up = loss_at(q);
        *slot = saved - h;
        const double dn = loss_at(q);
        *slot = saved;
        const double numeric = (up - dn) / (2.0 * h);
        const double dev = std::abs(grad[k] - numeric) /
                           (std::max(std::abs(grad[k]), std::abs(numeric)) + 1e-10);
        worst = std::max(worst, dev);
    }
    return worst;
}

}  // namespace fapprox
