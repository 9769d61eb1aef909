#include "fapprox/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fapprox::kernels {

namespace {

// Sums one block left to right.
double block_sum(const double* a, const double* b, std::size_t len) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i];
    return s;
}

// Active index range [first, last) of sorted x where exp(-(w*x+b)^2) can be
// nonzero, after normalizing to w >= 0. Everything outside evaluates to
// exactly 0.0, so skipping it cannot change a sum.
struct ActiveRange {
    std::size_t first = 0;
    std::size_t last = 0;
    double w = 0.0;
    double b = 0.0;
};

ActiveRange active_range(double w, double b, const std::vector<double>& x) {
    if (w < 0.0) {
        w = -w;
        b = -b;
    }
    ActiveRange r;
    r.w = w;
    r.b = b;
    if (w == 0.0) {
        r.first = 0;
        r.last = std::abs(b) >= kGaussianCutoff ? 0 : x.size();
        return r;
    }
    const double lo = (-kGaussianCutoff - b) / w;
    const double hi = (kGaussianCutoff - b) / w;
    r.first = static_cast<std::size_t>(
        std::lower_bound(x.begin(), x.end(), lo) - x.begin());
    r.last = static_cast<std::size_t>(
        std::upper_bound(x.begin(), x.end(), hi) - x.begin());
    return r;
}

}  // namespace

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    const std::size_t n = a.size();
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    if (n >= kParallelCutoff) {
        std::vector<double> partial(blocks);
#pragma omp parallel for schedule(static)
        for (long bi = 0; bi < static_cast<long>(blocks); ++bi) {
            const std::size_t off = static_cast<std::size_t>(bi) * kBlock;
            partial[bi] = block_sum(a.data() + off, b.data() + off,
                                    std::min(kBlock, n - off));
        }
        double s = 0.0;
        for (double p : partial) s += p;
        return s;
    }
    double s = 0.0;
    for (std::size_t off = 0; off < n; off += kBlock)
        s += block_sum(a.data() + off, b.data() + off, std::min(kBlock, n - off));
    return s;
}

std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

void mix(std::vector<double>& acc, double alpha, const std::vector<double>& g) {
    if (acc.size() != g.size()) throw std::invalid_argument("mix: size mismatch");
    const double keep = 1.0 - alpha;
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] = keep * acc[i] + alpha * g[i];
}

void axpy(std::vector<double>& acc, double scale, const std::vector<double>& g) {
    if (acc.size() != g.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * g[i];
}

void gaussian_tabulate(std::vector<double>& out, double w, double b,
                       const std::vector<double>& x) {
    out.assign(x.size(), 0.0);
    const ActiveRange r = active_range(w, b, x);
    for (std::size_t k = r.first; k < r.last; ++k) {
        const double t = r.w * x[k] + r.b;
        out[k] = std::exp(-t * t);
    }
}

double gaussian_dot(double w, double b, const std::vector<double>& x,
                    const std::vector<double>& e) {
    const ActiveRange r = active_range(w, b, x);
    double s = 0.0;
    for (std::size_t k = r.first; k < r.last; ++k) {
        const double t = r.w * x[k] + r.b;
        s += e[k] * std::exp(-t * t);
    }
    return s;
}

void sigmoid_tabulate(std::vector<double>& out, double w, double b,
                      const std::vector<double>& x) {
    out.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = 1.0 / (1.0 + std::exp(w * x[k] + b));
}

namespace serial {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void gaussian_tabulate(std::vector<double>& out, double w, double b,
                       const std::vector<double>& x) {
    out.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = w * x[k] + b;
        out[k] = std::exp(-t * t);
    }
}

double gaussian_dot(double w, double b, const std::vector<double>& x,
                    const std::vector<double>& e) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = w * x[k] + b;
        s += e[k] * std::exp(-t * t);
    }
    return s;
}

}  // namespace serial

}  // namespace fapprox::kernels
