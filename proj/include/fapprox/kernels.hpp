#pragma once

#include <cstddef>
#include <vector>

// Low-level numeric kernels. The parallel variants reduce in a fixed blocked
// order so results are bit-identical to the serial block fold at any thread
// count. `serial::` holds plain reference loops for tests and benchmarks.
namespace fapprox::kernels {

inline constexpr std::size_t kBlock = 256;
inline constexpr std::size_t kParallelCutoff = std::size_t{1} << 15;

// exp(-s*s) underflows to exactly 0.0 past this |s|; used to skip
// inactive ranges without changing any summand.
inline constexpr double kGaussianCutoff = 27.4;

// Blocked dot product: per-block partial sums folded in block order.
double dot(const std::vector<double>& a, const std::vector<double>& b);

// c = a - b, elementwise.
std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b);

// acc = (1 - alpha) * acc + alpha * g, elementwise.
void mix(std::vector<double>& acc, double alpha, const std::vector<double>& g);

// acc += scale * g, elementwise.
void axpy(std::vector<double>& acc, double scale, const std::vector<double>& g);

// out[k] = exp(-(w * x[k] + b)^2) for sorted ascending x; inactive tails are
// zero-filled without evaluating exp. Handles any sign of w.
void gaussian_tabulate(std::vector<double>& out, double w, double b,
                       const std::vector<double>& x);

// Returns sum_k e[k] * exp(-(w * x[k] + b)^2) over the active range of
// sorted ascending x, accumulated left to right. Serial by design: callers
// run many of these inside an outer parallel loop.
double gaussian_dot(double w, double b, const std::vector<double>& x,
                    const std::vector<double>& e);

// out[k] = 1 / (1 + exp(w * x[k] + b)).
void sigmoid_tabulate(std::vector<double>& out, double w, double b,
                      const std::vector<double>& x);

namespace serial {

double dot(const std::vector<double>& a, const std::vector<double>& b);

void gaussian_tabulate(std::vector<double>& out, double w, double b,
                       const std::vector<double>& x);

double gaussian_dot(double w, double b, const std::vector<double>& x,
                    const std::vector<double>& e);

}  // namespace serial

}  // namespace fapprox::kernels
