#pragma once

#include <vector>

#include "fapprox/grid.hpp"
#include "fapprox/rng.hpp"

namespace fapprox {

enum class BasisKind { gaussian, sigmoid };

// One ridge element g(x) = phi(w . x + b) with phi = exp(-s^2) or 1/(1+e^s).
struct BasisElement {
    BasisKind kind = BasisKind::gaussian;
    std::vector<double> w;
    double b = 0.0;
};

// Axis-aligned sampling box: every w coordinate from [w_lo, w_hi],
// b from [b_lo, b_hi].
struct ParameterBox {
    double w_lo = 0.0;
    double w_hi = 0.0;
    double b_lo = 0.0;
    double b_hi = 0.0;

    void validate() const;
};

double eval_basis(const BasisElement& g, const double* x);

// Tabulates g on the grid (dimension must match g.w.size()).
GridFunction tabulate(const BasisElement& g, const GridPtr& grid);

// Draws w coordinates in axis order, then b.
BasisElement sample_params(BasisKind kind, int dimension, const ParameterBox& box,
                           Rng& rng);

}  // namespace fapprox
