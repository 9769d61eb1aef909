#include "fapprox/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "fapprox/kernels.hpp"

namespace fapprox {

void ParameterBox::validate() const {
    if (!(w_lo <= w_hi) || !(b_lo <= b_hi))
        throw std::invalid_argument("ParameterBox: empty interval");
}

double eval_basis(const BasisElement& g, const double* x) {
    double s = g.b;
    for (std::size_t a = 0; a < g.w.size(); ++a) s += g.w[a] * x[a];
    if (g.kind == BasisKind::gaussian) return std::exp(-s * s);
    return 1.0 / (1.0 + std::exp(s));
}

GridFunction tabulate(const BasisElement& g, const GridPtr& grid) {
    if (static_cast<int>(g.w.size()) != grid->dimension)
        throw std::invalid_argument("tabulate: dimension mismatch");
    GridFunction out;
    out.grid = grid;
    if (grid->dimension == 1) {
        if (g.kind == BasisKind::gaussian)
            kernels::gaussian_tabulate(out.values, g.w[0], g.b, grid->axis());
        else
            kernels::sigmoid_tabulate(out.values, g.w[0], g.b, grid->axis());
        return out;
    }
    out.values.resize(grid->node_count());
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = eval_basis(g, grid->node(k));
    return out;
}

BasisElement sample_params(BasisKind kind, int dimension, const ParameterBox& box,
                           Rng& rng) {
    box.validate();
    if (dimension < 1) throw std::invalid_argument("sample_params: dimension < 1");
    BasisElement g;
    g.kind = kind;
    g.w.resize(dimension);
    for (int a = 0; a < dimension; ++a) g.w[a] = rng.uniform(box.w_lo, box.w_hi);
    g.b = rng.uniform(box.b_lo, box.b_hi);
    return g;
}

}  // namespace fapprox
