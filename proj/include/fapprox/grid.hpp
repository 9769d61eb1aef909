#pragma once

#include <memory>
#include <vector>

namespace fapprox {

// Midpoint quadrature grid on the unit cube [0,1]^d: points_per_axis nodes
// per axis at (i + 0.5) / points_per_axis, lexicographic order with the
// first axis slowest. cell_weight is the volume of one cell.
struct Grid {
    int dimension = 0;
    int points_per_axis = 0;
    double cell_weight = 0.0;
    // Flattened node coordinates, node k occupies [k*dimension, (k+1)*dimension).
    std::vector<double> nodes;

    std::size_t node_count() const {
        return dimension == 0 ? 0 : nodes.size() / static_cast<std::size_t>(dimension);
    }

    const double* node(std::size_t k) const {
        return nodes.data() + k * static_cast<std::size_t>(dimension);
    }

    // The shared per-axis coordinate list (ascending).
    const std::vector<double>& axis() const { return axis_; }

    bool compatible(const Grid& other) const {
        return dimension == other.dimension && points_per_axis == other.points_per_axis;
    }

    std::vector<double> axis_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Throws std::invalid_argument for dimension < 1, points_per_axis < 2, or a
// node count that would overflow 2^31.
GridPtr make_grid(int dimension, int points_per_axis);

// A function tabulated on a grid: values[k] = f(node k).
struct GridFunction {
    GridPtr grid;
    std::vector<double> values;
};

GridFunction zero_function(GridPtr grid);

// Quadrature inner product cell_weight * sum_k a_k * b_k.
// Throws std::invalid_argument when the grids differ structurally.
double inner_product(const GridFunction& a, const GridFunction& b);

double norm_sq(const GridFunction& a);

// ||g - f||^2 / ||f||^2; throws std::invalid_argument when ||f||^2 == 0.
double normalized_error(const GridFunction& g, const GridFunction& f);

// Piecewise-linear read of a 1-d grid function at x, constant beyond the
// outermost nodes. Throws std::invalid_argument off a 1-d grid.
double interp1(const GridFunction& f, double x);

// Benchmark target, one-dimensional:
// f(x) = 0.2 exp(-(10x-4)^2) + 0.5 exp(-(80x-40)^2) + 0.3 exp(-(80x-20)^2).
double target_value(double x);

// Tabulates the benchmark target; requires grid->dimension == 1.
GridFunction target_function(GridPtr grid);

}  // namespace fapprox
