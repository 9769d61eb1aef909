#include "fapprox/grid.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "fapprox/kernels.hpp"

namespace fapprox {

GridPtr make_grid(int dimension, int points_per_axis) {
    if (dimension < 1) throw std::invalid_argument("make_grid: dimension < 1");
    if (points_per_axis < 2) throw std::invalid_argument("make_grid: points_per_axis < 2");

    std::int64_t count = 1;
    for (int a = 0; a < dimension; ++a) {
        count *= points_per_axis;
        if (count > (std::int64_t{1} << 31))
            throw std::invalid_argument("make_grid: node count overflow");
    }

    auto grid = std::make_shared<Grid>();
    grid->dimension = dimension;
    grid->points_per_axis = points_per_axis;

    double weight = 1.0;
    for (int a = 0; a < dimension; ++a) weight /= points_per_axis;
    grid->cell_weight = weight;

    grid->axis_.resize(points_per_axis);
    for (int i = 0; i < points_per_axis; ++i)
        grid->axis_[i] = (i + 0.5) / points_per_axis;

    const auto n = static_cast<std::size_t>(count);
    grid->nodes.resize(n * static_cast<std::size_t>(dimension));
    std::vector<int> idx(dimension, 0);
    for (std::size_t k = 0; k < n; ++k) {
        for (int a = 0; a < dimension; ++a)
            grid->nodes[k * dimension + a] = grid->axis_[idx[a]];
        // Lexicographic increment, last axis fastest.
        for (int a = dimension - 1; a >= 0; --a) {
            if (++idx[a] < points_per_axis) break;
            idx[a] = 0;
        }
    }
    return grid;
}

GridFunction zero_function(GridPtr grid) {
    GridFunction f;
    f.values.assign(grid->node_count(), 0.0);
    f.grid = std::move(grid);
    return f;
}

double inner_product(const GridFunction& a, const GridFunction& b) {
    if (!a.grid || !b.grid || !a.grid->compatible(*b.grid))
        throw std::invalid_argument("inner_product: incompatible grids");
    return a.grid->cell_weight * kernels::dot(a.values, b.values);
}

double norm_sq(const GridFunction& a) { return inner_product(a, a); }

double normalized_error(const GridFunction& g, const GridFunction& f) {
    const double denom = norm_sq(f);
    if (denom <= 0.0)
        throw std::invalid_argument("normalized_error: zero reference norm");
    GridFunction diff;
    diff.grid = f.grid;
    diff.values = kernels::sub(g.values, f.values);
    return norm_sq(diff) / denom;
}

double interp1(const GridFunction& f, double x) {
    if (f.grid->dimension != 1)
        throw std::invalid_argument("interp1: needs a 1-d grid");
    const auto& ax = f.grid->axis();
    const int p = static_cast<int>(ax.size());
    if (x <= ax.front()) return f.values.front();
    if (x >= ax.back()) return f.values.back();
    const double t = x * p - 0.5;  // node k sits at (k + 0.5) / p
    int k = static_cast<int>(t);
    if (k >= p - 1) k = p - 2;
    return f.values[k] + (t - k) * (f.values[k + 1] - f.values[k]);
}

double target_value(double x) {
    const double a = 10.0 * x - 4.0;
    const double b = 80.0 * x - 40.0;
    const double c = 80.0 * x - 20.0;
    return 0.2 * std::exp(-a * a) + 0.5 * std::exp(-b * b) + 0.3 * std::exp(-c * c);
}

GridFunction target_function(GridPtr grid) {
    if (grid->dimension != 1)
        throw std::invalid_argument("target_function: grid must be one-dimensional");
    GridFunction f;
    f.values.resize(grid->node_count());
    for (std::size_t k = 0; k < f.values.size(); ++k)
        f.values[k] = target_value(grid->node(k)[0]);
    f.grid = std::move(grid);
    return f;
}

}  // namespace fapprox
