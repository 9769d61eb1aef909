#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fapprox/grid.hpp"

using namespace fapprox;

TEST_CASE("midpoint grid layout in one dimension") {
    auto g = make_grid(1, 1000);
    CHECK(g->node_count() == 1000);
    CHECK(g->cell_weight == 1.0 / 1000.0);
    CHECK(g->node(0)[0] == 0.5 / 1000.0);
    CHECK(g->node(999)[0] == 999.5 / 1000.0);
    for (std::size_t k = 1; k < g->node_count(); ++k)
        CHECK(g->node(k)[0] > g->node(k - 1)[0]);
    CHECK(g->axis().size() == 1000);
}

TEST_CASE("lexicographic node order with the first axis slowest") {
    auto g = make_grid(2, 7);
    CHECK(g->node_count() == 49);
    CHECK(g->cell_weight == 1.0 / 7.0 / 7.0);
    const auto& ax = g->axis();
    // Second axis cycles fastest.
    CHECK(g->node(0)[0] == ax[0]);
    CHECK(g->node(0)[1] == ax[0]);
    CHECK(g->node(1)[0] == ax[0]);
    CHECK(g->node(1)[1] == ax[1]);
    CHECK(g->node(7)[0] == ax[1]);
    CHECK(g->node(7)[1] == ax[0]);
    CHECK(g->node(48)[0] == ax[6]);
    CHECK(g->node(48)[1] == ax[6]);
}

TEST_CASE("grid constructor rejects bad shapes") {
    CHECK_THROWS_AS(make_grid(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(10, 10), std::invalid_argument);  // 10^10 nodes
}

TEST_CASE("quadrature is exact for products of total degree <= 1") {
    auto g = make_grid(1, 1000);
    GridFunction one = zero_function(g);
    for (auto& v : one.values) v = 1.0;
    GridFunction x = zero_function(g);
    for (std::size_t k = 0; k < x.values.size(); ++k) x.values[k] = g->node(k)[0];

    CHECK(std::abs(inner_product(one, one) - 1.0) <= 1e-9);
    CHECK(std::abs(inner_product(one, x) - 0.5) <= 1e-9);
}

TEST_CASE("quadrature of x*x carries the midpoint second-order error") {
    auto g = make_grid(1, 1000);
    GridFunction x = zero_function(g);
    for (std::size_t k = 0; k < x.values.size(); ++k) x.values[k] = g->node(k)[0];
    const double got = inner_product(x, x);
    CHECK(std::abs(got - 1.0 / 3.0) <= 1e-6);
    // Midpoint underestimates convex integrands by h^2/12 here.
    CHECK(got < 1.0 / 3.0);
    CHECK(std::abs(got - (1.0 / 3.0 - 1.0 / 12.0e6)) <= 1e-12);
}

TEST_CASE("inner product rejects structurally different grids") {
    auto a = zero_function(make_grid(1, 100));
    auto b = zero_function(make_grid(1, 200));
    auto c = zero_function(make_grid(2, 10));
    CHECK_THROWS_AS(inner_product(a, b), std::invalid_argument);
    CHECK_THROWS_AS(inner_product(a, c), std::invalid_argument);
}

TEST_CASE("benchmark target point values") {
    // 0.2/e + 0.5 + 0.3*exp(-400)
    CHECK(target_value(0.5) == doctest::Approx(0.5735758882342885).epsilon(1e-12));
    // Side bumps are negligible at x = 0.4.
    CHECK(target_value(0.4) == doctest::Approx(0.2).epsilon(1e-14));
    // 0.2*exp(-2.25) + 0.3
    CHECK(target_value(0.25) == doctest::Approx(0.3210798449123729).epsilon(1e-12));
    CHECK(target_value(0.0) == doctest::Approx(0.2 * std::exp(-16.0)).epsilon(1e-12));
}

TEST_CASE("target norm matches a high-resolution oracle") {
    auto f = target_function(make_grid(1, 1000));
    const double coarse = norm_sq(f);

    auto fine = target_function(make_grid(1, 131072));
    const double oracle = norm_sq(fine);

    // All squared-target derivatives vanish at the boundary, so the midpoint
    // rule is far beyond second-order accurate on this integrand.
    CHECK(coarse == doctest::Approx(oracle).epsilon(1e-10));
    // Frozen regression value for the production grid.
    CHECK(coarse == doctest::Approx(0.012270307140824176).epsilon(1e-14));
}

TEST_CASE("normalized error of the zero function is exactly one") {
    auto f = target_function(make_grid(1, 1000));
    auto z = zero_function(f.grid);
    CHECK(normalized_error(z, f) == 1.0);
    CHECK(normalized_error(f, f) == 0.0);
}

TEST_CASE("normalized error rejects a zero reference") {
    auto z = zero_function(make_grid(1, 100));
    CHECK_THROWS_AS(normalized_error(z, z), std::invalid_argument);
}

TEST_CASE("target function requires one dimension") {
    CHECK_THROWS_AS(target_function(make_grid(2, 10)), std::invalid_argument);
}
