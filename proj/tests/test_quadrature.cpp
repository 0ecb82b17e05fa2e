#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "maxstein/quadrature.hpp"

using namespace maxstein;

TEST_CASE("polynomials integrate exactly", "[quadrature]") {
    auto f = [](double x) { return 3 * x * x - 2 * x + 1; };
    const QuadratureResult r = integrate_adaptive(f, 0.0, 2.0, {});
    REQUIRE(r.value == Catch::Approx(8.0 - 4.0 + 2.0).epsilon(1e-13));
}

TEST_CASE("oscillatory integrand converges", "[quadrature]") {
    auto f = [](double x) { return std::sin(40 * x); };
    const QuadratureResult r = integrate_adaptive(f, 0.0, M_PI, {});
    REQUIRE(r.converged);
    // int_0^pi sin(40x) dx = (1 - cos(40 pi))/40 = 0
    REQUIRE(r.value == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("integrable endpoint singularity", "[quadrature]") {
    auto f = [](double x) { return 1.0 / std::sqrt(x); };
    const QuadratureResult r = integrate_adaptive(f, 0.0, 1.0, {1e-10, 1e-9, 8000});
    REQUIRE(r.converged);
    REQUIRE(r.value == Catch::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("tail compactification handles power decay", "[quadrature]") {
    // int_2^inf x^{-3} dx = 1/8
    auto f = [](double x) { return std::pow(x, -3.0); };
    const QuadratureResult r = integrate_tail(f, 2.0, {});
    REQUIRE(r.converged);
    REQUIRE(r.value == Catch::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("tail from zero splits correctly", "[quadrature]") {
    // int_0^inf e^{-x} dx = 1
    auto f = [](double x) { return std::exp(-x); };
    const QuadratureResult r = integrate_tail(f, 0.0, {});
    REQUIRE(r.converged);
    REQUIRE(r.value == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("budget exhaustion reports failure honestly", "[quadrature]") {
    // a hard step function with a tiny budget
    auto f = [](double x) { return x < 0.3141592653589 ? 1.0 : 0.0; };
    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-15;
    spec.max_subdivisions = 3;
    const QuadratureResult r = integrate_adaptive(f, 0.0, 1.0, spec);
    REQUIRE_FALSE(r.converged);
    REQUIRE_THROWS_AS(integrate_or_throw(f, 0.0, 1.0, spec), QuadratureError);
}

TEST_CASE("gauss-legendre nodes integrate high-degree polynomials", "[quadrature]") {
    const GaussLegendre& gl = gauss_legendre_16();
    // degree 31 is the exactness limit of 16 nodes
    double sum = 0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
        sum += gl.weights[i] * std::pow(gl.nodes[i], 31);
    REQUIRE(sum == Catch::Approx(1.0 / 32.0).epsilon(1e-12));
    double wsum = 0;
    for (double w : gl.weights) wsum += w;
    REQUIRE(wsum == Catch::Approx(1.0).epsilon(1e-13));
}
