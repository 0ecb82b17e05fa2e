#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "maxstein/bounds.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/metrics.hpp"

using namespace maxstein;

TEST_CASE("C_K frozen regression baseline", "[bounds]") {
    // alpha1=2, alpha2=3, d=1, unit point mass; value frozen from the
    // composite-quadrature oracle (two independent routes agree to 1e-9)
    const AngularMeasure delta1(1, {{{1.0}, 1.0}});
    const BoundReport rep = ck_constant(2.0, 3.0, delta1);
    REQUIRE(rep.value == Catch::Approx(1.7926922696758778).epsilon(1e-6));
    REQUIRE(rep.quadrature_error < 1e-6);
}

TEST_CASE("C_W frozen regression baseline", "[bounds]") {
    const AngularMeasure delta1(1, {{{1.0}, 1.0}});
    const BoundReport rep = cw_constant(2.0, 3.0, delta1);
    REQUIRE(rep.value == Catch::Approx(3.9787272735775929).epsilon(1e-6));
    REQUIRE(rep.quadrature_error < 1e-6);
}

TEST_CASE("C_K is at least d and C_W at least d Gamma(1-1/alpha1)", "[bounds]") {
    for (std::size_t d : {1u, 2u, 3u}) {
        const AngularMeasure nu = mixture_measure(d, 0.4);
        REQUIRE(ck_constant(1.5, 2.5, nu).value >= static_cast<double>(d));
        REQUIRE(cw_constant(1.5, 2.5, nu).value >=
                static_cast<double>(d) * std::tgamma(1.0 - 1.0 / 1.5));
    }
}

TEST_CASE("the constants only see the measure through its moments",
          "[bounds]") {
    // after the per-atom substitution the radial integral carries a factor
    // w_k u_k^j, which sums to one per coordinate: any two valid measures of
    // the same dimension give the same constant
    const double a = ck_constant(2.0, 3.0, independence_measure(2)).value;
    const double b = ck_constant(2.0, 3.0, dependence_measure(2)).value;
    const double c = ck_constant(2.0, 3.0, mixture_measure(2, 0.7)).value;
    REQUIRE(a == Catch::Approx(b).epsilon(1e-8));
    REQUIRE(a == Catch::Approx(c).epsilon(1e-8));
}

TEST_CASE("C_W grows as alpha1 drops toward one", "[bounds]") {
    const AngularMeasure nu = independence_measure(2);
    double prev = 0;
    for (double a1 : {1.5, 1.2, 1.1}) {
        const double v = cw_constant(a1, 3.0, nu).value;
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("domain checks", "[bounds]") {
    const AngularMeasure nu = independence_measure(2);
    REQUIRE_THROWS_AS(ck_constant(3.0, 2.0, nu), std::domain_error);
    REQUIRE_THROWS_AS(cw_constant(1.0, 2.0, nu), std::domain_error);
    REQUIRE_THROWS_AS(alpha_bound(3.0, 2.0, nu, BoundMetric::K),
                      std::domain_error);
    REQUIRE_THROWS_AS(
        nu_bound(0.8, nu, dependence_measure(2), BoundMetric::W),
        std::domain_error);
}

TEST_CASE("alpha bound hand values", "[bounds]") {
    const AngularMeasure delta1(1, {{{1.0}, 1.0}});
    REQUIRE(alpha_bound(2.0, 2.0, delta1, BoundMetric::K) == 0.0);
    const double ck = ck_constant(2.0, 3.0, delta1).value;
    REQUIRE(alpha_bound(2.0, 3.0, delta1, BoundMetric::K) ==
            Catch::Approx(ck * (1.0 / 2 + 1.0 / 3)));
}

TEST_CASE("nu bound hand values", "[bounds]") {
    const AngularMeasure indep = independence_measure(2);
    const AngularMeasure dep = dependence_measure(2);
    REQUIRE(nu_bound(1.0, indep, indep, BoundMetric::K) == 0.0);
    REQUIRE(nu_bound(1.0, indep, dep, BoundMetric::K) == Catch::Approx(8.0));
    REQUIRE(nu_bound(1.0, indep, mixture_measure(2, 0.05), BoundMetric::K) ==
            Catch::Approx(0.4));
}

TEST_CASE("measured Kolmogorov distances respect the nu bound", "[bounds]") {
    const MaxStableLaw indep(1.0, independence_measure(2));
    const MaxStableLaw dep(1.0, dependence_measure(2));
    const MaxStableLaw mix(1.0, mixture_measure(2, 0.05));
    const double dk1 = kolmogorov_between_laws(indep, dep).value;
    REQUIRE(dk1 <= nu_bound(1.0, independence_measure(2),
                            dependence_measure(2), BoundMetric::K));
    const double dk2 = kolmogorov_between_laws(indep, mix).value;
    REQUIRE(dk2 <= nu_bound(1.0, independence_measure(2),
                            mixture_measure(2, 0.05), BoundMetric::K));
}

TEST_CASE("measured Kolmogorov distances respect the alpha bound", "[bounds]") {
    const AngularMeasure nu = independence_measure(2);
    const MaxStableLaw l1(2.0, nu);
    const MaxStableLaw l2(3.0, nu);
    const double dk = kolmogorov_between_laws(l1, l2).value;
    REQUIRE(dk <= alpha_bound(2.0, 3.0, nu, BoundMetric::K));
}

TEST_CASE("combined bound dominates and reduces correctly", "[bounds]") {
    const AngularMeasure indep = independence_measure(2);
    const AngularMeasure mix = mixture_measure(2, 0.1);
    REQUIRE(combined_bound(2.0, 2.0, indep, indep, BoundMetric::K) == 0.0);
    const double both = combined_bound(2.0, 3.0, indep, mix, BoundMetric::K);
    const double alpha_part = alpha_bound(2.0, 3.0, indep, BoundMetric::K);
    const double nu_part = nu_bound(3.0, indep, mix, BoundMetric::K);
    REQUIRE(both == Catch::Approx(alpha_part + nu_part));
    REQUIRE(both >= alpha_part);
    REQUIRE(both >= nu_part);

    const MaxStableLaw l1(2.0, indep);
    const MaxStableLaw l2(3.0, mix);
    REQUIRE(kolmogorov_between_laws(l1, l2).value <= both);
}

TEST_CASE("wasserstein variants stay ordered", "[bounds]") {
    // Gamma(1 - 1/alpha) >= 1, so the W flavor dominates the K flavor of
    // the nu bound for every alpha > 1
    const AngularMeasure indep = independence_measure(2);
    const AngularMeasure dep = dependence_measure(2);
    for (double alpha : {1.5, 2.0, 4.0}) {
        REQUIRE(nu_bound(alpha, indep, dep, BoundMetric::W) >=
                nu_bound(alpha, indep, dep, BoundMetric::K) - 1e-12);
    }
}
