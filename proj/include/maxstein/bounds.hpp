#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "maxstein/common.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/quadrature.hpp"

namespace maxstein {

struct BoundReport {
    std::string constant_name;
    double value = 0;
    double quadrature_error = 0;
    double alpha1 = 0;
    double alpha2 = 0;
    std::string measure;  // short descriptor of nu
};

namespace detail {

// P( Z^beta min Z <= s ) = exp(-min(s^{-alpha/beta}, s^{-alpha})) for a
// Frechet(alpha) variable Z and beta >= 1: the minimum is below s as soon as
// Z <= max(s^{1/beta}, s).
inline double min_power_prob(double s, double alpha, double beta) {
    if (!(s > 0)) return 0.0;
    const double e1 = std::pow(s, -alpha / beta);
    const double e2 = std::pow(s, -alpha);
    return std::exp(-std::min(e1, e2));
}

inline std::string measure_descriptor(const AngularMeasure& nu) {
    std::string s = "d=" + std::to_string(nu.dimension()) +
                    ",atoms=" + std::to_string(nu.size());
    return s;
}

// Radial integral of phi(r v) alpha r^{-(alpha+1)} dr over (0, inf) for one
// atom coordinate v > 0, split at the |log| kink r = 1/v and tail-compactified.
template <class Phi>
double radial_integral(const Phi& phi, double v, double alpha,
                       const QuadratureSpec& spec, double* err) {
    auto f = [&](double r) {
        if (!(r > 0)) return 0.0;
        const double p = phi(r * v);
        if (p == 0) return 0.0;  // avoid 0 * inf at deeply subdivided nodes
        return p * alpha * std::pow(r, -(alpha + 1.0));
    };
    const double kink = 1.0 / v;  // where log(r v) changes sign
    // the head integrand rises from an essential zero through a steep wall,
    // so it gets a geometric pre-split
    QuadratureResult head = integrate_geometric(f, 0.0, kink, spec);
    QuadratureResult tail = integrate_tail(f, kink, spec);
    if (!head.converged || !tail.converged)
        throw QuadratureError("bound constant quadrature failed",
                              head.error_estimate + tail.error_estimate);
    *err += head.error_estimate + tail.error_estimate;
    return head.value + tail.value;
}

}  // namespace detail

// C^K = d + sum_j sum_k w_k int_0^inf |log(r v_k^j)| P(Z^beta min Z <= r v_k^j)
//       alpha1 r^{-(alpha1+1)} dr  with beta = alpha2/alpha1, v_k = u_k^{1/alpha1}.
inline BoundReport ck_constant(double alpha1, double alpha2,
                               const AngularMeasure& nu,
                               const QuadratureSpec& spec = {1e-10, 1e-8, 8000}) {
    if (!(alpha1 > 0 && alpha2 > alpha1))
        throw std::domain_error("ck_constant: needs 0 < alpha1 < alpha2");
    const double beta = alpha2 / alpha1;
    const std::size_t d = nu.dimension();
    BoundReport rep;
    rep.constant_name = "C_K";
    rep.alpha1 = alpha1;
    rep.alpha2 = alpha2;
    rep.measure = detail::measure_descriptor(nu);

    auto phi = [&](double s) {
        if (!(s > 0)) return 0.0;
        const double p = detail::min_power_prob(s, alpha1, beta);
        if (p == 0) return 0.0;  // |log s| * 0 without the inf*0 hazard
        return std::abs(std::log(s)) * p;
    };
    double total = static_cast<double>(d);
    for (const Atom& a : nu.atoms()) {
        if (a.weight == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = std::pow(a.point[j], 1.0 / alpha1);
            if (v == 0) continue;  // zero coordinate contributes nothing
            total += a.weight *
                     detail::radial_integral(phi, v, alpha1, spec,
                                             &rep.quadrature_error);
        }
    }
    rep.value = total;
    return rep;
}

// C^W = d Gamma(1 - 1/alpha1) + same integral with the extra factor (1 max r v).
inline BoundReport cw_constant(double alpha1, double alpha2,
                               const AngularMeasure& nu,
                               const QuadratureSpec& spec = {1e-10, 1e-8, 8000}) {
    if (!(alpha1 > 1 && alpha2 > alpha1))
        throw std::domain_error("cw_constant: needs 1 < alpha1 < alpha2");
    const double beta = alpha2 / alpha1;
    const std::size_t d = nu.dimension();
    BoundReport rep;
    rep.constant_name = "C_W";
    rep.alpha1 = alpha1;
    rep.alpha2 = alpha2;
    rep.measure = detail::measure_descriptor(nu);

    auto phi = [&](double s) {
        if (!(s > 0)) return 0.0;
        const double p = detail::min_power_prob(s, alpha1, beta);
        if (p == 0) return 0.0;
        return std::max(1.0, s) * std::abs(std::log(s)) * p;
    };
    double total = static_cast<double>(d) * std::tgamma(1.0 - 1.0 / alpha1);
    for (const Atom& a : nu.atoms()) {
        if (a.weight == 0) continue;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = std::pow(a.point[j], 1.0 / alpha1);
            if (v == 0) continue;
            total += a.weight *
                     detail::radial_integral(phi, v, alpha1, spec,
                                             &rep.quadrature_error);
        }
    }
    rep.value = total;
    return rep;
}

enum class BoundMetric { K, W };

// Right-hand side of the stability-index comparison:
//   C * (1/alpha1 + 1/alpha2) * |alpha1 - alpha2|.
inline double alpha_bound(double alpha1, double alpha2,
                          const AngularMeasure& nu, BoundMetric metric,
                          const QuadratureSpec& spec = {1e-10, 1e-8, 8000}) {
    if (alpha1 == alpha2) return 0.0;
    if (!(alpha1 < alpha2))
        throw std::domain_error("alpha_bound: needs alpha1 <= alpha2");
    const BoundReport rep = metric == BoundMetric::K
                                ? ck_constant(alpha1, alpha2, nu, spec)
                                : cw_constant(alpha1, alpha2, nu, spec);
    return rep.value * (1.0 / alpha1 + 1.0 / alpha2) * std::abs(alpha1 - alpha2);
}

// Right-hand side of the angular-measure comparison: d * d_TV for the
// Kolmogorov metric, d Gamma(1-1/alpha) d_TV for the Wasserstein one.
inline double nu_bound(double alpha, const AngularMeasure& nu1,
                       const AngularMeasure& nu2, BoundMetric metric) {
    if (nu1.dimension() != nu2.dimension())
        throw std::domain_error("nu_bound: dimension mismatch");
    const double d = static_cast<double>(nu1.dimension());
    const double tv = tv_distance(nu1, nu2);
    if (metric == BoundMetric::K) return d * tv;
    if (!(alpha > 1))
        throw std::domain_error("nu_bound: Wasserstein metric needs alpha > 1");
    return d * std::tgamma(1.0 - 1.0 / alpha) * tv;
}

// Triangulation through MS(alpha2, nu1): alpha comparison plus measure
// comparison at the larger index.
inline double combined_bound(double alpha1, double alpha2,
                             const AngularMeasure& nu1,
                             const AngularMeasure& nu2, BoundMetric metric,
                             const QuadratureSpec& spec = {1e-10, 1e-8, 8000}) {
    return alpha_bound(alpha1, alpha2, nu1, metric, spec) +
           nu_bound(alpha2, nu1, nu2, metric);
}

}  // namespace maxstein
