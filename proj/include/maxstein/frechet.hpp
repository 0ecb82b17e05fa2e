#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "maxstein/rng.hpp"

namespace maxstein {

// Frechet distribution with shape alpha and scale sigma:
// cdf(x) = exp(-(sigma/x)^alpha) for x > 0, 0 otherwise.
struct FrechetParams {
    double alpha = 1.0;
    double sigma = 1.0;

    FrechetParams() = default;
    FrechetParams(double a, double s) : alpha(a), sigma(s) {
        if (!(alpha > 0)) throw std::domain_error("Frechet shape must be > 0");
        if (!(sigma > 0)) throw std::domain_error("Frechet scale must be > 0");
    }
};

inline double frechet_cdf(const FrechetParams& p, double x) {
    if (!(x > 0)) return 0.0;
    return std::exp(-std::pow(p.sigma / x, p.alpha));
}

inline double frechet_pdf(const FrechetParams& p, double x) {
    if (!(x > 0)) return 0.0;
    const double t = std::pow(p.sigma / x, p.alpha);
    return p.alpha / x * t * std::exp(-t);
}

inline double frechet_quantile(const FrechetParams& p, double q) {
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("Frechet quantile requires q in (0,1)");
    return p.sigma * std::pow(-std::log(q), -1.0 / p.alpha);
}

// E[X] = sigma * Gamma(1 - 1/alpha), finite iff alpha > 1.
inline double frechet_mean(const FrechetParams& p) {
    if (!(p.alpha > 1)) throw std::domain_error("Frechet mean needs alpha > 1");
    return p.sigma * std::tgamma(1.0 - 1.0 / p.alpha);
}

inline double sample_frechet_one(const FrechetParams& p, RngStream& rng) {
    // Quantile inversion: sigma * E^{-1/alpha} with E unit exponential.
    return p.sigma * std::pow(rng.next_exponential(), -1.0 / p.alpha);
}

inline std::vector<double> sample_frechet(const FrechetParams& p,
                                          RngStream rng, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_frechet_one(p, rng);
    return out;
}

}  // namespace maxstein
