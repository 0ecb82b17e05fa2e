#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "maxstein/common.hpp"
#include "maxstein/frechet.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/rng.hpp"

namespace maxstein {

// Decreasing arrival radii of the polar point process: r_i = (G_i / mass)^{-1/alpha}
// with G_i the partial sums of unit exponentials. The counting process of the
// r_i has intensity mass * alpha * r^{-(alpha+1)} dr.
inline std::vector<double> sample_arrival_radii(const MaxStableLaw& law,
                                                RngStream& rng, std::size_t n) {
    if (n == 0) throw std::domain_error("sample_arrival_radii: n must be >= 1");
    const double mass = law.angular().total_mass();
    const double inv_alpha = 1.0 / law.alpha();
    std::vector<double> radii(n);
    double gamma = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gamma += rng.next_exponential();
        radii[i] = std::pow(gamma / mass, -inv_alpha);
    }
    return radii;
}

// Draws an atom index with probability proportional to the given weights.
// Linear CDF scan; atom counts are small and the order is deterministic.
inline std::size_t sample_index(const std::vector<double>& weights,
                                double total, RngStream& rng) {
    const double u = rng.next_double() * total;
    double acc = 0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return k;
    }
    return weights.size() - 1;
}

// Exact sampler: Z^j = max_k R_k v_k^j with R_k independent
// Frechet(alpha, w_k^{1/alpha}) and v_k = u_k^{1/alpha}. Consumes exactly
// one uniform per atom per draw, so parameter sweeps stay stream-aligned.
class ExactSampler {
  public:
    explicit ExactSampler(const MaxStableLaw& law)
        : dimension_(law.dimension()), inv_alpha_(1.0 / law.alpha()) {
        for (const Atom& a : law.marks()) marks_.push_back(a.point);
        for (const Atom& a : law.angular().atoms()) weights_.push_back(a.weight);
    }

    std::size_t dimension() const { return dimension_; }

    // Writes one draw into out[0..d).
    void draw(RngStream& rng, double* out) const {
        for (std::size_t j = 0; j < dimension_; ++j) out[j] = 0;
        for (std::size_t k = 0; k < marks_.size(); ++k) {
            const double e = rng.next_exponential();
            const double r = std::pow(weights_[k] / e, inv_alpha_);
            const Vec& v = marks_[k];
            for (std::size_t j = 0; j < dimension_; ++j) {
                const double c = r * v[j];
                if (c > out[j]) out[j] = c;
            }
        }
    }

    Vec draw(RngStream& rng) const {
        Vec out(dimension_);
        draw(rng, out.data());
        return out;
    }

  private:
    std::size_t dimension_;
    double inv_alpha_;
    std::vector<Vec> marks_;
    std::vector<double> weights_;
};

// n i.i.d. draws, flattened row-major (n x d).
inline std::vector<double> sample_exact(const MaxStableLaw& law, RngStream rng,
                                        std::size_t n) {
    ExactSampler sampler(law);
    std::vector<double> out(n * law.dimension());
    for (std::size_t i = 0; i < n; ++i)
        sampler.draw(rng, out.data() + i * law.dimension());
    return out;
}

// Poisson sampler. Exact for all rates: Knuth's product method in chunks of
// rate <= 30 (a Poisson variable is the sum of independent pieces whose
// rates add up, and chunking avoids the exp(-rate) underflow).
inline std::uint64_t sample_poisson(double rate, RngStream& rng) {
    if (!(rate >= 0)) throw std::domain_error("poisson: rate must be >= 0");
    std::uint64_t total = 0;
    auto knuth = [&rng](double r) {
        const double limit = std::exp(-r);
        double prod = rng.next_double();
        std::uint64_t n = 0;
        while (prod > limit) {
            prod *= rng.next_double();
            ++n;
        }
        return n;
    };
    while (rate > 30.0) {
        total += knuth(30.0);
        rate -= 30.0;
    }
    return total + knuth(rate);
}

}  // namespace maxstein
