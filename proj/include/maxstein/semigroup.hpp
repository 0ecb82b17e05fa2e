#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "maxstein/common.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/parallel.hpp"
#include "maxstein/quadrature.hpp"
#include "maxstein/rng.hpp"
#include "maxstein/sampling.hpp"
#include "maxstein/testfunctions.hpp"

namespace maxstein {

// gamma_t = e^t - 1, the clock of the max-stable Ornstein-Uhlenbeck analogue.
inline double gamma_clock(double t) { return std::expm1(t); }

// alpha * (max_j log(x^j/z^j))_+ : the first time the deterministic part of
// the semigroup flow enters [0, z].
inline double entry_time(const MaxStableLaw& law, const Vec& x, const Vec& z) {
    double m = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] <= 0) continue;
        m = std::max(m, std::log(x[j] / z[j]));
    }
    return law.alpha() * m;
}

// Exact value of P_t applied to the indicator of [0, z]:
//   F(z)^{1 - e^{-t}} * 1{ t >= entry_time(x, z) }.
inline double semigroup_indicator(const MaxStableLaw& law, double t,
                                  const Vec& x, const Vec& z) {
    if (!(t >= 0)) throw std::domain_error("semigroup: t must be >= 0");
    if (x.size() != law.dimension() || z.size() != law.dimension())
        throw std::domain_error("semigroup: dimension mismatch");
    for (double zj : z)
        if (!(zj > 0))
            throw std::domain_error("semigroup_indicator: z must be positive");
    if (t < entry_time(law, x, z)) return 0.0;
    const double f = cdf(law, z);
    return std::pow(f, -std::expm1(-t));
}

// Monte Carlo estimate of P_t h(x) = E[ h(e^{-t/alpha} x + (1-e^{-t})^{1/alpha} Z) ],
// "+" meaning the coordinatewise maximum. Replicate i uses rng.substream(i);
// block accumulation keeps the result identical across thread counts.
template <class H>
Estimate semigroup_mc(const MaxStableLaw& law, double t, const Vec& x,
                      const H& h, const RngStream& rng, std::size_t reps,
                      unsigned threads = 0) {
    if (!(t >= 0)) throw std::domain_error("semigroup: t must be >= 0");
    if (x.size() != law.dimension())
        throw std::domain_error("semigroup: dimension mismatch");
    const std::size_t d = law.dimension();
    const double decay = std::exp(-t / law.alpha());
    const double mix = std::pow(-std::expm1(-t), 1.0 / law.alpha());
    ExactSampler sampler(law);

    const std::size_t n_blocks =
        (reps + kDefaultBlockSize - 1) / kDefaultBlockSize;
    std::vector<MeanAccumulator> acc(n_blocks);
    parallel_for_blocks(
        reps, kDefaultBlockSize,
        [&](std::size_t block, std::size_t begin, std::size_t end) {
            Vec z(d), y(d);
            for (std::size_t i = begin; i < end; ++i) {
                RngStream stream = rng.substream(i);
                sampler.draw(stream, z.data());
                for (std::size_t j = 0; j < d; ++j)
                    y[j] = std::max(decay * x[j], mix * z[j]);
                acc[block].add(h(y.data(), d));
            }
        },
        threads);

    MeanAccumulator total;
    for (const auto& a : acc) total.merge(a);
    return {total.mean(), total.std_error()};
}

struct ChaosEstimate {
    double value = 0;
    double std_error = 0;
    double mean_points = 0;  // empirical mean of the Poisson count
};

// One-jump (chaos) representation of the same quantity: throw a Poisson
// number of exponent-measure points conditioned to leave [0, x], take the
// maximum with x, shrink by e^{-t/alpha}. Requires x strictly positive so
// that the conditioning mass mu[0,x]^c is finite.
template <class H>
ChaosEstimate semigroup_chaos(const MaxStableLaw& law, double t, const Vec& x,
                              const H& h, const RngStream& rng,
                              std::size_t reps, unsigned threads = 0) {
    if (!(t >= 0)) throw std::domain_error("semigroup: t must be >= 0");
    if (x.size() != law.dimension())
        throw std::domain_error("semigroup: dimension mismatch");
    for (double xj : x)
        if (!(xj > 0))
            throw std::domain_error(
                "semigroup_chaos: x must be strictly positive");

    const std::size_t d = law.dimension();
    const double alpha = law.alpha();
    const double decay = std::exp(-t / alpha);
    const double gamma = gamma_clock(t);

    // Per-atom exit thresholds rho_k and conditioning probabilities.
    const std::vector<Atom> marks = law.marks();
    std::vector<double> rho(marks.size()), prob(marks.size());
    double mu_c = 0;
    for (std::size_t k = 0; k < marks.size(); ++k) {
        double r = kInf;
        for (std::size_t j = 0; j < d; ++j)
            if (marks[k].point[j] > 0)
                r = std::min(r, x[j] / marks[k].point[j]);
        rho[k] = r;
        prob[k] = marks[k].weight * std::pow(r, -alpha);
        mu_c += prob[k];
    }
    const double rate = gamma * mu_c;

    const std::size_t n_blocks =
        (reps + kDefaultBlockSize - 1) / kDefaultBlockSize;
    std::vector<MeanAccumulator> acc(n_blocks), count_acc(n_blocks);
    parallel_for_blocks(
        reps, kDefaultBlockSize,
        [&](std::size_t block, std::size_t begin, std::size_t end) {
            Vec y(d);
            for (std::size_t i = begin; i < end; ++i) {
                RngStream stream = rng.substream(i);
                const std::uint64_t n_pts = sample_poisson(rate, stream);
                y = x;
                for (std::uint64_t p = 0; p < n_pts; ++p) {
                    const std::size_t k = sample_index(prob, mu_c, stream);
                    // Pareto conditioning beyond the exit threshold
                    const double r =
                        rho[k] * std::pow(stream.next_double(), -1.0 / alpha);
                    for (std::size_t j = 0; j < d; ++j)
                        y[j] = std::max(y[j], r * marks[k].point[j]);
                }
                for (std::size_t j = 0; j < d; ++j) y[j] *= decay;
                acc[block].add(h(y.data(), d));
                count_acc[block].add(static_cast<double>(n_pts));
            }
        },
        threads);

    MeanAccumulator total, counts;
    for (const auto& a : acc) total.merge(a);
    for (const auto& a : count_acc) counts.merge(a);
    return {total.mean(), total.std_error(), counts.mean()};
}

// --- generator ---------------------------------------------------------------

// A test function given by callables: value plus gradient.
struct DifferentiableFunction {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
};

struct GeneratorQuery {
    const MaxStableLaw& law;
    Vec x;
    QuadratureSpec quad = {};
};

// Generator of the semigroup, drift-minus-jump form:
//   L h(x) = -(1/alpha) <x, grad h(x)> + sum_k w_k
//            int_{rho_k}^inf [h(x + r v_k) - h(x)] alpha r^{-(alpha+1)} dr.
// The radial integral is compactified by r = rho/(1-s) and evaluated
// adaptively to the query's tolerances; non-convergence raises
// QuadratureError carrying the achieved error.
inline double generator_apply(const GeneratorQuery& q,
                              const DifferentiableFunction& h) {
    const MaxStableLaw& law = q.law;
    const std::size_t d = law.dimension();
    if (q.x.size() != d)
        throw std::domain_error("generator_apply: dimension mismatch");
    for (double xj : q.x)
        if (!(xj > 0))
            throw std::domain_error("generator_apply: x must be strictly positive");
    const double alpha = law.alpha();

    const Vec grad = h.gradient(q.x);
    double drift = 0;
    for (std::size_t j = 0; j < d; ++j) drift += q.x[j] * grad[j];
    drift *= -1.0 / alpha;

    const double h_x = h.value(q.x);
    double jump = 0;
    Vec y(d);
    for (const Atom& mark : law.marks()) {
        double rho = kInf;
        for (std::size_t j = 0; j < d; ++j)
            if (mark.point[j] > 0) rho = std::min(rho, q.x[j] / mark.point[j]);
        if (!(rho < kInf)) continue;
        auto integrand = [&](double r) {
            for (std::size_t j = 0; j < d; ++j)
                y[j] = mark.point[j] > 0 ? std::max(q.x[j], r * mark.point[j])
                                         : q.x[j];
            return (h.value(y) - h_x) * alpha * std::pow(r, -(alpha + 1.0));
        };
        // geometric ladder above the threshold keeps features of h (clip
        // caps, box edges) from slipping between the nodes of one wide rule;
        // the far tail is compactified as r = a/(1-s)
        QuadratureResult res;
        double lo = rho;
        for (int k = 0; k < 20; ++k) {
            const double hi = lo * 2.0;
            const QuadratureResult piece =
                integrate_adaptive(integrand, lo, hi, q.quad);
            res.value += piece.value;
            res.error_estimate += piece.error_estimate;
            res.converged = res.converged && piece.converged;
            lo = hi;
        }
        const QuadratureResult far = integrate_tail(integrand, lo, q.quad);
        res.value += far.value;
        res.error_estimate += far.error_estimate;
        res.converged = res.converged && far.converged;
        if (!res.converged)
            throw QuadratureError("generator_apply: radial quadrature failed",
                                  res.error_estimate);
        jump += mark.weight * res.value;
    }
    return drift + jump;
}

// Fast generator evaluation for bank functions: analytic gradients for the
// drift, exact piecewise or panelled jump integrals per mark. Same value as
// generator_apply, minus the adaptive machinery.
inline double generator_value(const MaxStableLaw& law, const TestFunction& f,
                              const double* x, std::size_t d,
                              const std::vector<Atom>& marks) {
    const double alpha = law.alpha();
    double grad[16];
    f.gradient(x, d, grad);
    double drift = 0;
    for (std::size_t j = 0; j < d; ++j) drift += x[j] * grad[j];
    drift *= -1.0 / alpha;

    double jump = 0;
    for (const Atom& mark : marks)
        jump += mark.weight *
                ray_jump_integral(f, x, d, mark.point.data(), alpha);
    return drift + jump;
}

inline double generator_value(const MaxStableLaw& law, const TestFunction& f,
                              const Vec& x) {
    return generator_value(law, f, x.data(), x.size(), law.marks());
}

// Batched generator evaluation for a whole bank at one point. Piecewise
// closed forms handle the clip and ramp members; the soft-min members share
// one set of radial quadrature nodes per mark, which is where the budget of
// a million-draw identity check goes.
class BankGeneratorKernel {
  public:
    BankGeneratorKernel(const MaxStableLaw& law, const TestFunctionBank& bank)
        : law_(law),
          bank_(bank),
          d_(law.dimension()),
          alpha_(law.alpha()),
          marks_(law.marks()) {
        if (bank.members.size() > 16)
            throw std::invalid_argument("bank kernel: at most 16 members");
        for (std::size_t q = 0; q < bank.members.size(); ++q) {
            if (bank.members[q].kind == TestFunctionKind::SoftMin)
                soft_.push_back(q);
            else
                closed_.push_back(q);
        }
        if (soft_.size() > 8)
            throw std::invalid_argument("bank kernel: at most 8 soft members");
    }

    std::size_t size() const { return bank_.members.size(); }

    // out[q] = L f_q(x)
    void evaluate(const double* x, double* out) const {
        double grad[16];
        for (std::size_t q = 0; q < size(); ++q) {
            const TestFunction& f = bank_.members[q];
            f.gradient(x, d_, grad);
            double bracket = 0;
            for (std::size_t j = 0; j < d_; ++j) bracket += x[j] * grad[j];
            out[q] = -bracket / alpha_;
        }
        for (std::size_t q : closed_)
            for (const Atom& mark : marks_)
                out[q] += mark.weight * ray_jump_integral(bank_.members[q], x,
                                                          d_, mark.point.data(),
                                                          alpha_);
        if (soft_.empty()) return;

        const GaussLegendre& gl = gauss_legendre_16();
        double h_x[8];
        for (std::size_t s = 0; s < soft_.size(); ++s)
            h_x[s] = bank_.members[soft_[s]].value(x, d_);

        double cuts[24];
        double y[16];
        for (const Atom& mark : marks_) {
            const double* v = mark.point.data();
            double rho = kInf;
            for (std::size_t j = 0; j < d_; ++j)
                if (v[j] > 0) rho = std::min(rho, x[j] / v[j]);
            const double big_u = std::pow(rho, -alpha_);
            // cut set is shared by the soft-min members (tau-independent)
            std::size_t n_cuts = 0;
            auto add_cut = [&](double r_cut) {
                if (!(r_cut > 0) || n_cuts >= 23) return;
                const double u = std::pow(r_cut, -alpha_);
                if (u > 0 && u < big_u) cuts[n_cuts++] = u;
            };
            for (std::size_t j = 0; j < d_; ++j) {
                if (v[j] == 0) continue;
                add_cut(x[j] / v[j]);
                for (std::size_t k = 0; k < d_; ++k)
                    if (v[k] == 0) add_cut(x[k] / v[j]);
            }
            cuts[n_cuts++] = big_u;
            std::sort(cuts, cuts + n_cuts);

            const double p = alpha_ > 1.0 ? alpha_ / (alpha_ - 1.0) : 3.0;
            auto accumulate_nodes = [&](double a, double b, bool graded) {
                for (std::size_t n = 0; n < gl.nodes.size(); ++n) {
                    double u, jac;
                    if (graded) {
                        const double s = gl.nodes[n];
                        u = b * std::pow(s, p);
                        jac = b * p * std::pow(s, p - 1.0);
                    } else {
                        u = a + (b - a) * gl.nodes[n];
                        jac = b - a;
                    }
                    const double r = std::pow(u, -1.0 / alpha_);
                    for (std::size_t j = 0; j < d_; ++j)
                        y[j] = v[j] > 0 ? std::max(x[j], r * v[j]) : x[j];
                    const double w = gl.weights[n] * jac * mark.weight;
                    for (std::size_t s = 0; s < soft_.size(); ++s)
                        out[soft_[s]] +=
                            w * (bank_.members[soft_[s]].value(y, d_) - h_x[s]);
                }
            };
            double lo = 0;
            for (std::size_t c = 0; c < n_cuts; ++c) {
                const double hi = cuts[c];
                if (!(hi > lo)) continue;
                if (lo == 0) {
                    accumulate_nodes(0.0, hi, true);
                } else {
                    double a = lo;
                    while (a < hi) {
                        const double b = std::min(hi, 8.0 * a);
                        accumulate_nodes(a, b, false);
                        a = b;
                    }
                }
                lo = hi;
            }
        }
    }

  private:
    const MaxStableLaw& law_;
    const TestFunctionBank& bank_;
    std::size_t d_;
    double alpha_;
    std::vector<Atom> marks_;
    std::vector<std::size_t> soft_;
    std::vector<std::size_t> closed_;
};

// Stein-identity experiment: mean of L f over exact draws of Z, one result
// per bank member. Under the target law each mean is zero in expectation.
struct SteinIdentityRow {
    std::string function;
    double mean = 0;
    double std_error = 0;
};

inline std::vector<SteinIdentityRow> stein_identity_check(
    const MaxStableLaw& law, const TestFunctionBank& bank, const RngStream& rng,
    std::size_t reps, unsigned threads = 0) {
    const std::size_t d = law.dimension();
    const std::size_t nf = bank.members.size();
    if (nf > 16)
        throw std::invalid_argument("stein_identity_check: bank too large");
    const BankGeneratorKernel kernel(law, bank);
    ExactSampler sampler(law);

    const std::size_t n_blocks =
        (reps + kDefaultBlockSize - 1) / kDefaultBlockSize;
    std::vector<MeanAccumulator> acc(n_blocks * nf);
    parallel_for_blocks(
        reps, kDefaultBlockSize,
        [&](std::size_t block, std::size_t begin, std::size_t end) {
            Vec z(d);
            double values[16];
            for (std::size_t i = begin; i < end; ++i) {
                RngStream stream = rng.substream(i);
                sampler.draw(stream, z.data());
                kernel.evaluate(z.data(), values);
                for (std::size_t q = 0; q < nf; ++q)
                    acc[block * nf + q].add(values[q]);
            }
        },
        threads);

    std::vector<SteinIdentityRow> rows(nf);
    for (std::size_t q = 0; q < nf; ++q) {
        MeanAccumulator total;
        for (std::size_t b = 0; b < n_blocks; ++b) total.merge(acc[b * nf + q]);
        rows[q] = {bank.members[q].name, total.mean(), total.std_error()};
    }
    return rows;
}

}  // namespace maxstein
