#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxstein/common.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/parallel.hpp"
#include "maxstein/quadrature.hpp"
#include "maxstein/rng.hpp"
#include "maxstein/sampling.hpp"
#include "maxstein/semigroup.hpp"
#include "maxstein/testfunctions.hpp"

namespace maxstein {

// Stein solution for the indicator h_z = 1_{[0,z]}:
//   g_z(x) = M F - F * int_M^inf (F^{-e^{-t}} - 1) dt,
// with F = F_Z(z) and M = alpha (max_j log x^j/z^j)_+ . Everything below is
// closed form except the tail integral, which after u = e^{-t} becomes the
// bounded smooth integrand expm1(-u log F)/u on (0, e^{-M}].
class IndicatorSolution {
  public:
    IndicatorSolution(const MaxStableLaw& law, Vec z, QuadratureSpec tail = {})
        : law_(law), z_(std::move(z)), tail_(tail) {
        if (z_.size() != law.dimension())
            throw std::invalid_argument("indicator solution: dimension mismatch");
        for (double zj : z_)
            if (!(zj > 0))
                throw std::invalid_argument(
                    "indicator solution: z must be strictly positive");
        f_ = cdf(law, z_);
        if (!(f_ > 0 && f_ < 1))
            throw std::invalid_argument(
                "indicator solution: F_Z(z) must lie in (0,1)");
        log_f_ = std::log(f_);
    }

    const MaxStableLaw& law() const { return law_; }
    const Vec& z() const { return z_; }
    double cdf_at_z() const { return f_; }

    double entry_time(const Vec& x) const {
        double m = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (x[j] > 0) m = std::max(m, std::log(x[j] / z_[j]));
        return law_.alpha() * m;
    }

    double value(const Vec& x) const {
        check_dim(x);
        const double m = entry_time(x);
        const double upper = std::exp(-m);
        auto integrand = [this](double u) {
            return std::expm1(-u * log_f_) / u;
        };
        const QuadratureResult res =
            integrate_adaptive(integrand, 0.0, upper, tail_);
        if (!res.converged)
            throw QuadratureError("g_z tail quadrature failed",
                                  res.error_estimate);
        return m * f_ - f_ * res.value;
    }

    // Gradient where g_z is differentiable: zero inside (0, z), a single
    // nonzero entry (alpha/x^j) F^{1 - (z^j/x^j)^alpha} at the unique
    // maximizer of x^j/z^j outside. A tied maximizer (relative tolerance
    // 1e-12) or a point on the boundary is out of the domain.
    Vec gradient(const Vec& x) const {
        check_dim(x);
        for (double xj : x)
            if (!(xj > 0))
                throw std::domain_error("g_z gradient: x must be strictly positive");
        Vec out(x.size(), 0.0);
        std::size_t j0 = 0;
        const double mr = max_ratio(x, &j0);
        if (mr < 1.0) {
            require_unique_or_inside(x, j0, mr);
            return out;  // constant region
        }
        require_unique(x, j0, mr);
        if (mr == 1.0)
            throw std::domain_error("g_z gradient: x on the boundary of [0,z]");
        const double alpha = law_.alpha();
        out[j0] = alpha / x[j0] *
                  std::pow(f_, 1.0 - std::pow(z_[j0] / x[j0], alpha));
        return out;
    }

    // Jump part D g_z(x), closed form on both sides of the box.
    double jump(const Vec& x) const {
        check_dim(x);
        std::size_t j0 = 0;
        const double mr = max_ratio(x, &j0);
        if (mr < 1.0) return 1.0 - f_;
        require_unique(x, j0, mr);
        if (mr == 1.0)
            throw std::domain_error("g_z jump: x on the boundary of [0,z]");
        const double alpha = law_.alpha();
        return std::pow(f_, 1.0 - std::pow(z_[j0] / x[j0], alpha)) - f_;
    }

    // L g_z(x) - (1_{[0,z]}(x) - F). With the drift-minus convention the
    // residual vanishes identically; with the plus sign it does not, which
    // is exactly the regression this function exists to guard.
    enum class GeneratorSign { minus, plus };

    double stein_residual(const Vec& x,
                          GeneratorSign sign = GeneratorSign::minus) const {
        check_dim(x);
        for (std::size_t j = 0; j < x.size(); ++j)
            if (x[j] == z_[j])
                throw std::domain_error(
                    "stein residual: x^j == z^j is out of the domain");
        std::size_t j0 = 0;
        const double mr = max_ratio(x, &j0);
        const double indicator = mr < 1.0 ? 1.0 : 0.0;
        const Vec grad = gradient(x);
        double bracket = 0;
        for (std::size_t j = 0; j < x.size(); ++j) bracket += x[j] * grad[j];
        const double drift =
            (sign == GeneratorSign::minus ? -1.0 : 1.0) / law_.alpha() * bracket;
        return drift + jump(x) - (indicator - f_);
    }

  private:
    void check_dim(const Vec& x) const {
        if (x.size() != z_.size())
            throw std::domain_error("indicator solution: dimension mismatch");
    }

    double max_ratio(const Vec& x, std::size_t* argmax) const {
        double mr = -kInf;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double r = x[j] / z_[j];
            if (r > mr) {
                mr = r;
                *argmax = j;
            }
        }
        return mr;
    }

    void require_unique(const Vec& x, std::size_t j0, double mr) const {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j == j0) continue;
            const double r = x[j] / z_[j];
            if (mr - r <= 1e-12 * mr)
                throw std::domain_error(
                    "g_z: tied maximizer of x^j/z^j, not differentiable here");
        }
    }

    void require_unique_or_inside(const Vec&, std::size_t, double) const {
        // inside the box the function is constant; ties are harmless
    }

    MaxStableLaw law_;
    Vec z_;
    QuadratureSpec tail_;
    double f_ = 0;
    double log_f_ = 0;
};

// --- smooth Stein solution -----------------------------------------------------

// g_h(x) = -int_0^inf [P_t h(x) - E h(Z)] dt for a smooth Lipschitz h and
// alpha > 1. The time integral uses one frozen draw of Z per replicate across
// the whole time axis (common random numbers), so each replicate contributes
// a smooth path integral and the standard error reflects only the Monte Carlo
// spread of those paths.
class SmoothSolution {
  public:
    SmoothSolution(const MaxStableLaw& law, TestFunction h,
                   QuadratureSpec time_quad = {1e-9, 1e-7, 400},
                   std::size_t inner_reps = 100000)
        : law_(law), h_(std::move(h)), quad_(time_quad), reps_(inner_reps) {
        if (!(law.alpha() > 1))
            throw std::invalid_argument("smooth solution: needs alpha > 1");
    }

    const MaxStableLaw& law() const { return law_; }
    std::size_t inner_reps() const { return reps_; }

    // Path integral for one frozen z: -int [h(flow_t(x,z)) - h(z)] dt with
    // the substitution s = e^{-t/alpha} (t = -alpha log s, dt = -alpha/s ds).
    double path_integral(const Vec& x, const Vec& z) const {
        const std::size_t d = x.size();
        const double alpha = law_.alpha();
        const double h_z = h_.value(z.data(), d);
        Vec y(d);
        auto integrand = [&](double s) {
            const double t = -alpha * std::log(s);
            const double mix = std::pow(-std::expm1(-t), 1.0 / alpha);
            for (std::size_t j = 0; j < d; ++j)
                y[j] = std::max(s * x[j], mix * z[j]);
            return (h_.value(y.data(), d) - h_z) * alpha / s;
        };
        const QuadratureResult res = integrate_adaptive(integrand, 0.0, 1.0, quad_);
        if (!res.converged)
            throw QuadratureError("g_h time quadrature failed",
                                  res.error_estimate);
        return -res.value;
    }

    Estimate value(const Vec& x, const RngStream& rng,
                   unsigned threads = 0) const {
        check(x);
        const std::size_t d = law_.dimension();
        ExactSampler sampler(law_);
        const std::size_t n_blocks =
            (reps_ + kDefaultBlockSize - 1) / kDefaultBlockSize;
        std::vector<MeanAccumulator> acc(n_blocks);
        parallel_for_blocks(
            reps_, kDefaultBlockSize,
            [&](std::size_t block, std::size_t begin, std::size_t end) {
                Vec z(d);
                for (std::size_t i = begin; i < end; ++i) {
                    RngStream stream = rng.substream(i);
                    sampler.draw(stream, z.data());
                    acc[block].add(path_integral(x, z));
                }
            },
            threads);
        MeanAccumulator total;
        for (const auto& a : acc) total.merge(a);
        return {total.mean(), total.std_error()};
    }

    // Central finite difference of g_h in coordinate j with the same frozen
    // draws on both sides; the reported standard error is that of the paired
    // per-replicate difference quotients.
    Estimate gradient_fd(const Vec& x, std::size_t j, double eps,
                         const RngStream& rng, unsigned threads = 0) const {
        check(x);
        Vec xp = x, xm = x;
        xp[j] += eps;
        xm[j] -= eps;
        if (!(xm[j] > 0))
            throw std::domain_error("gradient_fd: step leaves the positive orthant");
        const std::size_t d = law_.dimension();
        ExactSampler sampler(law_);
        const std::size_t n_blocks =
            (reps_ + kDefaultBlockSize - 1) / kDefaultBlockSize;
        std::vector<MeanAccumulator> acc(n_blocks);
        parallel_for_blocks(
            reps_, kDefaultBlockSize,
            [&](std::size_t block, std::size_t begin, std::size_t end) {
                Vec z(d);
                for (std::size_t i = begin; i < end; ++i) {
                    RngStream stream = rng.substream(i);
                    sampler.draw(stream, z.data());
                    const double delta =
                        (path_integral(xp, z) - path_integral(xm, z)) /
                        (2.0 * eps);
                    acc[block].add(delta);
                }
            },
            threads);
        MeanAccumulator total;
        for (const auto& a : acc) total.merge(a);
        return {total.mean(), total.std_error()};
    }

  private:
    void check(const Vec& x) const {
        if (x.size() != law_.dimension())
            throw std::domain_error("smooth solution: dimension mismatch");
        for (double xj : x)
            if (!(xj >= 0))
                throw std::domain_error("smooth solution: x must be >= 0");
    }

    MaxStableLaw law_;
    TestFunction h_;
    QuadratureSpec quad_;
    std::size_t reps_;
};

// --- envelope constants ----------------------------------------------------------

// C1(t) = (d-1) e^{-t/alpha} + alpha gamma_t^{-1/alpha} bounds the Lipschitz
// constant of the partials of P_t h; its time integral C2 bounds those of the
// Stein solution. C2 has the closed form (d-1) alpha + alpha pi / sin(pi/alpha).
struct EnvelopeConstants {
    double alpha = 0;
    std::size_t dimension = 0;
    std::function<double(double)> c1;
    double c2 = 0;
    double c2_quadrature_error = 0;
};

inline EnvelopeConstants envelope_constants(double alpha, std::size_t d,
                                            QuadratureSpec spec = {1e-10, 1e-9,
                                                                   8000}) {
    if (!(alpha > 1))
        throw std::domain_error("envelope constants: need alpha > 1");
    EnvelopeConstants env;
    env.alpha = alpha;
    env.dimension = d;
    env.c1 = [alpha, d](double t) {
        return (d - 1.0) * std::exp(-t / alpha) +
               alpha * std::pow(std::expm1(t), -1.0 / alpha);
    };
    // int_0^inf gamma_t^{-1/alpha} dt = int_0^1 u^{a-1} (1-u)^{b-1} du with
    // a = 1/alpha, b = 1 - 1/alpha. Each half is power-graded so that the
    // endpoint singularity cancels exactly: on [0, 1/2] the substitution
    // u = (1/2) s^{1/a} turns u^{a-1} du into a constant times ds.
    const double a = 1.0 / alpha;
    const double b = 1.0 - a;
    auto half = [&](double expo_in, double expo_out) {
        auto integrand = [&](double s) {
            if (!(s > 0)) return 0.0;
            const double u = 0.5 * std::pow(s, 1.0 / expo_in);
            return std::pow(1.0 - u, expo_out - 1.0);
        };
        const QuadratureResult res = integrate_adaptive(integrand, 0.0, 1.0, spec);
        if (!res.converged)
            throw QuadratureError("envelope constant quadrature failed",
                                  res.error_estimate);
        const double scale = std::pow(0.5, expo_in) / expo_in;
        env.c2_quadrature_error += alpha * scale * res.error_estimate;
        return scale * res.value;
    };
    env.c2 = (d - 1.0) * alpha + alpha * (half(a, b) + half(b, a));
    return env;
}

inline double envelope_c2_closed_form(double alpha, std::size_t d) {
    return (d - 1.0) * alpha + alpha * M_PI / std::sin(M_PI / alpha);
}

}  // namespace maxstein
