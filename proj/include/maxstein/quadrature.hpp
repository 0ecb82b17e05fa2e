#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxstein {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 4000;
};

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error " +
                             std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

struct QuadratureResult {
    double value = 0;
    double error_estimate = 0;
    int subdivisions = 0;
    bool converged = true;
};

namespace detail {

// 15-point Gauss-Kronrod pair on [-1,1].
inline constexpr std::array<double, 8> kGk15Nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kGk15WeightsK = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGk15WeightsG = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& result_k,
                 double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    double sum_k = 0, sum_g = 0, resabs = 0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kGk15Nodes[i];
        double v;
        if (i == 7) {
            fv[7] = f(c);
            v = fv[7];
            resabs += kGk15WeightsK[i] * std::abs(fv[7]);
        } else {
            const double lo = f(c - x), hi = f(c + x);
            fv[i] = lo;
            fv[14 - i] = hi;
            v = lo + hi;
            resabs += kGk15WeightsK[i] * (std::abs(lo) + std::abs(hi));
        }
        sum_k += kGk15WeightsK[i] * v;
        // The embedded Gauss-7 rule lives on the odd Kronrod nodes
        // (including the center at i == 7).
        if (i % 2 == 1) sum_g += kGk15WeightsG[i / 2] * v;
    }
    result_k = sum_k * h;
    const double mean = sum_k * 0.5;
    double resasc = 0;
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            resasc += kGk15WeightsK[i] * std::abs(fv[7] - mean);
        } else {
            resasc += kGk15WeightsK[i] *
                      (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
        }
    }
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    // conservative error model: raw |Gauss - Kronrod| underestimates badly
    // on discontinuous integrands, so inflate it against the total
    // variation scale of the panel (the classic QUADPACK device)
    error = std::abs((sum_k - sum_g) * h);
    if (resasc != 0.0 && error != 0.0)
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    const double round_off = 50.0 * 1.1e-16 * resabs;
    if (round_off > 0) error = std::max(error, round_off);
}

}  // namespace detail

// Adaptive Gauss-Kronrod on a finite interval. Splits the worst interval
// until the summed error estimate meets the tolerances or the subdivision
// budget runs out.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    const QuadratureSpec& spec = {}) {
    struct Interval {
        double a, b, value, error;
    };
    QuadratureResult res;
    if (a == b) return res;

    std::vector<Interval> heap;
    auto push = [&](double lo, double hi) {
        Interval iv{lo, hi, 0, 0};
        detail::gk15(f, lo, hi, iv.value, iv.error);
        heap.push_back(iv);
        std::push_heap(heap.begin(), heap.end(),
                       [](const Interval& x, const Interval& y) {
                           return x.error < y.error;
                       });
    };
    push(a, b);

    for (int iter = 0; iter < spec.max_subdivisions; ++iter) {
        double total = 0, err = 0;
        for (const auto& iv : heap) {
            total += iv.value;
            err += iv.error;
        }
        if (err <= spec.abs_tol || err <= spec.rel_tol * std::abs(total)) {
            res.value = total;
            res.error_estimate = err;
            res.subdivisions = static_cast<int>(heap.size());
            return res;
        }
        std::pop_heap(heap.begin(), heap.end(),
                      [](const Interval& x, const Interval& y) {
                          return x.error < y.error;
                      });
        Interval worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {
            // interval no longer splittable in floating point
            heap.push_back(worst);
            break;
        }
        push(worst.a, mid);
        push(mid, worst.b);
    }

    double total = 0, err = 0;
    for (const auto& iv : heap) {
        total += iv.value;
        err += iv.error;
    }
    res.value = total;
    res.error_estimate = err;
    res.subdivisions = static_cast<int>(heap.size());
    res.converged =
        err <= spec.abs_tol || err <= spec.rel_tol * std::abs(total);
    return res;
}

template <class F>
double integrate_or_throw(const F& f, double a, double b,
                          const QuadratureSpec& spec = {},
                          const char* what = "quadrature did not converge") {
    QuadratureResult r = integrate_adaptive(f, a, b, spec);
    if (!r.converged) throw QuadratureError(what, r.error_estimate);
    return r.value;
}

// Integral over [a, +inf) via the map r = a / (1 - s), s in [0,1) for a > 0,
// and a two-piece [a, a+1] + tail treatment when a == 0.
template <class F>
QuadratureResult integrate_tail(const F& f, double a,
                                const QuadratureSpec& spec = {}) {
    if (a > 0) {
        auto g = [&](double s) {
            const double om = 1.0 - s;
            if (!(om > 0)) return 0.0;  // r would overflow; measure-zero point
            const double r = a / om;
            return f(r) * a / (om * om);
        };
        return integrate_adaptive(g, 0.0, 1.0, spec);
    }
    QuadratureResult head = integrate_adaptive(f, 0.0, 1.0, spec);
    QuadratureResult tail = integrate_tail(f, 1.0, spec);
    head.value += tail.value;
    head.error_estimate += tail.error_estimate;
    head.subdivisions += tail.subdivisions;
    head.converged = head.converged && tail.converged;
    return head;
}

// Adaptive integration of (a, b] with a geometric pre-split toward the left
// endpoint. Guards against integrands whose mass sits in a narrow window far
// from the interval scale (steep walls can slip between the nodes of a
// single top-level rule and fool its error estimate).
template <class F>
QuadratureResult integrate_geometric(const F& f, double a, double b,
                                     const QuadratureSpec& spec = {},
                                     int decades = 24) {
    QuadratureResult total;
    if (!(b > a)) return total;
    std::vector<double> cuts;
    const double base = a > 0 ? a : b * std::pow(2.0, -decades);
    for (double c = base; c < b; c *= 2.0) cuts.push_back(c);
    cuts.push_back(b);
    double lo = a;
    for (double hi : cuts) {
        if (!(hi > lo)) continue;
        const QuadratureResult piece = integrate_adaptive(f, lo, hi, spec);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.subdivisions += piece.subdivisions;
        total.converged = total.converged && piece.converged;
        lo = hi;
    }
    return total;
}

// Fixed-order Gauss-Legendre nodes/weights on [0,1], computed once by
// Newton iteration on the Legendre polynomial.
struct GaussLegendre {
    std::vector<double> nodes;    // in (0,1)
    std::vector<double> weights;  // sum to 1

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        for (int i = 0; i < n; ++i) {
            // root of P_n on [-1,1], standard cosine initial guess
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 =
                        ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = 0.5 * (1.0 - x);  // map to [0,1], ascending
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

inline const GaussLegendre& gauss_legendre_16() {
    static const GaussLegendre gl(16);
    return gl;
}

inline const GaussLegendre& gauss_legendre_32() {
    static const GaussLegendre gl(32);
    return gl;
}

}  // namespace maxstein
