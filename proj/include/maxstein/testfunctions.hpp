#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxstein/common.hpp"
#include "maxstein/quadrature.hpp"
#include "maxstein/rng.hpp"

namespace maxstein {

// Test functions used by the distance estimators and the Stein-identity
// checks. Every member is 1-Lipschitz for the l1 norm; the smooth kinds are
// additionally C^1 with 1-Lipschitz partials and make up the "lip2" bank.
enum class TestFunctionKind {
    CoordinateClip,  // min(x^j, cap)
    SoftMin,         // -tau log sum_j exp(-x^j/tau)
    BoxRamp,         // linear ramp in max_j x^j/z^j between 1 and 1+scale
    SmoothClip,      // softplus-smoothed coordinate clip
    SmoothBox        // product of smoothstep ramps, one per coordinate
};

struct TestFunction {
    TestFunctionKind kind;
    std::string name;
    int coord = 0;      // CoordinateClip / SmoothClip
    double cap = 1.0;   // CoordinateClip / SmoothClip
    double tau = 1.0;   // SoftMin / SmoothClip
    double scale = 1.0; // BoxRamp / SmoothBox
    Vec corner;         // BoxRamp / SmoothBox

    double value(const double* x, std::size_t d) const {
        switch (kind) {
            case TestFunctionKind::CoordinateClip:
                return std::min(x[coord], cap);
            case TestFunctionKind::SoftMin: {
                double m = x[0];
                for (std::size_t j = 1; j < d; ++j) m = std::min(m, x[j]);
                double s = 0;
                for (std::size_t j = 0; j < d; ++j)
                    s += std::exp(-(x[j] - m) / tau);
                return m - tau * std::log(s);
            }
            case TestFunctionKind::BoxRamp: {
                double m = 0;
                for (std::size_t j = 0; j < d; ++j)
                    m = std::max(m, x[j] / corner[j]);
                if (m <= 1.0) return 1.0;
                if (m >= 1.0 + scale) return 0.0;
                return (1.0 + scale - m) / scale;
            }
            case TestFunctionKind::SmoothClip: {
                // x - tau*softplus((x-cap)/tau), increasing, saturates at cap
                const double t = (x[coord] - cap) / tau;
                const double sp =
                    t > 30 ? t : (t < -30 ? std::exp(t) : std::log1p(std::exp(t)));
                return x[coord] - tau * sp;
            }
            case TestFunctionKind::SmoothBox: {
                double prod = 1.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double t =
                        (corner[j] * (1.0 + scale) - x[j]) / (scale * corner[j]);
                    if (t <= 0) return 0.0;
                    if (t < 1.0) prod *= t * t * (3.0 - 2.0 * t);
                }
                return prod;
            }
        }
        return 0;
    }

    double value(const Vec& x) const { return value(x.data(), x.size()); }

    // Gradient where it exists; on the measure-zero kink sets of the
    // non-smooth kinds an arbitrary one-sided choice is returned.
    void gradient(const double* x, std::size_t d, double* out) const {
        for (std::size_t j = 0; j < d; ++j) out[j] = 0;
        switch (kind) {
            case TestFunctionKind::CoordinateClip:
                out[coord] = x[coord] < cap ? 1.0 : 0.0;
                return;
            case TestFunctionKind::SoftMin: {
                double m = x[0];
                for (std::size_t j = 1; j < d; ++j) m = std::min(m, x[j]);
                double s = 0;
                for (std::size_t j = 0; j < d; ++j)
                    s += std::exp(-(x[j] - m) / tau);
                for (std::size_t j = 0; j < d; ++j)
                    out[j] = std::exp(-(x[j] - m) / tau) / s;
                return;
            }
            case TestFunctionKind::BoxRamp: {
                double m = 0;
                std::size_t jm = 0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double r = x[j] / corner[j];
                    if (r > m) {
                        m = r;
                        jm = j;
                    }
                }
                if (m > 1.0 && m < 1.0 + scale)
                    out[jm] = -1.0 / (scale * corner[jm]);
                return;
            }
            case TestFunctionKind::SmoothClip: {
                const double t = (x[coord] - cap) / tau;
                out[coord] = 1.0 / (1.0 + std::exp(t));  // 1 - sigmoid(t)
                return;
            }
            case TestFunctionKind::SmoothBox: {
                double psi[16];
                double dpsi[16];
                for (std::size_t j = 0; j < d; ++j) {
                    const double w = scale * corner[j];
                    const double t = (corner[j] * (1.0 + scale) - x[j]) / w;
                    if (t <= 0) {
                        psi[j] = 0;
                        dpsi[j] = 0;
                    } else if (t >= 1) {
                        psi[j] = 1;
                        dpsi[j] = 0;
                    } else {
                        psi[j] = t * t * (3.0 - 2.0 * t);
                        dpsi[j] = -6.0 * t * (1.0 - t) / w;  // d/dx
                    }
                }
                for (std::size_t j = 0; j < d; ++j) {
                    double g = dpsi[j];
                    for (std::size_t k = 0; k < d; ++k)
                        if (k != j) g *= psi[k];
                    out[j] = g;
                }
                return;
            }
        }
    }

    Vec gradient(const Vec& x) const {
        Vec out(x.size());
        gradient(x.data(), x.size(), out.data());
        return out;
    }

    bool smooth() const {
        return kind == TestFunctionKind::SoftMin ||
               kind == TestFunctionKind::SmoothClip ||
               kind == TestFunctionKind::SmoothBox;
    }
};

namespace detail {

// int_p^q u^{-1/alpha} du for 0 < p <= q
inline double power_integral(double p, double q, double alpha) {
    if (q <= p) return 0.0;
    if (alpha == 1.0) return std::log(q / p);
    const double e = 1.0 - 1.0 / alpha;
    return (std::pow(q, e) - std::pow(p, e)) / e;
}

}  // namespace detail

// Exact or high-order evaluation of the jump integral of one test function
// along the ray of a single mark v:
//
//   J(x, v) = int_0^U [ h(x + r(u) v) - h(x) ] du,   r(u) = u^{-1/alpha},
//
// where "+" is the coordinatewise maximum and U = rho^{-alpha} with
// rho = min_{j: v^j > 0} x^j / v^j (below rho the maximum does not move and
// the integrand vanishes). This is the radial jump operator integral after
// the substitution u = r^{-alpha}.
//
// Closed forms for the piecewise-linear kinds; panelled Gauss-Legendre with
// a graded first panel for the smooth kinds. Requires x > 0.
inline double ray_jump_integral(const TestFunction& f, const double* x,
                                std::size_t d, const double* v, double alpha) {
    if (d > 16) throw std::invalid_argument("ray_jump_integral: d > 16");
    double rho = kInf;
    for (std::size_t j = 0; j < d; ++j) {
        if (v[j] > 0) rho = std::min(rho, x[j] / v[j]);
        if (!(x[j] > 0))
            throw std::domain_error("ray_jump_integral: x must be > 0");
    }
    if (!(rho < kInf))
        throw std::domain_error("ray_jump_integral: mark has no positive coordinate");
    const double big_u = std::pow(rho, -alpha);

    switch (f.kind) {
        case TestFunctionKind::CoordinateClip: {
            const double vj = v[f.coord];
            if (vj == 0) return 0.0;
            const double a = x[f.coord];
            if (a >= f.cap) return 0.0;
            const double u_a = std::pow(vj / a, alpha);    // r v_j crosses a
            const double u_c = std::pow(vj / f.cap, alpha);  // r v_j crosses cap
            // (0, u_c): integrand cap - a; (u_c, u_a): v_j r(u) - a
            return (f.cap - a) * u_c + vj * detail::power_integral(u_c, u_a, alpha) -
                   a * (u_a - u_c);
        }
        case TestFunctionKind::BoxRamp: {
            double m_x = 0, c_v = 0;
            for (std::size_t j = 0; j < d; ++j) {
                m_x = std::max(m_x, x[j] / f.corner[j]);
                c_v = std::max(c_v, v[j] / f.corner[j]);
            }
            if (c_v == 0) return 0.0;
            const double h_x = f.value(x, d);
            if (m_x >= 1.0 + f.scale) return 0.0;  // already zero, stays zero
            // Along the ray m(u) = max(m_x, c_v u^{-1/alpha}). Pieces of h in m:
            // h = 1 on (m_x, 1], linear on (1, 1+scale), 0 beyond.
            double total = 0;
            auto u_of_m = [&](double m) { return std::pow(c_v / m, alpha); };
            const double u_mx = u_of_m(std::max(m_x, 1e-300));
            // segment 1: m in (m_x, 1]  -> h == 1
            if (m_x < 1.0) {
                const double lo = u_of_m(1.0), hi = u_mx;
                if (hi > lo) total += (1.0 - h_x) * (hi - lo);
            }
            // segment 2: m in (max(m_x,1), 1+scale) -> h = (1+scale-m)/scale
            {
                const double m_lo = std::max(m_x, 1.0);
                const double m_hi = 1.0 + f.scale;
                if (m_hi > m_lo) {
                    const double lo = u_of_m(m_hi), hi = u_of_m(m_lo);
                    if (hi > lo) {
                        const double a_coef = (1.0 + f.scale) / f.scale - h_x;
                        total += a_coef * (hi - lo) -
                                 (c_v / f.scale) *
                                     detail::power_integral(lo, hi, alpha);
                    }
                }
            }
            // segment 3: m >= 1+scale -> h == 0
            {
                const double lo = u_of_m(1.0 + f.scale);
                if (lo > 0) total += (0.0 - h_x) * lo;
            }
            (void)big_u;
            return total;
        }
        default:
            break;
    }

    // Smooth kinds: panelled quadrature in u on (0, U], splitting at the
    // coordinate activation points u_j = (x^j/v^j)^{-alpha} and grading the
    // panel touching u = 0 so linear growth of h in r integrates cleanly.
    std::vector<double> cuts;
    auto add_cut = [&](double r_cut) {
        if (!(r_cut > 0) || r_cut == kInf) return;
        const double u = std::pow(r_cut, -alpha);
        if (u > 0 && u < big_u) cuts.push_back(u);
    };
    for (std::size_t j = 0; j < d; ++j) {
        if (v[j] == 0) continue;
        add_cut(x[j] / v[j]);
        switch (f.kind) {
            case TestFunctionKind::SmoothBox:
                // clamp transitions of the per-coordinate smoothstep
                add_cut(f.corner[j] / v[j]);
                add_cut(f.corner[j] * (1.0 + f.scale) / v[j]);
                break;
            case TestFunctionKind::SmoothClip:
                if (static_cast<int>(j) == f.coord) add_cut(f.cap / v[j]);
                break;
            case TestFunctionKind::SoftMin:
                // centers of the soft transitions where a growing coordinate
                // passes a frozen one
                for (std::size_t k = 0; k < d; ++k)
                    if (v[k] == 0) add_cut(x[k] / v[j]);
                break;
            default:
                break;
        }
    }
    cuts.push_back(big_u);
    std::sort(cuts.begin(), cuts.end());

    const double h_x = f.value(x, d);
    const GaussLegendre& gl = gauss_legendre_32();
    double xr[16];
    double total = 0;
    double lo = 0;
    for (double hi : cuts) {
        if (!(hi > lo)) continue;
        if (lo == 0) {
            // graded panel: u = hi * s^p with p = alpha/(alpha-1), which turns
            // the u^{-1/alpha} growth of a Lipschitz integrand into an exact
            // constant in s
            const double p = alpha > 1.0 ? alpha / (alpha - 1.0) : 3.0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double s = gl.nodes[q];
                const double u = hi * std::pow(s, p);
                if (u <= 0) continue;
                const double r = std::pow(u, -1.0 / alpha);
                for (std::size_t j = 0; j < d; ++j)
                    xr[j] = v[j] > 0 ? std::max(x[j], r * v[j]) : x[j];
                const double jac = hi * p * std::pow(s, p - 1.0);
                total += gl.weights[q] * (f.value(xr, d) - h_x) * jac;
            }
        } else {
            // wide panels are split geometrically so power-law integrands
            // keep a few nodes per decade
            double a = lo;
            while (a < hi) {
                const double b = std::min(hi, 8.0 * a);
                const double width = b - a;
                for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                    const double u = a + width * gl.nodes[q];
                    const double r = std::pow(u, -1.0 / alpha);
                    for (std::size_t j = 0; j < d; ++j)
                        xr[j] = v[j] > 0 ? std::max(x[j], r * v[j]) : x[j];
                    total += gl.weights[q] * (f.value(xr, d) - h_x) * width;
                }
                a = b;
            }
        }
        lo = hi;
    }
    return total;
}

// Radii at which h(x + r v) has a kink or a localized transition along the
// ray of mark v; used to pre-split verification quadratures.
inline std::vector<double> ray_breakpoints(const TestFunction& f,
                                           const double* x, std::size_t d,
                                           const double* v) {
    std::vector<double> out;
    auto add = [&](double r) {
        if (r > 0 && r < kInf) out.push_back(r);
    };
    for (std::size_t j = 0; j < d; ++j) {
        if (v[j] == 0) continue;
        add(x[j] / v[j]);
        switch (f.kind) {
            case TestFunctionKind::CoordinateClip:
            case TestFunctionKind::SmoothClip:
                if (static_cast<int>(j) == f.coord) add(f.cap / v[j]);
                break;
            case TestFunctionKind::BoxRamp:
            case TestFunctionKind::SmoothBox: {
                add(f.corner[j] / v[j]);
                add(f.corner[j] * (1.0 + f.scale) / v[j]);
                // where the growing max-ratio overtakes the frozen one
                double m_x = 0, c_v = 0;
                for (std::size_t k = 0; k < d; ++k) {
                    m_x = std::max(m_x, x[k] / f.corner[k]);
                    c_v = std::max(c_v, v[k] / f.corner[k]);
                }
                if (c_v > 0) add(m_x / c_v);
                break;
            }
            case TestFunctionKind::SoftMin:
                for (std::size_t k = 0; k < d; ++k)
                    if (v[k] == 0) add(x[k] / v[j]);
                break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// --- banks -------------------------------------------------------------------

struct TestFunctionBank {
    std::string name;
    bool lip2 = false;  // members claimed to have 1-Lipschitz partials
    bool certified = false;
    std::vector<TestFunction> members;
};

// Default bank for Wasserstein lower bounds and Stein-identity checks:
// coordinate clips, soft-mins and box ramps expose both marginal and
// dependence-structure differences. 14 members for d >= 2.
inline TestFunctionBank make_smooth_bank(std::size_t d) {
    if (d == 0 || d > 16)
        throw std::invalid_argument("bank: dimension must be in [1,16]");
    TestFunctionBank bank;
    bank.name = "smooth";
    const double caps[4] = {0.5, 1.0, 2.0, 4.0};
    const std::size_t n_coords = std::min<std::size_t>(d, 2);
    for (std::size_t j = 0; j < n_coords; ++j)
        for (double c : caps) {
            TestFunction f;
            f.kind = TestFunctionKind::CoordinateClip;
            f.coord = static_cast<int>(j);
            f.cap = c;
            f.name = "clip(x" + std::to_string(j + 1) + "," + std::to_string(c) + ")";
            bank.members.push_back(f);
        }
    for (double tau : {0.5, 2.0}) {
        TestFunction f;
        f.kind = TestFunctionKind::SoftMin;
        f.tau = tau;
        f.name = "softmin(tau=" + std::to_string(tau) + ")";
        bank.members.push_back(f);
    }
    for (double s : {1.0, 2.0, 4.0}) {
        TestFunction f;
        f.kind = TestFunctionKind::BoxRamp;
        f.scale = s;
        f.corner = Vec(d, 1.0);
        f.name = "boxramp(z=1,s=" + std::to_string(s) + ")";
        bank.members.push_back(f);
    }
    {
        TestFunction f;
        f.kind = TestFunctionKind::BoxRamp;
        f.scale = 1.0;
        f.corner = Vec(d, 2.0);
        f.name = "boxramp(z=2,s=1)";
        bank.members.push_back(f);
    }
    return bank;
}

// Bank of C^1 members whose partials are themselves 1-Lipschitz, for the
// doubly-Lipschitz distance d_[2].
inline TestFunctionBank make_d2_bank(std::size_t d) {
    if (d == 0 || d > 16)
        throw std::invalid_argument("bank: dimension must be in [1,16]");
    TestFunctionBank bank;
    bank.name = "d2";
    bank.lip2 = true;
    const std::size_t n_coords = std::min<std::size_t>(d, 2);
    for (std::size_t j = 0; j < n_coords; ++j)
        for (double c : {1.0, 2.0}) {
            TestFunction f;
            f.kind = TestFunctionKind::SmoothClip;
            f.coord = static_cast<int>(j);
            f.cap = c;
            f.tau = 1.0;
            f.name = "smoothclip(x" + std::to_string(j + 1) + "," +
                     std::to_string(c) + ")";
            bank.members.push_back(f);
        }
    for (double tau : {1.0, 2.0}) {
        TestFunction f;
        f.kind = TestFunctionKind::SoftMin;
        f.tau = tau;
        f.name = "softmin(tau=" + std::to_string(tau) + ")";
        bank.members.push_back(f);
    }
    for (double s : {2.5, 4.0}) {
        TestFunction f;
        f.kind = TestFunctionKind::SmoothBox;
        f.scale = s;
        f.corner = Vec(d, 1.0);
        f.name = "smoothbox(z=1,s=" + std::to_string(s) + ")";
        bank.members.push_back(f);
    }
    {
        TestFunction f;
        f.kind = TestFunctionKind::SmoothBox;
        f.scale = 1.5;
        f.corner = Vec(d, 2.0);
        f.name = "smoothbox(z=2,s=1.5)";
        bank.members.push_back(f);
    }
    return bank;
}

// Numerical certification of the bank's Lipschitz claims on random pairs in
// (0, 6]^d: difference quotients of the values (and of the partials for a
// lip2 bank) must not exceed 1 + tol. Marks the bank certified on success.
inline bool certify_bank(TestFunctionBank& bank, std::size_t d, RngStream rng,
                         std::size_t n_pairs = 2000, double tol = 1e-6) {
    Vec x(d), y(d), gx(d), gy(d);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = 6.0 * rng.next_double();
            y[j] = 6.0 * rng.next_double();
        }
        const double dist = l1_distance(x, y);
        if (dist < 1e-12) continue;
        for (const TestFunction& f : bank.members) {
            const double gap = std::abs(f.value(x) - f.value(y));
            if (gap > (1.0 + tol) * dist) return false;
            if (bank.lip2) {
                f.gradient(x.data(), d, gx.data());
                f.gradient(y.data(), d, gy.data());
                for (std::size_t j = 0; j < d; ++j)
                    if (std::abs(gx[j] - gy[j]) > (1.0 + tol) * dist)
                        return false;
            }
        }
    }
    bank.certified = true;
    return true;
}

}  // namespace maxstein
