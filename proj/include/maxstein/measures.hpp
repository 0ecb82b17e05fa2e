#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxstein/common.hpp"

namespace maxstein {

// One atom of a discrete angular measure: a point on the l1 unit simplex
// carrying a nonnegative weight.
struct Atom {
    Vec point;
    double weight = 0;
};

// Finite discrete measure on the positive l1 unit sphere (the probability
// simplex). Construction enforces the geometric invariants; the marginal
// moment constraints sum_k w_k u_k^j = 1 are diagnosed separately so that
// deliberately invalid measures can still be built and inspected.
class AngularMeasure {
  public:
    static constexpr double kSimplexTol = 1e-12;

    AngularMeasure(std::size_t dimension, std::vector<Atom> atoms)
        : dimension_(dimension), atoms_(std::move(atoms)) {
        if (dimension_ == 0)
            throw std::invalid_argument("angular measure: dimension must be >= 1");
        if (atoms_.empty())
            throw std::invalid_argument("angular measure: needs at least one atom");
        for (const Atom& a : atoms_) {
            if (a.point.size() != dimension_)
                throw std::invalid_argument("angular measure: atom dimension mismatch");
            if (!(a.weight >= 0))
                throw std::invalid_argument("angular measure: negative weight");
            double sum = 0;
            for (double u : a.point) {
                if (!(u >= 0))
                    throw std::invalid_argument(
                        "angular measure: atom coordinate outside [0,1]");
                sum += u;
            }
            if (std::abs(sum - 1.0) > kSimplexTol)
                throw std::invalid_argument(
                    "angular measure: atom not on the l1 unit simplex");
        }
    }

    std::size_t dimension() const { return dimension_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    double total_mass() const {
        double s = 0;
        for (const Atom& a : atoms_) s += a.weight;
        return s;
    }

    // |sum_k w_k u_k^j - 1| per coordinate.
    Vec moment_deviation() const {
        Vec dev(dimension_, 0.0);
        for (std::size_t j = 0; j < dimension_; ++j) {
            double s = 0;
            for (const Atom& a : atoms_) s += a.weight * a.point[j];
            dev[j] = std::abs(s - 1.0);
        }
        return dev;
    }

    bool satisfies_moment_constraints(double tol = 1e-9) const {
        const Vec dev = moment_deviation();
        return std::all_of(dev.begin(), dev.end(),
                           [tol](double d) { return d <= tol; });
    }

    // Atoms whose points coincide within `tol` per coordinate are merged
    // (weights summed). Zero-weight atoms are kept; they are harmless.
    AngularMeasure merged(double tol = 1e-12) const {
        std::vector<Atom> out;
        for (const Atom& a : atoms_) {
            bool found = false;
            for (Atom& b : out) {
                bool same = true;
                for (std::size_t j = 0; j < dimension_; ++j) {
                    if (std::abs(a.point[j] - b.point[j]) > tol) {
                        same = false;
                        break;
                    }
                }
                if (same) {
                    b.weight += a.weight;
                    found = true;
                    break;
                }
            }
            if (!found) out.push_back(a);
        }
        return AngularMeasure(dimension_, std::move(out));
    }

  private:
    std::size_t dimension_;
    std::vector<Atom> atoms_;
};

// --- canonical constructors -------------------------------------------------

// One unit atom at each coordinate vector: independent Frechet marginals.
inline AngularMeasure independence_measure(std::size_t d) {
    std::vector<Atom> atoms;
    for (std::size_t j = 0; j < d; ++j) {
        Vec e(d, 0.0);
        e[j] = 1.0;
        atoms.push_back({e, 1.0});
    }
    return AngularMeasure(d, std::move(atoms));
}

// Weight d at the barycenter: completely dependent (comonotone) coordinates.
inline AngularMeasure dependence_measure(std::size_t d) {
    Vec bary(d, 1.0 / static_cast<double>(d));
    return AngularMeasure(d, {{bary, static_cast<double>(d)}});
}

// Convex mixture (1-eps) independence + eps dependence; valid for eps in [0,1].
inline AngularMeasure mixture_measure(std::size_t d, double eps) {
    if (!(eps >= 0 && eps <= 1))
        throw std::invalid_argument("mixture: eps must lie in [0,1]");
    std::vector<Atom> atoms;
    for (std::size_t j = 0; j < d; ++j) {
        Vec e(d, 0.0);
        e[j] = 1.0;
        atoms.push_back({e, 1.0 - eps});
    }
    Vec bary(d, 1.0 / static_cast<double>(d));
    atoms.push_back({bary, eps * static_cast<double>(d)});
    return AngularMeasure(d, std::move(atoms));
}

// --- max-stable law ----------------------------------------------------------

// Target distribution: stability index alpha plus a discrete angular measure.
// Operations that need alpha > 1 check at the call site.
class MaxStableLaw {
  public:
    MaxStableLaw(double alpha, AngularMeasure angular)
        : alpha_(alpha), angular_(std::move(angular)) {
        if (!(alpha_ > 0))
            throw std::invalid_argument("max-stable law: alpha must be > 0");
    }

    double alpha() const { return alpha_; }
    const AngularMeasure& angular() const { return angular_; }
    std::size_t dimension() const { return angular_.dimension(); }

    // Marks of the polar representation: v_k = u_k^{1/alpha}.
    std::vector<Atom> marks() const {
        std::vector<Atom> out = angular_.atoms();
        for (Atom& a : out)
            for (double& v : a.point) v = std::pow(v, 1.0 / alpha_);
        return out;
    }

  private:
    double alpha_;
    AngularMeasure angular_;
};

// Axis-aligned evaluation region [lower, upper]; upper entries may be +inf.
struct Rectangle {
    Vec lower;
    Vec upper;

    Rectangle(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size())
            throw std::invalid_argument("rectangle: dimension mismatch");
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (!(lower[j] >= 0) || !(upper[j] >= lower[j]))
                throw std::invalid_argument("rectangle: needs 0 <= lower <= upper");
        }
    }

    bool contains(const Vec& x) const {
        for (std::size_t j = 0; j < lower.size(); ++j)
            if (x[j] < lower[j] || x[j] > upper[j]) return false;
        return true;
    }
};

// --- exponent-measure functionals ---------------------------------------------

// mu[0,z]^c = sum_k w_k max_j u_k^j (z^j)^{-alpha} for strictly positive z.
// The law's cdf is exp(-mu[0,z]^c).
inline double exponent_complement(const MaxStableLaw& law, const Vec& z) {
    if (z.size() != law.dimension())
        throw std::domain_error("exponent_complement: dimension mismatch");
    for (double zj : z)
        if (!(zj > 0))
            throw std::domain_error(
                "exponent_complement: z must be strictly positive");
    const double alpha = law.alpha();
    double total = 0;
    for (const Atom& a : law.angular().atoms()) {
        double m = 0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (a.point[j] == 0) continue;
            m = std::max(m, a.point[j] * std::pow(z[j], -alpha));
        }
        total += a.weight * m;
    }
    return total;
}

inline double cdf(const MaxStableLaw& law, const Vec& z) {
    if (z.size() != law.dimension())
        throw std::domain_error("cdf: dimension mismatch");
    for (double zj : z)
        if (!(zj > 0)) return 0.0;  // support is the open positive orthant
    return std::exp(-exponent_complement(law, z));
}

inline Vec marginal_check(const MaxStableLaw& law) {
    return law.angular().moment_deviation();
}

// L1 distance between the two measures as signed measures: after merging
// coincident atoms, sum of |w1 - w2| over the union of atom locations.
// Equals twice the probabilists' total variation for equal-mass measures.
inline double tv_distance(const AngularMeasure& nu1, const AngularMeasure& nu2,
                          double merge_tol = 1e-12) {
    if (nu1.dimension() != nu2.dimension())
        throw std::domain_error("tv_distance: dimension mismatch");
    const AngularMeasure m1 = nu1.merged(merge_tol);
    const AngularMeasure m2 = nu2.merged(merge_tol);
    const std::size_t d = m1.dimension();

    auto same_point = [&](const Vec& a, const Vec& b) {
        for (std::size_t j = 0; j < d; ++j)
            if (std::abs(a[j] - b[j]) > merge_tol) return false;
        return true;
    };

    double total = 0;
    std::vector<bool> matched(m2.size(), false);
    for (const Atom& a : m1.atoms()) {
        double w2 = 0;
        for (std::size_t i = 0; i < m2.size(); ++i) {
            if (!matched[i] && same_point(a.point, m2.atoms()[i].point)) {
                matched[i] = true;
                w2 = m2.atoms()[i].weight;
                break;
            }
        }
        total += std::abs(a.weight - w2);
    }
    for (std::size_t i = 0; i < m2.size(); ++i)
        if (!matched[i]) total += m2.atoms()[i].weight;
    return total;
}

// Image of nu under u -> u^{1/alpha}; the resulting points live on the
// transformed sphere, not the simplex, so the result is a plain atom set.
inline std::vector<Atom> pushforward_alpha(const AngularMeasure& nu,
                                           double alpha) {
    if (!(alpha > 0)) throw std::domain_error("pushforward: alpha must be > 0");
    std::vector<Atom> out = nu.atoms();
    for (Atom& a : out)
        for (double& v : a.point) v = std::pow(v, 1.0 / alpha);
    return out;
}

// --- serialization -------------------------------------------------------------
//
// Line-oriented text format:
//   d alpha
//   w u^1 ... u^d          (one line per atom)

inline std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void save_law(const MaxStableLaw& law, std::ostream& os) {
    os << law.dimension() << " " << format_full(law.alpha()) << "\n";
    for (const Atom& a : law.angular().atoms()) {
        os << format_full(a.weight);
        for (double u : a.point) os << " " << format_full(u);
        os << "\n";
    }
}

inline void save_law(const MaxStableLaw& law, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    save_law(law, os);
}

inline MaxStableLaw load_law(std::istream& is) {
    std::size_t d = 0;
    double alpha = 0;
    if (!(is >> d >> alpha))
        throw std::runtime_error("law file: bad header, expected 'd alpha'");
    std::vector<Atom> atoms;
    std::string line;
    std::getline(is, line);  // consume rest of header line
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Atom a;
        if (!(ls >> a.weight))
            throw std::runtime_error("law file: bad atom line: " + line);
        a.point.resize(d);
        for (std::size_t j = 0; j < d; ++j)
            if (!(ls >> a.point[j]))
                throw std::runtime_error("law file: atom line too short: " + line);
        atoms.push_back(std::move(a));
    }
    return MaxStableLaw(alpha, AngularMeasure(d, std::move(atoms)));
}

inline MaxStableLaw load_law(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open law file: " + path);
    return load_law(is);
}

}  // namespace maxstein
