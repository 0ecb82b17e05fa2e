#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "maxstein/common.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/parallel.hpp"
#include "maxstein/rng.hpp"
#include "maxstein/sampling.hpp"

namespace maxstein {

// One realization of the polar point process, truncated to finitely many
// points: radii in strictly decreasing order, each carrying a transformed
// mark v = u^{1/alpha} of one angular atom.
struct LePagePoint {
    double r;
    Vec v;
};

class LePageConfiguration {
  public:
    LePageConfiguration(double alpha, std::vector<LePagePoint> points)
        : alpha_(alpha), points_(std::move(points)) {
        if (points_.empty())
            throw std::invalid_argument("configuration: needs at least one point");
        for (std::size_t i = 0; i + 1 < points_.size(); ++i)
            if (!(points_[i].r > points_[i + 1].r))
                throw std::invalid_argument(
                    "configuration: radii must be strictly decreasing");
    }

    double alpha() const { return alpha_; }
    const std::vector<LePagePoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    std::size_t dimension() const { return points_.front().v.size(); }

  private:
    double alpha_;
    std::vector<LePagePoint> points_;
};

// Draws the first n points of the process for the given law.
inline LePageConfiguration sample_configuration(const MaxStableLaw& law,
                                                RngStream& rng, std::size_t n) {
    if (n == 0) throw std::domain_error("sample_configuration: n must be >= 1");
    const double mass = law.angular().total_mass();
    const double inv_alpha = 1.0 / law.alpha();
    const std::vector<Atom> marks = law.marks();
    std::vector<double> weights(marks.size());
    for (std::size_t k = 0; k < marks.size(); ++k) weights[k] = marks[k].weight;

    std::vector<LePagePoint> pts;
    pts.reserve(n);
    double gamma = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gamma += rng.next_exponential();
        const double r = std::pow(gamma / mass, -inv_alpha);
        const std::size_t k = sample_index(weights, mass, rng);
        pts.push_back({r, marks[k].point});
    }
    return LePageConfiguration(law.alpha(), std::move(pts));
}

// m_n: coordinatewise maximum of the first n scaled marks.
inline Vec partial_max(const LePageConfiguration& cfg, std::size_t n) {
    if (n == 0 || n > cfg.size())
        throw std::domain_error("partial_max: n out of range");
    const std::size_t d = cfg.dimension();
    Vec m(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const LePagePoint& p = cfg.points()[i];
        for (std::size_t j = 0; j < d; ++j)
            m[j] = std::max(m[j], p.r * p.v[j]);
    }
    return m;
}

// Partition of the points against m_n: LT if strictly dominated wherever
// m_n is nonzero, EQ if the point attains a nonzero coordinate of m_n,
// GT if it exceeds m_n somewhere. EQ uses exact floating equality, which is
// consistent with how partial_max computed m_n in the first place.
enum class PointClass { LT, EQ, GT };

inline std::vector<PointClass> classify_points(const LePageConfiguration& cfg,
                                               std::size_t n) {
    if (n == 0 || n > cfg.size())
        throw std::domain_error("classify_points: n out of range");
    const Vec m = partial_max(cfg, n);
    const std::size_t d = cfg.dimension();
    std::vector<PointClass> out;
    out.reserve(cfg.size());
    for (const LePagePoint& p : cfg.points()) {
        bool exceeds = false, attains = false;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = p.r * p.v[j];
            if (c > m[j]) exceeds = true;
            else if (c == m[j] && m[j] > 0) attains = true;
        }
        out.push_back(exceeds ? PointClass::GT
                              : (attains ? PointClass::EQ : PointClass::LT));
    }
    return out;
}

// Internal driver for coupled truncation-error estimation. Generates one
// realization per replicate and records the running maxima m_n at the
// requested truncation levels, together with the full maximum m(eta).
//
// Points are generated until either `cap` points have been produced or the
// next radius r satisfies r <= min_j m^j, after which no further point can
// raise any coordinate (marks have coordinates in [0,1], so r*v^j <= r).
// The early stop therefore changes nothing: the returned reference equals
// the cap-point partial maximum exactly.
class TruncationErrorDriver {
  public:
    TruncationErrorDriver(const MaxStableLaw& law, std::vector<std::size_t> grid,
                          std::size_t cap)
        : inv_alpha_(1.0 / law.alpha()),
          mass_(law.angular().total_mass()),
          grid_(std::move(grid)),
          cap_(cap),
          dimension_(law.dimension()) {
        for (const Atom& a : law.marks()) {
            marks_.push_back(a.point);
            weights_.push_back(a.weight);
        }
        if (grid_.empty())
            throw std::invalid_argument("truncation grid must be nonempty");
        for (std::size_t g : grid_)
            if (g == 0 || g > cap_)
                throw std::domain_error("truncation level must satisfy 1 <= n <= cap");
        if (!std::is_sorted(grid_.begin(), grid_.end()))
            throw std::invalid_argument("truncation grid must be increasing");
    }

    std::size_t grid_size() const { return grid_.size(); }
    const std::vector<std::size_t>& grid() const { return grid_; }
    std::size_t dimension() const { return dimension_; }

    // Writes m_n for each grid level into snapshots (grid_size x d,
    // row-major) and the reference maximum into reference (d).
    void run_replicate(RngStream& rng, double* snapshots,
                       double* reference) const {
        const std::size_t d = dimension_;
        Vec m(d, 0.0);
        double gamma = 0;
        std::size_t next_grid = 0;
        std::size_t produced = 0;
        while (produced < cap_) {
            gamma += rng.next_exponential();
            const double r = std::pow(gamma / mass_, -inv_alpha_);
            double m_min = m[0];
            for (std::size_t j = 1; j < d; ++j) m_min = std::min(m_min, m[j]);
            if (r <= m_min) break;  // every later point is dominated too
            const std::size_t k = sample_index(weights_, mass_, rng);
            const Vec& v = marks_[k];
            for (std::size_t j = 0; j < d; ++j)
                m[j] = std::max(m[j], r * v[j]);
            ++produced;
            while (next_grid < grid_.size() && grid_[next_grid] == produced) {
                std::copy(m.begin(), m.end(), snapshots + next_grid * d);
                ++next_grid;
            }
        }
        // levels not reached before the stop equal the final maximum
        for (; next_grid < grid_.size(); ++next_grid)
            std::copy(m.begin(), m.end(), snapshots + next_grid * d);
        std::copy(m.begin(), m.end(), reference);
    }

  private:
    double inv_alpha_;
    double mass_;
    std::vector<std::size_t> grid_;
    std::size_t cap_;
    std::size_t dimension_;
    std::vector<Vec> marks_;
    std::vector<double> weights_;
};

// Mean and standard error of || m_n - m_bigN ||_1 over replicates for every
// level of the grid, sharing one realization per replicate across levels.
// Replicate i uses rng.substream(i); accumulation is blockwise in a fixed
// order, so results are identical for any thread count.
inline std::vector<Estimate> coupled_truncation_error_grid(
    const MaxStableLaw& law, const std::vector<std::size_t>& grid,
    std::size_t big_n, const RngStream& rng, std::size_t reps,
    unsigned threads = 0) {
    TruncationErrorDriver driver(law, grid, big_n);
    const std::size_t g = driver.grid_size();
    const std::size_t d = driver.dimension();

    const std::size_t n_blocks =
        (reps + kDefaultBlockSize - 1) / kDefaultBlockSize;
    std::vector<MeanAccumulator> block_acc(n_blocks * g);

    parallel_for_blocks(
        reps, kDefaultBlockSize,
        [&](std::size_t block, std::size_t begin, std::size_t end) {
            std::vector<double> snap(g * d);
            Vec ref(d);
            for (std::size_t i = begin; i < end; ++i) {
                RngStream stream = rng.substream(i);
                driver.run_replicate(stream, snap.data(), ref.data());
                for (std::size_t q = 0; q < g; ++q) {
                    double err = 0;
                    for (std::size_t j = 0; j < d; ++j)
                        err += std::abs(snap[q * d + j] - ref[j]);
                    block_acc[block * g + q].add(err);
                }
            }
        },
        threads);

    std::vector<Estimate> out(g);
    for (std::size_t q = 0; q < g; ++q) {
        MeanAccumulator acc;
        for (std::size_t b = 0; b < n_blocks; ++b)
            acc.merge(block_acc[b * g + q]);
        out[q] = {acc.mean(), acc.std_error()};
    }
    return out;
}

inline Estimate coupled_truncation_error(const MaxStableLaw& law,
                                         std::size_t n, std::size_t big_n,
                                         const RngStream& rng, std::size_t reps,
                                         unsigned threads = 0) {
    if (n >= big_n)
        throw std::domain_error("coupled_truncation_error: requires n < big_n");
    return coupled_truncation_error_grid(law, {n}, big_n, rng, reps,
                                         threads)[0];
}

// Truncated-series sampler reusing the early-stop driver: returns m_n draws
// for all grid levels from a single realization per replicate (row-major
// reps x grid x d).
inline std::vector<double> sample_partial_maxima(
    const MaxStableLaw& law, const std::vector<std::size_t>& grid,
    std::size_t cap, const RngStream& rng, std::size_t reps,
    unsigned threads = 0) {
    TruncationErrorDriver driver(law, grid, cap);
    const std::size_t g = driver.grid_size();
    const std::size_t d = driver.dimension();
    std::vector<double> out(reps * g * d);
    parallel_for_blocks(
        reps, kDefaultBlockSize,
        [&](std::size_t, std::size_t begin, std::size_t end) {
            Vec ref(d);
            for (std::size_t i = begin; i < end; ++i) {
                RngStream stream = rng.substream(i);
                driver.run_replicate(stream, out.data() + i * g * d, ref.data());
            }
        },
        threads);
    return out;
}

}  // namespace maxstein
