#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxstein/common.hpp"
#include "maxstein/lepage.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/metrics.hpp"
#include "maxstein/rng.hpp"
#include "maxstein/testfunctions.hpp"

namespace maxstein {

enum class RateMetric { coupledW, d2bank, kolmogorov };

inline const char* rate_metric_name(RateMetric m) {
    switch (m) {
        case RateMetric::coupledW: return "coupledW";
        case RateMetric::d2bank: return "d2bank";
        case RateMetric::kolmogorov: return "kolmogorov";
    }
    return "?";
}

// Predicted decay (constants dropped): 1/n for the coupled Wasserstein
// bound, n^{-(1+1/alpha)} for the doubly-Lipschitz class, (log n / n)^{2/3}
// for the Kolmogorov distance under a bounded density.
inline double theoretical_rate(RateMetric metric, double alpha, std::size_t n) {
    if (n < 2) throw std::domain_error("theoretical_rate: needs n >= 2");
    const double dn = static_cast<double>(n);
    switch (metric) {
        case RateMetric::coupledW:
            return 1.0 / dn;
        case RateMetric::d2bank:
            return std::pow(dn, -(1.0 + 1.0 / alpha));
        case RateMetric::kolmogorov:
            return std::pow(std::log(dn) / dn, 2.0 / 3.0);
    }
    return 0;
}

struct RateExperiment {
    MaxStableLaw law;
    std::vector<std::size_t> n_grid;
    std::size_t big_n = 10000;
    std::size_t reps = 100000;
    RateMetric metric = RateMetric::coupledW;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t kolmogorov_grid_nodes = 40;

    void validate() const {
        if (n_grid.empty())
            throw std::invalid_argument("rate experiment: empty n-grid");
        if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
            std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
            throw std::invalid_argument(
                "rate experiment: n-grid must be strictly increasing");
        if (n_grid.back() * 16 > big_n)
            throw std::invalid_argument(
                "rate experiment: big_n must exceed max(n-grid) by a factor >= 16");
        if ((metric == RateMetric::coupledW || metric == RateMetric::d2bank) &&
            !(law.alpha() > 1))
            throw std::domain_error("rate experiment: metric needs alpha > 1");
    }
};

struct RateRow {
    std::size_t n = 0;
    double estimate = 0;
    double std_error = 0;
    double theoretical = 0;
};

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double residual = 0;  // rms of weighted log-residuals
    std::size_t points_used = 0;
    bool ok = false;
    std::string message;
};

// Weighted least squares of log(estimate) on log(n); weights are inverse
// squared relative standard errors, and noise-dominated points
// (estimate < 3 SE) are dropped. Fewer than 4 usable points refuses the fit.
inline SlopeFit fit_slope(const std::vector<RateRow>& rows) {
    SlopeFit fit;
    std::vector<double> xs, ys, ws;
    for (const RateRow& r : rows) {
        if (!(r.estimate > 0) || r.estimate < 3.0 * r.std_error) continue;
        xs.push_back(std::log(static_cast<double>(r.n)));
        ys.push_back(std::log(r.estimate));
        const double rel = r.std_error > 0 ? r.std_error / r.estimate : 1e-6;
        ws.push_back(1.0 / (rel * rel));
    }
    fit.points_used = xs.size();
    if (xs.size() < 4) {
        fit.message = "fewer than 4 grid points above the noise floor";
        return fit;
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += ws[i];
        sx += ws[i] * xs[i];
        sy += ws[i] * ys[i];
        sxx += ws[i] * xs[i] * xs[i];
        sxy += ws[i] * xs[i] * ys[i];
    }
    const double det = sw * sxx - sx * sx;
    fit.slope = (sw * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double ssr = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.slope * xs[i];
        ssr += ws[i] * r * r;
    }
    fit.residual = std::sqrt(ssr / sw);
    fit.ok = true;
    return fit;
}

struct RateResult {
    std::vector<RateRow> rows;
    SlopeFit fit;
};

inline RateResult run_rate_experiment(const RateExperiment& e) {
    e.validate();
    const RngStream rng(e.seed, 0);
    const std::size_t d = e.law.dimension();
    RateResult out;

    if (e.metric == RateMetric::coupledW) {
        const std::vector<Estimate> est = coupled_truncation_error_grid(
            e.law, e.n_grid, e.big_n, rng, e.reps, e.threads);
        for (std::size_t q = 0; q < e.n_grid.size(); ++q)
            out.rows.push_back({e.n_grid[q], est[q].value, est[q].std_error,
                                theoretical_rate(e.metric, e.law.alpha(),
                                                 e.n_grid[q])});
    } else if (e.metric == RateMetric::d2bank) {
        // paired evaluation: h(m_n) - h(m) on a shared realization per
        // replicate, maximized over the certified doubly-Lipschitz bank
        TestFunctionBank bank = make_d2_bank(d);
        if (!certify_bank(bank, d, RngStream(17, 0)))
            throw std::runtime_error("d2 bank failed certification");
        const std::size_t nf = bank.members.size();
        const std::size_t g = e.n_grid.size();
        TruncationErrorDriver driver(e.law, e.n_grid, e.big_n);
        const std::size_t n_blocks =
            (e.reps + kDefaultBlockSize - 1) / kDefaultBlockSize;
        std::vector<MeanAccumulator> acc(n_blocks * g * nf);
        parallel_for_blocks(
            e.reps, kDefaultBlockSize,
            [&](std::size_t block, std::size_t begin, std::size_t end) {
                std::vector<double> snap(g * d);
                Vec ref(d);
                for (std::size_t i = begin; i < end; ++i) {
                    RngStream stream = rng.substream(i);
                    driver.run_replicate(stream, snap.data(), ref.data());
                    for (std::size_t q = 0; q < g; ++q)
                        for (std::size_t m = 0; m < nf; ++m) {
                            const double delta =
                                bank.members[m].value(&snap[q * d], d) -
                                bank.members[m].value(ref.data(), d);
                            acc[(block * g + q) * nf + m].add(delta);
                        }
                }
            },
            e.threads);
        for (std::size_t q = 0; q < g; ++q) {
            double best = 0, best_se = 0;
            for (std::size_t m = 0; m < nf; ++m) {
                MeanAccumulator total;
                for (std::size_t b = 0; b < n_blocks; ++b)
                    total.merge(acc[(b * g + q) * nf + m]);
                if (std::abs(total.mean()) > best) {
                    best = std::abs(total.mean());
                    best_se = total.std_error();
                }
            }
            out.rows.push_back({e.n_grid[q], best, best_se,
                                theoretical_rate(e.metric, e.law.alpha(),
                                                 e.n_grid[q])});
        }
    } else {
        // empirical CDF of the truncated series against the exact CDF on a
        // fixed log grid, common draws across the whole n-grid
        const std::vector<double> draws = sample_partial_maxima(
            e.law, e.n_grid, e.big_n, rng, e.reps, e.threads);
        const FrechetParams marginal(e.law.alpha(), 1.0);
        const std::vector<double> axis = detail::log_spaced(
            frechet_quantile(marginal, 1e-3), frechet_quantile(marginal, 0.999),
            e.kolmogorov_grid_nodes);
        const std::size_t g = e.n_grid.size();
        std::vector<double> level(e.reps * d);
        for (std::size_t q = 0; q < g; ++q) {
            for (std::size_t i = 0; i < e.reps; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    level[i * d + j] = draws[(i * g + q) * d + j];
            const double stat = kolmogorov_on_grid(level, d, e.law, axis);
            // binomial-style error scale for a CDF supremum statistic
            const double se =
                std::sqrt(0.25 / static_cast<double>(e.reps));
            out.rows.push_back({e.n_grid[q], stat, se,
                                theoretical_rate(e.metric, e.law.alpha(),
                                                 e.n_grid[q])});
        }
    }

    out.fit = fit_slope(out.rows);
    return out;
}

// Geometric grid helper: from `lo` to `hi` multiplying by `factor`.
inline std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi,
                                               std::size_t factor = 2) {
    if (lo == 0 || hi < lo || factor < 2)
        throw std::invalid_argument("geometric grid: bad parameters");
    std::vector<std::size_t> out;
    for (std::size_t n = lo; n <= hi; n *= factor) out.push_back(n);
    return out;
}

}  // namespace maxstein
