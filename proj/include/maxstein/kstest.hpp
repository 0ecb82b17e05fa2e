#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace maxstein {

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::domain_error("ks: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double stat = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        stat = std::max(stat, std::max((i + 1) / n - f, f - i / n));
    }
    return stat;
}

// Two-sample statistic by a merge scan.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::domain_error("ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double stat = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        stat = std::max(stat, std::abs(i / na - j / nb));
    }
    return stat;
}

// Asymptotic critical value at significance `alpha` (two-sided):
// sqrt(-log(alpha/2)/2) / sqrt(n). At the 1% level the numerator is ~1.628.
inline double ks_critical_value(std::size_t n, double alpha = 0.01) {
    if (n == 0) throw std::domain_error("ks: n must be positive");
    if (!(alpha > 0 && alpha < 1)) throw std::domain_error("ks: bad level");
    return std::sqrt(-0.5 * std::log(alpha / 2)) /
           std::sqrt(static_cast<double>(n));
}

inline double ks_two_sample_critical_value(std::size_t n, std::size_t m,
                                           double alpha = 0.01) {
    if (n == 0 || m == 0) throw std::domain_error("ks: sizes must be positive");
    return std::sqrt(-0.5 * std::log(alpha / 2)) *
           std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                     (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace maxstein
