#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxstein {

using Vec = std::vector<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline Vec cwise_max(const Vec& a, const Vec& b) {
    Vec out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = std::max(a[j], b[j]);
    return out;
}

inline void cwise_max_inplace(Vec& a, const Vec& b) {
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = std::max(a[j], b[j]);
}

inline double l1_norm(const Vec& a) {
    double s = 0;
    for (double x : a) s += std::abs(x);
    return s;
}

inline double l1_distance(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] - b[j]);
    return s;
}

inline bool all_positive(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](double x) { return x > 0; });
}

inline bool all_nonnegative(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](double x) { return x >= 0; });
}

// a <= b componentwise
inline bool dominated_by(const Vec& a, const Vec& b) {
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j] > b[j]) return false;
    return true;
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw std::domain_error(what);
}

// Streaming mean / standard-error accumulator with a fixed summation order.
struct MeanAccumulator {
    double sum = 0;
    double sum_sq = 0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    void merge(const MeanAccumulator& other) {
        sum += other.sum;
        sum_sq += other.sum_sq;
        n += other.n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq - static_cast<double>(n) * m * m) /
                         static_cast<double>(n - 1);
        return v > 0 ? v : 0.0;
    }
    double std_error() const {
        return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

struct Estimate {
    double value = 0;
    double std_error = 0;
};

}  // namespace maxstein
