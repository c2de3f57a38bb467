#ifndef ISINGMAP_STATS_HPP
#define ISINGMAP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "isingmap/error.hpp"

namespace isingmap {

inline double mean(const std::vector<double>& values) {
    if (values.empty()) throw EmptyInputError("mean");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

/// Population (divide-by-count) standard deviation.
inline double population_stddev(const std::vector<double>& values) {
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size()));
}

/// Linear-interpolation quantile (R type 7) of a sorted vector, p in [0, 1].
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw EmptyInputError("quantile");
    if (sorted.size() == 1) return sorted.front();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Six-number summary matching the usual min/1st-quartile/median/mean/3rd-quartile/max rows.
struct SixNumberSummary {
    double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
};

inline SixNumberSummary summarize(std::vector<double> values) {
    if (values.empty()) throw EmptyInputError("summarize");
    std::sort(values.begin(), values.end());
    SixNumberSummary s;
    s.min = values.front();
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.50);
    s.q3 = quantile_sorted(values, 0.75);
    s.max = values.back();
    s.mean = mean(values);
    return s;
}

}  // namespace isingmap

#endif
