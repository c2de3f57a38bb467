#include "isingmap/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>

#include "isingmap/rng.hpp"

namespace isingmap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(AdaptivityClass c) {
    switch (c) {
        case AdaptivityClass::zero_width: return "zero_width";
        case AdaptivityClass::intermediate: return "intermediate";
        case AdaptivityClass::full: return "full";
    }
    return "unknown";
}

std::vector<double> nonconformity_scores(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat,
                                         const Eigen::VectorXd& sigma) {
    const auto n = y.size();
    if (y_hat.size() != n || sigma.size() != n)
        throw DimensionMismatchError("score inputs differ in length");
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sigma[i] < 0.0) throw OutOfRangeError("difficulty must be non-negative");
        const double residual = std::abs(y[i] - y_hat[i]);
        if (sigma[i] == 0.0)
            scores[static_cast<std::size_t>(i)] = residual == 0.0 ? 0.0 : kInf;
        else
            scores[static_cast<std::size_t>(i)] = residual / sigma[i];
    }
    return scores;
}

double conformal_quantile(std::vector<double> scores, double alpha) {
    if (scores.empty()) throw EmptyCalibrationError();
    if (!(alpha > 0.0 && alpha < 1.0)) throw OutOfRangeError("alpha must lie in (0, 1)");

    const auto n = scores.size();
    // ceil of (1-alpha)(n+1) computed with a guard: the product can land a
    // hair above an exact integer and ceil would then overshoot by one.
    const double target = (1.0 - alpha) * static_cast<double>(n + 1);
    auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(target - 1e-9)));
    if (k > n) return kInf;
    std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     scores.end());
    return scores[k - 1];
}

std::vector<PredictionInterval> prediction_intervals(const Eigen::VectorXd& y_hat,
                                                     const Eigen::VectorXd& sigma, double q_hat,
                                                     std::vector<std::string> unit_ids) {
    const auto n = y_hat.size();
    if (sigma.size() != n) throw DimensionMismatchError("interval inputs differ in length");
    if (!unit_ids.empty() && static_cast<Eigen::Index>(unit_ids.size()) != n)
        throw DimensionMismatchError("unit id count does not match predictions");
    if (!(q_hat >= 0.0)) throw OutOfRangeError("q_hat must be >= 0 or +infinity");

    std::vector<PredictionInterval> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(y_hat[i] >= 0.0 && y_hat[i] <= 1.0))
            throw OutOfRangeError("prediction outside [0, 1]");
        if (sigma[i] < 0.0) throw OutOfRangeError("difficulty must be non-negative");

        auto& pi = out[static_cast<std::size_t>(i)];
        if (!unit_ids.empty()) pi.unit_id = std::move(unit_ids[static_cast<std::size_t>(i)]);
        pi.center = y_hat[i];
        // inf * 0 would be NaN; a zero-difficulty unit keeps a point interval.
        const double margin = sigma[i] == 0.0 ? 0.0 : q_hat * sigma[i];
        pi.lower_raw = y_hat[i] - margin;
        pi.upper_raw = y_hat[i] + margin;
        pi.lower = std::max(0.0, pi.lower_raw);
        pi.upper = std::min(1.0, pi.upper_raw);
        if (pi.lower == pi.upper)
            pi.adaptivity_class = AdaptivityClass::zero_width;
        else if (pi.lower == 0.0 && pi.upper == 1.0)
            pi.adaptivity_class = AdaptivityClass::full;
        else
            pi.adaptivity_class = AdaptivityClass::intermediate;
    }
    return out;
}

CoverageReport coverage_report(std::vector<PredictionInterval>& intervals,
                               const Eigen::VectorXd& y_true) {
    if (static_cast<Eigen::Index>(intervals.size()) != y_true.size())
        throw DimensionMismatchError("interval count does not match truths");
    if (intervals.empty()) throw EmptyInputError("interval list");

    const auto n = intervals.size();
    std::size_t covered = 0;
    double width_sum = 0.0;
    std::array<std::size_t, 3> class_counts{};
    for (std::size_t i = 0; i < n; ++i) {
        const double y = y_true[static_cast<Eigen::Index>(i)];
        if (!(y >= 0.0 && y <= 1.0)) throw OutOfRangeError("truth outside [0, 1]");
        auto& pi = intervals[i];
        pi.covered = pi.lower <= y && y <= pi.upper;
        covered += pi.covered;
        width_sum += pi.width();
        ++class_counts[static_cast<std::size_t>(pi.adaptivity_class)];
    }

    CoverageReport report;
    report.coverage = static_cast<double>(covered) / static_cast<double>(n);
    report.miw = width_sum / static_cast<double>(n);
    const double range = y_true.maxCoeff() - y_true.minCoeff();
    report.riw_degenerate = range == 0.0;
    report.riw = report.riw_degenerate ? report.miw : report.miw / range;
    // Shares must sum to exactly 1; give the most populated class the
    // complement so rounding never leaks in, and keep empty classes at 0.
    const auto top = static_cast<std::size_t>(std::distance(
        class_counts.begin(), std::max_element(class_counts.begin(), class_counts.end())));
    double others = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        if (c == top) continue;
        report.class_shares[c] =
            static_cast<double>(class_counts[c]) / static_cast<double>(n);
        others += report.class_shares[c];
    }
    report.class_shares[top] = 1.0 - others;
    return report;
}

CalibrationSplit calibration_split(std::size_t n, double calibration_fraction,
                                   std::uint64_t seed) {
    if (n < 2) throw OutOfRangeError("split needs at least 2 units");
    if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0))
        throw OutOfRangeError("calibration_fraction must lie in (0, 1)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    // Fisher-Yates; both parts stay nonempty by clamping the cut.
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);
    const auto cut = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(calibration_fraction * static_cast<double>(n))), 1,
        n - 1);

    CalibrationSplit split;
    split.calibration.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
    std::sort(split.calibration.begin(), split.calibration.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

}  // namespace isingmap
