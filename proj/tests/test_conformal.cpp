#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "isingmap/conformal.hpp"
#include "isingmap/rng.hpp"

using namespace isingmap;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("nonconformity scores standardize residuals") {
    Eigen::VectorXd y(4), y_hat(4), sigma(4);
    y << 0.5, 0.2, 0.8, 0.8;
    y_hat << 0.3, 0.2, 0.8, 0.6;
    sigma << 0.1, 0.0, 0.0, 0.4;

    const std::vector<double> s = nonconformity_scores(y, y_hat, sigma);
    CHECK(s[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s[1] == 0.0);          // zero difficulty, exact hit
    CHECK(s[2] == 0.0);
    CHECK(s[3] == doctest::Approx(0.5).epsilon(1e-12));

    y_hat[1] = 0.3;  // zero difficulty, miss
    const std::vector<double> t = nonconformity_scores(y, y_hat, sigma);
    CHECK(std::isinf(t[1]));
    CHECK(t[1] > 0.0);

    Eigen::VectorXd shorter(3);
    shorter << 0.1, 0.2, 0.3;
    CHECK_THROWS_AS(nonconformity_scores(y, shorter, sigma), DimensionMismatchError);
    sigma[0] = -0.1;
    CHECK_THROWS_AS(nonconformity_scores(y, y_hat, sigma), OutOfRangeError);
}

TEST_CASE("conformal quantile picks the calibrated order statistic") {
    // k = ceil((1 - alpha)(n + 1)), clamped into 1..n, +inf past the sample
    CHECK(conformal_quantile({3.0, 1.0, 4.0, 2.0}, 0.5) == 3.0);

    std::vector<double> nineteen;
    for (int i = 1; i <= 19; ++i) nineteen.push_back(static_cast<double>(i));
    CHECK(conformal_quantile(nineteen, 0.05) == 19.0);  // k = 19, the maximum

    CHECK(conformal_quantile({5.0}, 0.6) == 5.0);
    CHECK(std::isinf(conformal_quantile({1.0, 2.0, 3.0}, 0.05)));  // k = 4 > n
}

TEST_CASE("conformal quantile survives products that land on integers") {
    // (1 - 0.1) * 10 can evaluate just above 9; the rank must stay 9, not 10
    std::vector<double> nine;
    for (int i = 1; i <= 9; ++i) nine.push_back(static_cast<double>(i));
    const double q = conformal_quantile(nine, 0.1);
    CHECK(std::isfinite(q));
    CHECK(q == 9.0);
}

TEST_CASE("conformal quantile is monotone in alpha and handles infinities") {
    const std::vector<double> scores = {0.4, 1.7, 0.2, 3.0, 0.9, 2.2, 0.1};
    double previous = -kInf;
    for (const double alpha : {0.9, 0.7, 0.5, 0.3, 0.1, 0.05}) {
        const double q = conformal_quantile(scores, alpha);
        CHECK(q >= previous);
        previous = q;
    }

    CHECK(conformal_quantile({1.0, kInf, 2.0}, 0.5) == 2.0);
    CHECK(std::isinf(conformal_quantile({1.0, kInf, 2.0}, 0.3)));  // rank 3 is the inf

    CHECK_THROWS_AS(conformal_quantile({}, 0.5), EmptyCalibrationError);
    CHECK_THROWS_AS(conformal_quantile({1.0}, 0.0), OutOfRangeError);
    CHECK_THROWS_AS(conformal_quantile({1.0}, 1.0), OutOfRangeError);
}

TEST_CASE("prediction intervals clamp to the unit range") {
    Eigen::VectorXd y_hat(4), sigma(4);
    y_hat << 0.9, 0.5, 0.5, 0.02;
    sigma << 0.1, 0.0, 0.25, 0.3;

    const auto intervals = prediction_intervals(y_hat, sigma, 2.0, {"a", "b", "c", "d"});
    REQUIRE(intervals.size() == 4);

    CHECK(intervals[0].unit_id == "a");
    CHECK(intervals[0].lower_raw == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(intervals[0].upper_raw == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(intervals[0].lower == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(intervals[0].upper == 1.0);
    CHECK(intervals[0].adaptivity_class == AdaptivityClass::intermediate);

    CHECK(intervals[1].lower == 0.5);
    CHECK(intervals[1].upper == 0.5);
    CHECK(intervals[1].width() == 0.0);
    CHECK(intervals[1].adaptivity_class == AdaptivityClass::zero_width);

    CHECK(intervals[2].lower == 0.0);
    CHECK(intervals[2].upper == 1.0);
    CHECK(intervals[2].adaptivity_class == AdaptivityClass::full);

    CHECK(intervals[3].lower == 0.0);
    CHECK(intervals[3].upper == doctest::Approx(0.62).epsilon(1e-12));
    CHECK(intervals[3].adaptivity_class == AdaptivityClass::intermediate);
}

TEST_CASE("infinite quantile widens only positive-difficulty units") {
    Eigen::VectorXd y_hat(2), sigma(2);
    y_hat << 0.3, 0.7;
    sigma << 0.0, 0.2;
    const auto intervals = prediction_intervals(y_hat, sigma, kInf);
    CHECK(intervals[0].lower == 0.3);
    CHECK(intervals[0].upper == 0.3);
    CHECK(intervals[0].adaptivity_class == AdaptivityClass::zero_width);
    CHECK(intervals[1].lower == 0.0);
    CHECK(intervals[1].upper == 1.0);
    CHECK(intervals[1].adaptivity_class == AdaptivityClass::full);
}

TEST_CASE("prediction interval validation") {
    Eigen::VectorXd ok(1), bad(1), sigma(1);
    ok << 0.5;
    bad << 1.2;
    sigma << 0.1;
    CHECK_THROWS_AS(prediction_intervals(bad, sigma, 1.0), OutOfRangeError);
    CHECK_THROWS_AS(prediction_intervals(ok, sigma, -1.0), OutOfRangeError);
    CHECK_THROWS_AS(prediction_intervals(ok, sigma, std::nan("")), OutOfRangeError);
    CHECK_THROWS_AS(prediction_intervals(ok, Eigen::VectorXd(), 1.0), DimensionMismatchError);
    CHECK_THROWS_AS(prediction_intervals(ok, sigma, 1.0, {"a", "b"}), DimensionMismatchError);
}

TEST_CASE("coverage report aggregates widths and shares") {
    Eigen::VectorXd y_hat(4), sigma(4), y(4);
    y_hat << 0.5, 0.2, 0.9, 0.4;
    sigma << 0.1, 0.0, 0.05, 0.5;
    y << 0.55, 0.2, 0.2, 0.9;

    auto intervals = prediction_intervals(y_hat, sigma, 1.0);
    const CoverageReport report = coverage_report(intervals, y);

    CHECK(intervals[0].covered);   // [0.4, 0.6] contains 0.55
    CHECK(intervals[1].covered);   // point interval, exact hit
    CHECK_FALSE(intervals[2].covered);
    CHECK(intervals[3].covered);   // clamped to [0, 0.9]
    CHECK(report.coverage == 0.75);

    const double width_sum = 0.2 + 0.0 + 0.1 + 0.9;
    CHECK(report.miw == doctest::Approx(width_sum / 4.0).epsilon(1e-12));
    CHECK_FALSE(report.riw_degenerate);
    CHECK(report.riw == doctest::Approx(report.miw / 0.7).epsilon(1e-12));

    CHECK(report.class_shares[0] + report.class_shares[1] + report.class_shares[2] == 1.0);
    CHECK(report.class_shares[static_cast<int>(AdaptivityClass::zero_width)] == 0.25);
    CHECK(report.class_shares[static_cast<int>(AdaptivityClass::full)] == 0.0);
}

TEST_CASE("class shares sum to exactly one even with awkward counts") {
    // 7 intervals: shares of n = 7 do not round nicely
    Eigen::VectorXd y_hat(7), sigma(7), y(7);
    for (int i = 0; i < 7; ++i) {
        y_hat[i] = 0.5;
        y[i] = 0.5;
    }
    sigma << 0.0, 0.1, 0.1, 0.1, 0.9, 0.9, 0.0;
    auto intervals = prediction_intervals(y_hat, sigma, 1.0);
    const CoverageReport report = coverage_report(intervals, y);
    CHECK(report.class_shares[0] + report.class_shares[1] + report.class_shares[2] == 1.0);
    CHECK(report.class_shares[0] > 0.0);
    CHECK(report.class_shares[1] > 0.0);
    CHECK(report.class_shares[2] > 0.0);
}

TEST_CASE("degenerate truth range falls back to the unnormalized width") {
    Eigen::VectorXd y_hat(2), sigma(2), y(2);
    y_hat << 0.5, 0.6;
    sigma << 0.1, 0.1;
    y << 0.5, 0.5;
    auto intervals = prediction_intervals(y_hat, sigma, 1.0);
    const CoverageReport report = coverage_report(intervals, y);
    CHECK(report.riw_degenerate);
    CHECK(report.riw == report.miw);
}

TEST_CASE("coverage report validation") {
    Eigen::VectorXd y_hat(1), sigma(1);
    y_hat << 0.5;
    sigma << 0.1;
    auto intervals = prediction_intervals(y_hat, sigma, 1.0);

    Eigen::VectorXd wrong(2);
    wrong << 0.5, 0.5;
    CHECK_THROWS_AS(coverage_report(intervals, wrong), DimensionMismatchError);

    Eigen::VectorXd outside(1);
    outside << 1.5;
    CHECK_THROWS_AS(coverage_report(intervals, outside), OutOfRangeError);

    std::vector<PredictionInterval> empty;
    CHECK_THROWS_AS(coverage_report(empty, Eigen::VectorXd()), EmptyInputError);
}

TEST_CASE("clamping never changes coverage for truths inside the unit range") {
    Rng rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        Eigen::VectorXd y_hat(1), sigma(1), y(1);
        y_hat << rng.uniform01();
        sigma << rng.uniform01() * 0.5;
        y << rng.uniform01();
        const double q = rng.uniform01() * 3.0;

        auto intervals = prediction_intervals(y_hat, sigma, q);
        coverage_report(intervals, y);
        const bool raw_covered =
            intervals[0].lower_raw <= y[0] && y[0] <= intervals[0].upper_raw;
        CHECK(intervals[0].covered == raw_covered);
    }
}

TEST_CASE("calibration split partitions the index range") {
    const CalibrationSplit split = calibration_split(10, 0.3, 5);
    CHECK(split.calibration.size() == 3);
    CHECK(split.test.size() == 7);
    CHECK(std::is_sorted(split.calibration.begin(), split.calibration.end()));
    CHECK(std::is_sorted(split.test.begin(), split.test.end()));

    std::vector<bool> seen(10, false);
    for (const auto i : split.calibration) seen[i] = true;
    for (const auto i : split.test) {
        CHECK_FALSE(seen[i]);
        seen[i] = true;
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));

    const CalibrationSplit same = calibration_split(10, 0.3, 5);
    CHECK(split.calibration == same.calibration);
    const CalibrationSplit other = calibration_split(100, 0.5, 6);
    const CalibrationSplit different = calibration_split(100, 0.5, 7);
    CHECK(other.calibration != different.calibration);
}

TEST_CASE("calibration split keeps both parts nonempty") {
    const CalibrationSplit tiny = calibration_split(2, 0.01, 1);
    CHECK(tiny.calibration.size() == 1);
    CHECK(tiny.test.size() == 1);
    const CalibrationSplit huge = calibration_split(2, 0.99, 1);
    CHECK(huge.calibration.size() == 1);
    CHECK(huge.test.size() == 1);

    CHECK_THROWS_AS(calibration_split(1, 0.5, 1), OutOfRangeError);
    CHECK_THROWS_AS(calibration_split(10, 0.0, 1), OutOfRangeError);
    CHECK_THROWS_AS(calibration_split(10, 1.0, 1), OutOfRangeError);
}
