#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "isingmap/error.hpp"

namespace isingmap {

struct ConformalConfig {
    double alpha = 0.05;
    double calibration_fraction = 0.5;
    std::uint64_t seed = 1;
};

enum class AdaptivityClass { zero_width, intermediate, full };

std::string to_string(AdaptivityClass c);

struct PredictionInterval {
    std::string unit_id;
    double center = 0.0;      // prediction in [0, 1]
    double lower_raw = 0.0;
    double upper_raw = 0.0;
    double lower = 0.0;       // max(0, lower_raw)
    double upper = 0.0;       // min(1, upper_raw)
    bool covered = false;
    AdaptivityClass adaptivity_class = AdaptivityClass::zero_width;

    double width() const { return upper - lower; }
};

struct CoverageReport {
    double coverage = 0.0;
    double miw = 0.0;
    double riw = 0.0;
    // True when the truth range collapses and RIW falls back to MIW.
    bool riw_degenerate = false;
    // Fractions of zero_width / intermediate / full intervals; sum to 1.
    std::array<double, 3> class_shares{};
};

class EmptyCalibrationError : public Error {
  public:
    EmptyCalibrationError() : Error("calibration set is empty") {}
};

// Standardized absolute residuals s_i = |y_i - y_hat_i| / sigma_i. Units with
// sigma_i = 0 score 0 on an exact hit and +infinity otherwise.
std::vector<double> nonconformity_scores(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat,
                                         const Eigen::VectorXd& sigma);

// Finite-sample calibrated quantile: the k-th smallest score with
// k = ceil((1 - alpha)(n + 1)), or +infinity when k exceeds n.
double conformal_quantile(std::vector<double> scores, double alpha);

// Per-unit intervals y_hat_i -+ q_hat * sigma_i, clamped to [0, 1]. An
// infinite q_hat widens positive-difficulty units to [0, 1] while
// zero-difficulty units keep their degenerate interval.
std::vector<PredictionInterval> prediction_intervals(const Eigen::VectorXd& y_hat,
                                                     const Eigen::VectorXd& sigma, double q_hat,
                                                     std::vector<std::string> unit_ids = {});

// Fills the covered flags and aggregates coverage, widths and class shares.
CoverageReport coverage_report(std::vector<PredictionInterval>& intervals,
                               const Eigen::VectorXd& y_true);

struct CalibrationSplit {
    std::vector<std::size_t> calibration;  // sorted indices
    std::vector<std::size_t> test;         // sorted indices
};

// Seeded uniform partition; both parts are guaranteed nonempty.
CalibrationSplit calibration_split(std::size_t n, double calibration_fraction, std::uint64_t seed);

}  // namespace isingmap
