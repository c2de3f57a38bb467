#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "isingmap/error.hpp"
#include "isingmap/network.hpp"
#include "isingmap/spin.hpp"

namespace isingmap {

struct ConfigurationScore {
    double energy = 0.0;
    // H / H_ref; NaN when the reference energy is zero (see ratio_defined).
    double energy_ratio = 0.0;
    // log of the Boltzmann likelihood ratio against the reference state,
    // -(H - H_ref) / T; the partition function cancels.
    double loglik_ratio = 0.0;
    // ln(H_ref - H) when positive, NaN otherwise.
    double log_energy_gap = 0.0;
};

struct ScoredConfigurations {
    double reference_energy = 0.0;
    bool ratio_defined = true;
    std::vector<ConfigurationScore> scores;
};

// Scores candidate configurations against a reference state at temperature
// T > 0. A zero reference energy leaves the ratios NaN and flags the result
// instead of failing: the remaining scores are still meaningful.
ScoredConfigurations score_configurations(const InteractionGraph& graph, const Eigen::VectorXd& h,
                                          const SpinConfiguration& reference,
                                          const std::vector<SpinConfiguration>& candidates,
                                          double temperature);

// Mean over units of the base-2 Jensen-Shannon divergence between the
// Bernoulli marginals p and q. Always in [0, 1].
double jensen_shannon(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// 2x2 confusion counts between a reference labeling and a predicted one.
// Index 0 stands for spin -1, index 1 for spin +1; rows are the reference.
struct MismatchMatrix {
    std::array<std::array<std::uint64_t, 2>, 2> counts{};

    std::uint64_t total() const {
        return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    }
    double accuracy() const {
        return static_cast<double>(counts[0][0] + counts[1][1]) /
               static_cast<double>(total());
    }
};

MismatchMatrix mismatch(const SpinConfiguration& reference, const SpinConfiguration& predicted);

struct ThresholdedPrediction {
    SpinConfiguration config;
    std::vector<std::size_t> ties;  // units whose marginal sits exactly at 0.5
};

// Maps marginals to spins: p >= 0.5 becomes +1, otherwise -1. Exact ties are
// recorded so callers can see where the rule was arbitrary.
ThresholdedPrediction threshold_marginals(const Eigen::VectorXd& p_hat);

struct BootstrapCi {
    double mean = 0.0;   // sample mean of the original values
    double lower = 0.0;
    double upper = 0.0;
    std::size_t resamples = 0;
    std::size_t resample_size = 0;
};

// Percentile bootstrap for the mean: r resamples of size m drawn with
// replacement, interval from the alpha/2 and 1 - alpha/2 quantiles of the
// resample means. Deterministic for a given seed at any worker count.
BootstrapCi bootstrap_ci(const std::vector<double>& values, std::size_t r, std::size_t m,
                         double alpha, std::uint64_t seed, std::size_t workers = 1);

}  // namespace isingmap
