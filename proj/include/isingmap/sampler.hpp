#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "isingmap/error.hpp"
#include "isingmap/network.hpp"
#include "isingmap/spin.hpp"

namespace isingmap {

enum class ScheduleKind {
    hyperbolic,   // T(t) = T0 / t
    fixed,        // T(t) = T0
    logarithmic,  // T(t) = T0 / ln(t + 1)
};

struct AnnealingSchedule {
    ScheduleKind kind = ScheduleKind::hyperbolic;
    double t0 = 100.0;
};

class InvalidIterationError : public Error {
  public:
    explicit InvalidIterationError(std::uint64_t t)
        : Error("iteration index " + std::to_string(t) + " invalid; chains start at t = 1") {}
};

class NonPositiveTemperatureError : public Error {
  public:
    explicit NonPositiveTemperatureError(double t)
        : Error("temperature " + std::to_string(t) + " must be positive") {}
};

// Temperature at iteration t >= 1. Throws InvalidIterationError for t = 0 and
// NonPositiveTemperatureError when the schedule yields T <= 0.
double temperature_at(const AnnealingSchedule& schedule, std::uint64_t t);

struct ChainSpec {
    std::uint64_t n_iter = 600000;
    double burn_in_fraction = 0.10;
    std::uint64_t seed = 1;
    // 0 disables the energy trace inside the burn-in-aware run; any other
    // value records every `trace_stride`-th iteration plus the initial state.
    std::uint64_t trace_stride = 0;  // 0 = auto: n_iter / 1000, at least 1
    bool track_configurations = false;  // exact histogram, only for n <= 20
};

struct TracePoint {
    std::uint64_t iteration = 0;
    double energy = 0.0;
};

struct ChainResult {
    std::vector<std::uint64_t> plus_counts;  // per unit, post-burn-in samples with s = +1
    std::uint64_t samples_used = 0;
    std::vector<TracePoint> energy_trace;
    SpinConfiguration final_config;
    double final_energy = 0.0;
    // state bitmask -> visit count over post-burn-in samples; empty unless
    // track_configurations was requested.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> configuration_counts;
};

struct MarginalEstimate {
    std::vector<std::string> unit_ids;
    Eigen::VectorXd p_hat;       // pooled across replicates
    Eigen::MatrixXd replicates;  // R x N per-replicate marginals
    Eigen::VectorXd sigma;       // per-unit population spread across replicates
};

// H(s) = -sum_{(i,j) in E} w_ij s_i s_j - sum_i h_i s_i, each edge counted once.
double hamiltonian(const InteractionGraph& graph, const Eigen::VectorXd& h,
                   const SpinConfiguration& config);

// Energy change of flipping one spin: dH = 2 s_i (sum_j J_ij s_j + h_i).
double delta_energy(const InteractionGraph& graph, const Eigen::VectorXd& h,
                    const SpinConfiguration& config, std::size_t node);

// Metropolis rule min{1, exp(-dH / T)}.
double acceptance_probability(double delta, double temperature);

// Single-site Metropolis chain. Iterations run t = 1..n_iter; the marginal
// accumulators see every post-burn-in state exactly once.
ChainResult run_chain(const InteractionGraph& graph, const Eigen::VectorXd& h,
                      const AnnealingSchedule& schedule, const ChainSpec& spec,
                      const SpinConfiguration& initial);

// Independent replicate chains with seeds derived from spec.seed by replicate
// index. Results are merged in index order, so any worker count yields
// byte-identical output.
MarginalEstimate run_replicates(const InteractionGraph& graph, const Eigen::VectorXd& h,
                                const AnnealingSchedule& schedule, const ChainSpec& spec,
                                const SpinConfiguration& initial, std::size_t replicate_count,
                                std::size_t workers, std::vector<std::string> unit_ids = {});

// Same, but with one explicit seed per replicate.
MarginalEstimate run_replicates_with_seeds(const InteractionGraph& graph, const Eigen::VectorXd& h,
                                           const AnnealingSchedule& schedule, const ChainSpec& spec,
                                           const SpinConfiguration& initial,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::size_t workers,
                                           std::vector<std::string> unit_ids = {});

// Draws independent spin configurations from the product of the estimated
// marginals: unit i is +1 with probability p_hat[i].
std::vector<SpinConfiguration> sample_configurations(const Eigen::VectorXd& p_hat,
                                                     std::size_t count, std::uint64_t seed);

// Parametric resampling of the marginal matrix: each replicate row is refit
// from `samples_per_replicate` Bernoulli draws per unit. The pooled p_hat is
// kept; sigma is re-estimated across the resampled rows.
MarginalEstimate bernoulli_replicates(const MarginalEstimate& pooled, std::size_t replicate_count,
                                      std::uint64_t samples_per_replicate, std::uint64_t seed,
                                      std::size_t workers);

}  // namespace isingmap
