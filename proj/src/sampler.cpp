#include "isingmap/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "isingmap/rng.hpp"

namespace isingmap {

double temperature_at(const AnnealingSchedule& schedule, std::uint64_t t) {
    if (t == 0) throw InvalidIterationError(t);
    double temp = 0.0;
    switch (schedule.kind) {
        case ScheduleKind::hyperbolic:
            temp = schedule.t0 / static_cast<double>(t);
            break;
        case ScheduleKind::fixed:
            temp = schedule.t0;
            break;
        case ScheduleKind::logarithmic:
            temp = schedule.t0 / std::log(static_cast<double>(t) + 1.0);
            break;
    }
    if (!(temp > 0.0)) throw NonPositiveTemperatureError(temp);
    return temp;
}

double hamiltonian(const InteractionGraph& graph, const Eigen::VectorXd& h,
                   const SpinConfiguration& config) {
    if (config.size() != graph.size() ||
        static_cast<std::size_t>(h.size()) != graph.size())
        throw DimensionMismatchError("hamiltonian inputs disagree on unit count");
    validate_spins(config);

    double energy = 0.0;
    for (const auto& e : graph.edges())
        energy -= e.weight * static_cast<double>(config.spins[e.i]) *
                  static_cast<double>(config.spins[e.j]);
    for (std::size_t i = 0; i < config.size(); ++i)
        energy -= h[static_cast<Eigen::Index>(i)] * static_cast<double>(config.spins[i]);
    return energy;
}

double delta_energy(const InteractionGraph& graph, const Eigen::VectorXd& h,
                    const SpinConfiguration& config, std::size_t node) {
    if (config.size() != graph.size() ||
        static_cast<std::size_t>(h.size()) != graph.size())
        throw DimensionMismatchError("delta_energy inputs disagree on unit count");
    if (node >= graph.size()) throw IndexOutOfRangeError(node, graph.size());

    const double local = neighbor_sum(graph, config.spins, node) +
                         h[static_cast<Eigen::Index>(node)];
    return 2.0 * static_cast<double>(config.spins[node]) * local;
}

double acceptance_probability(double delta, double temperature) {
    if (!(temperature > 0.0)) throw NonPositiveTemperatureError(temperature);
    if (delta <= 0.0) return 1.0;
    return std::exp(-delta / temperature);
}

ChainResult run_chain(const InteractionGraph& graph, const Eigen::VectorXd& h,
                      const AnnealingSchedule& schedule, const ChainSpec& spec,
                      const SpinConfiguration& initial) {
    const std::size_t n = graph.size();
    if (n == 0) throw EmptyInputError("chain over an empty graph");
    if (initial.size() != n || static_cast<std::size_t>(h.size()) != n)
        throw DimensionMismatchError("chain inputs disagree on unit count");
    validate_spins(initial);
    if (spec.n_iter == 0) throw OutOfRangeError("n_iter must be >= 1");
    if (spec.burn_in_fraction < 0.0 || spec.burn_in_fraction >= 1.0)
        throw OutOfRangeError("burn_in_fraction must lie in [0, 1)");
    if (spec.track_configurations && n > 20)
        throw OutOfRangeError("configuration tracking is limited to 20 units");

    const std::uint64_t burn = std::min(
        static_cast<std::uint64_t>(spec.burn_in_fraction * static_cast<double>(spec.n_iter)),
        spec.n_iter - 1);
    const std::uint64_t stride =
        spec.trace_stride != 0 ? spec.trace_stride : std::max<std::uint64_t>(1, spec.n_iter / 1000);

    ChainResult result;
    result.final_config = initial;
    auto& spins = result.final_config.spins;
    double energy = hamiltonian(graph, h, result.final_config);

    result.energy_trace.push_back({0, energy});
    result.plus_counts.assign(n, 0);

    Rng rng(spec.seed);
    // One Metropolis step at iteration t; returns the flipped node or n.
    auto step = [&](std::uint64_t t) -> std::size_t {
        const std::size_t node = static_cast<std::size_t>(rng.below(n));
        const double local = neighbor_sum(graph, spins, node) +
                             h[static_cast<Eigen::Index>(node)];
        const double dh = 2.0 * static_cast<double>(spins[node]) * local;
        bool accept = dh <= 0.0;
        if (!accept) {
            const double temp = temperature_at(schedule, t);
            accept = rng.uniform01() < std::exp(-dh / temp);
        }
        if (!accept) return n;
        spins[node] = static_cast<std::int8_t>(-spins[node]);
        energy += dh;
        return node;
    };
    auto maybe_trace = [&](std::uint64_t t) {
        if (t % stride == 0) result.energy_trace.push_back({t, energy});
    };

    for (std::uint64_t t = 1; t <= burn; ++t) {
        step(t);
        maybe_trace(t);
    }

    // Counters cover the states after iterations burn+1..n_iter. held_from[i]
    // is the first sample index at which unit i's current value holds.
    std::vector<std::uint64_t> held_from(n, burn + 1);
    std::uint64_t mask = 0;
    std::uint64_t mask_held_from = burn + 1;
    std::unordered_map<std::uint64_t, std::uint64_t> histogram;
    if (spec.track_configurations)
        for (std::size_t i = 0; i < n; ++i)
            if (spins[i] == +1) mask |= 1ull << i;

    for (std::uint64_t t = burn + 1; t <= spec.n_iter; ++t) {
        const std::size_t flipped = step(t);
        if (flipped != n) {
            // spins[flipped] already holds the new value; the old one held
            // for samples held_from..t-1.
            if (spins[flipped] == -1) result.plus_counts[flipped] += t - held_from[flipped];
            held_from[flipped] = t;
            if (spec.track_configurations) {
                histogram[mask] += t - mask_held_from;
                mask ^= 1ull << flipped;
                mask_held_from = t;
            }
        }
        maybe_trace(t);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (spins[i] == +1) result.plus_counts[i] += spec.n_iter + 1 - held_from[i];
    if (spec.track_configurations) {
        histogram[mask] += spec.n_iter + 1 - mask_held_from;
        result.configuration_counts.assign(histogram.begin(), histogram.end());
        std::sort(result.configuration_counts.begin(), result.configuration_counts.end());
    }

    result.samples_used = spec.n_iter - burn;
    // The accumulator may drift over long chains; recompute from the state.
    result.final_energy = hamiltonian(graph, h, result.final_config);
    if (result.energy_trace.back().iteration == spec.n_iter)
        result.energy_trace.back().energy = result.final_energy;
    else
        result.energy_trace.push_back({spec.n_iter, result.final_energy});
    return result;
}

namespace {

// Runs fn(0..count-1) across at most `workers` threads with a strided
// partition. Work item i always sees the same arguments regardless of the
// worker count; the first exception wins and is rethrown on the caller.
void parallel_for_strided(std::size_t count, std::size_t workers,
                          const std::function<void(std::size_t)>& fn) {
    if (workers == 0) throw OutOfRangeError("workers must be >= 1");
    const std::size_t used = std::min(workers, count);
    if (used <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (std::size_t w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += used) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

MarginalEstimate pool_rows(Eigen::MatrixXd replicates, std::vector<std::string> unit_ids) {
    const Eigen::Index r = replicates.rows();
    const Eigen::Index n = replicates.cols();
    MarginalEstimate est;
    est.unit_ids = std::move(unit_ids);
    est.p_hat = Eigen::VectorXd::Zero(n);
    // Fixed accumulation order keeps the pooled values byte-identical for any
    // worker count.
    for (Eigen::Index k = 0; k < r; ++k) est.p_hat += replicates.row(k).transpose();
    est.p_hat /= static_cast<double>(r);
    est.sigma = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < r; ++k) {
            const double d = replicates(k, j) - est.p_hat[j];
            acc += d * d;
        }
        est.sigma[j] = std::sqrt(acc / static_cast<double>(r));
    }
    est.replicates = std::move(replicates);
    return est;
}

}  // namespace

MarginalEstimate run_replicates_with_seeds(const InteractionGraph& graph, const Eigen::VectorXd& h,
                                           const AnnealingSchedule& schedule, const ChainSpec& spec,
                                           const SpinConfiguration& initial,
                                           const std::vector<std::uint64_t>& seeds,
                                           std::size_t workers,
                                           std::vector<std::string> unit_ids) {
    if (seeds.empty()) throw EmptyInputError("replicate seed list");
    const std::size_t n = graph.size();
    Eigen::MatrixXd replicates(static_cast<Eigen::Index>(seeds.size()),
                               static_cast<Eigen::Index>(n));
    parallel_for_strided(seeds.size(), workers, [&](std::size_t k) {
        ChainSpec local = spec;
        local.seed = seeds[k];
        local.track_configurations = false;
        const ChainResult chain = run_chain(graph, h, schedule, local, initial);
        for (std::size_t i = 0; i < n; ++i)
            replicates(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
                static_cast<double>(chain.plus_counts[i]) /
                static_cast<double>(chain.samples_used);
    });
    return pool_rows(std::move(replicates), std::move(unit_ids));
}

MarginalEstimate run_replicates(const InteractionGraph& graph, const Eigen::VectorXd& h,
                                const AnnealingSchedule& schedule, const ChainSpec& spec,
                                const SpinConfiguration& initial, std::size_t replicate_count,
                                std::size_t workers, std::vector<std::string> unit_ids) {
    if (replicate_count == 0) throw EmptyInputError("replicate count");
    std::vector<std::uint64_t> seeds(replicate_count);
    for (std::size_t k = 0; k < replicate_count; ++k) seeds[k] = derive_seed(spec.seed, k);
    return run_replicates_with_seeds(graph, h, schedule, spec, initial, seeds, workers,
                                     std::move(unit_ids));
}

std::vector<SpinConfiguration> sample_configurations(const Eigen::VectorXd& p_hat,
                                                     std::size_t count, std::uint64_t seed) {
    const auto n = p_hat.size();
    if (n == 0) throw EmptyInputError("marginal vector");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(p_hat[i] >= 0.0 && p_hat[i] <= 1.0))
            throw OutOfRangeError("marginal probability outside [0, 1]");

    std::vector<SpinConfiguration> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Rng rng(derive_seed(seed, s));
        SpinConfiguration config = uniform_spins(static_cast<std::size_t>(n), -1);
        for (Eigen::Index i = 0; i < n; ++i)
            if (rng.uniform01() < p_hat[i]) config.spins[static_cast<std::size_t>(i)] = +1;
        out.push_back(std::move(config));
    }
    return out;
}

MarginalEstimate bernoulli_replicates(const MarginalEstimate& pooled, std::size_t replicate_count,
                                      std::uint64_t samples_per_replicate, std::uint64_t seed,
                                      std::size_t workers) {
    const auto n = pooled.p_hat.size();
    if (n == 0) throw EmptyInputError("pooled marginal vector");
    if (replicate_count == 0) throw EmptyInputError("replicate count");
    if (samples_per_replicate == 0) throw OutOfRangeError("samples_per_replicate must be >= 1");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(pooled.p_hat[i] >= 0.0 && pooled.p_hat[i] <= 1.0))
            throw OutOfRangeError("marginal probability outside [0, 1]");

    Eigen::MatrixXd replicates(static_cast<Eigen::Index>(replicate_count), n);
    parallel_for_strided(replicate_count, workers, [&](std::size_t k) {
        Rng rng(derive_seed(seed, k));
        for (Eigen::Index i = 0; i < n; ++i) {
            std::uint64_t hits = 0;
            for (std::uint64_t s = 0; s < samples_per_replicate; ++s)
                hits += rng.uniform01() < pooled.p_hat[i];
            replicates(static_cast<Eigen::Index>(k), i) =
                static_cast<double>(hits) / static_cast<double>(samples_per_replicate);
        }
    });

    MarginalEstimate est = pool_rows(std::move(replicates), pooled.unit_ids);
    est.p_hat = pooled.p_hat;  // refits estimate spread only; the point estimate stands
    return est;
}

}  // namespace isingmap
