#include "isingmap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isingmap/rng.hpp"
#include "isingmap/sampler.hpp"
#include "isingmap/stats.hpp"

namespace isingmap {

ScoredConfigurations score_configurations(const InteractionGraph& graph, const Eigen::VectorXd& h,
                                          const SpinConfiguration& reference,
                                          const std::vector<SpinConfiguration>& candidates,
                                          double temperature) {
    if (!(temperature > 0.0)) throw NonPositiveTemperatureError(temperature);

    ScoredConfigurations out;
    out.reference_energy = hamiltonian(graph, h, reference);
    out.ratio_defined = out.reference_energy != 0.0;
    out.scores.reserve(candidates.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& candidate : candidates) {
        ConfigurationScore s;
        s.energy = hamiltonian(graph, h, candidate);
        s.energy_ratio = out.ratio_defined ? s.energy / out.reference_energy : nan;
        s.loglik_ratio = -(s.energy - out.reference_energy) / temperature;
        const double gap = out.reference_energy - s.energy;
        s.log_energy_gap = gap > 0.0 ? std::log(gap) : nan;
        out.scores.push_back(s);
    }
    return out;
}

namespace {

// Binary entropy-style term x * log2(x / y) with the 0 * log 0 convention.
double kl_term(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log2(x / y);
}

}  // namespace

double jensen_shannon(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) throw DimensionMismatchError("marginal vectors differ in length");
    if (p.size() == 0) throw EmptyInputError("marginal vectors");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0 && p[i] <= 1.0) || !(q[i] >= 0.0 && q[i] <= 1.0))
            throw OutOfRangeError("marginal probability outside [0, 1]");
    }

    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double m1 = 0.5 * (p[i] + q[i]);
        const double m0 = 0.5 * ((1.0 - p[i]) + (1.0 - q[i]));
        const double jsd = 0.5 * (kl_term(p[i], m1) + kl_term(1.0 - p[i], m0)) +
                           0.5 * (kl_term(q[i], m1) + kl_term(1.0 - q[i], m0));
        acc += std::clamp(jsd, 0.0, 1.0);  // guards round-off at the endpoints
    }
    return acc / static_cast<double>(p.size());
}

MismatchMatrix mismatch(const SpinConfiguration& reference, const SpinConfiguration& predicted) {
    if (reference.size() != predicted.size())
        throw DimensionMismatchError("labelings differ in length");
    if (reference.size() == 0) throw EmptyInputError("labelings");
    validate_spins(reference);
    validate_spins(predicted);

    MismatchMatrix m;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const int row = reference.spins[i] == +1 ? 1 : 0;
        const int col = predicted.spins[i] == +1 ? 1 : 0;
        ++m.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }
    return m;
}

ThresholdedPrediction threshold_marginals(const Eigen::VectorXd& p_hat) {
    if (p_hat.size() == 0) throw EmptyInputError("marginal vector");
    ThresholdedPrediction out;
    out.config = uniform_spins(static_cast<std::size_t>(p_hat.size()), -1);
    for (Eigen::Index i = 0; i < p_hat.size(); ++i) {
        if (!(p_hat[i] >= 0.0 && p_hat[i] <= 1.0))
            throw OutOfRangeError("marginal probability outside [0, 1]");
        if (p_hat[i] >= 0.5) out.config.spins[static_cast<std::size_t>(i)] = +1;
        if (p_hat[i] == 0.5) out.ties.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

BootstrapCi bootstrap_ci(const std::vector<double>& values, std::size_t r, std::size_t m,
                         double alpha, std::uint64_t seed, std::size_t workers) {
    if (values.empty()) throw EmptyInputError("bootstrap sample");
    if (r == 0 || m == 0) throw OutOfRangeError("bootstrap needs r >= 1 and m >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw OutOfRangeError("alpha must lie in (0, 1)");
    (void)workers;  // resampling is cheap; kept for interface symmetry

    const std::size_t n = values.size();
    std::vector<double> means(r);
    for (std::size_t k = 0; k < r; ++k) {
        Rng rng(derive_seed(seed, k));
        double acc = 0.0;
        for (std::size_t s = 0; s < m; ++s) acc += values[rng.below(n)];
        means[k] = acc / static_cast<double>(m);
    }
    std::sort(means.begin(), means.end());

    BootstrapCi ci;
    ci.mean = mean(values);
    ci.lower = quantile_sorted(means, alpha / 2.0);
    ci.upper = quantile_sorted(means, 1.0 - alpha / 2.0);
    ci.resamples = r;
    ci.resample_size = m;
    return ci;
}

}  // namespace isingmap
