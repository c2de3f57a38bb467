#include "isingmap/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace isingmap {

void validate_profile(const AttributeProfile& profile, std::size_t unit) {
    auto check = [&](int value, int lo, int hi, const char* field) {
        if (value < lo || value > hi) throw InvalidAttributeError(unit, field, value);
    };
    check(profile.altitude, 1, 3, "ALT");
    check(profile.population, 1, 3, "POP");
    check(profile.area, 1, 3, "SUP");
    check(profile.coastal, 0, 1, "CLITO");
    check(profile.urbanization, 1, 3, "DEGURB");
}

int matching_attributes(const AttributeProfile& a, const AttributeProfile& b) {
    int m = 0;
    m += a.altitude == b.altitude;
    m += a.population == b.population;
    m += a.area == b.area;
    m += a.coastal == b.coastal;
    m += a.urbanization == b.urbanization;
    return m;
}

InteractionGraph InteractionGraph::from_edges(std::size_t n, std::vector<Edge> edges) {
    InteractionGraph g;
    g.n_ = n;
    for (auto& e : edges) {
        if (e.i == e.j) throw SelfLoopError(e.i);
        if (e.i >= n || e.j >= n)
            throw IndexOutOfRangeError(std::max<std::size_t>(e.i, e.j), n);
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::size_t k = 1; k < edges.size(); ++k)
        if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j)
            throw DuplicateEdgeError(edges[k].i, edges[k].j);
    g.edges_ = std::move(edges);

    // CSR: count both directions, prefix sum, fill.
    g.offsets_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
        ++g.offsets_[e.i + 1];
        ++g.offsets_[e.j + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.adj_.resize(g.offsets_[n]);
    g.w_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : g.edges_) {
        g.adj_[cursor[e.i]] = e.j;
        g.w_[cursor[e.i]++] = e.weight;
        g.adj_[cursor[e.j]] = e.i;
        g.w_[cursor[e.j]++] = e.weight;
    }
    return g;
}

std::size_t InteractionGraph::degree(std::size_t node) const {
    if (node >= n_) throw IndexOutOfRangeError(node, n_);
    return offsets_[node + 1] - offsets_[node];
}

const std::uint32_t* InteractionGraph::neighbors_of(std::size_t node) const {
    if (node >= n_) throw IndexOutOfRangeError(node, n_);
    return adj_.data() + offsets_[node];
}

const double* InteractionGraph::weights_of(std::size_t node) const {
    if (node >= n_) throw IndexOutOfRangeError(node, n_);
    return w_.data() + offsets_[node];
}

std::size_t InteractionGraph::component_count() const {
    std::vector<std::uint32_t> label(n_, UINT32_MAX);
    std::vector<std::uint32_t> stack;
    std::size_t components = 0;
    for (std::uint32_t start = 0; start < n_; ++start) {
        if (label[start] != UINT32_MAX) continue;
        ++components;
        label[start] = static_cast<std::uint32_t>(components);
        stack.push_back(start);
        while (!stack.empty()) {
            const std::uint32_t v = stack.back();
            stack.pop_back();
            const std::size_t deg = offsets_[v + 1] - offsets_[v];
            const std::uint32_t* nb = adj_.data() + offsets_[v];
            for (std::size_t k = 0; k < deg; ++k) {
                if (label[nb[k]] == UINT32_MAX) {
                    label[nb[k]] = label[v];
                    stack.push_back(nb[k]);
                }
            }
        }
    }
    return components;
}

namespace {

std::uint64_t profile_key(const AttributeProfile& p) {
    std::uint64_t key = 0;
    key = key * 8 + static_cast<std::uint64_t>(p.altitude);
    key = key * 8 + static_cast<std::uint64_t>(p.population);
    key = key * 8 + static_cast<std::uint64_t>(p.area);
    key = key * 8 + static_cast<std::uint64_t>(p.coastal);
    key = key * 8 + static_cast<std::uint64_t>(p.urbanization);
    return key;
}

}  // namespace

InteractionGraph build_graph(const std::vector<AttributeProfile>& profiles, int min_match) {
    const std::size_t n = profiles.size();
    if (min_match < 1 || min_match > 5)
        throw OutOfRangeError("min_match must be between 1 and 5");
    for (std::size_t u = 0; u < n; ++u) validate_profile(profiles[u], u);

    std::vector<Edge> edges;
    if (min_match == 5) {
        // Full agreement: bucket identical profiles, emit each bucket's clique.
        std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
        for (std::uint32_t u = 0; u < n; ++u) buckets[profile_key(profiles[u])].push_back(u);
        for (const auto& [key, members] : buckets) {
            (void)key;
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    edges.push_back({members[a], members[b], 1.0});
        }
    } else {
        for (std::uint32_t a = 0; a < n; ++a)
            for (std::uint32_t b = a + 1; b < n; ++b)
                if (matching_attributes(profiles[a], profiles[b]) >= min_match)
                    edges.push_back({a, b, 1.0});
    }
    return InteractionGraph::from_edges(n, std::move(edges));
}

double neighbor_sum(const InteractionGraph& graph, const std::vector<std::int8_t>& spins,
                    std::size_t node) {
    if (spins.size() != graph.size())
        throw DimensionMismatchError("spin vector length does not match graph size");
    const std::size_t deg = graph.degree(node);
    const std::uint32_t* nb = graph.neighbors_of(node);
    const double* w = graph.weights_of(node);
    double acc = 0.0;
    for (std::size_t k = 0; k < deg; ++k) acc += w[k] * static_cast<double>(spins[nb[k]]);
    return acc;
}

SpectrumSummary spectrum_summary(const InteractionGraph& graph, std::size_t dense_cap) {
    const std::size_t n = graph.size();
    if (n > dense_cap) throw TooLargeError(n, dense_cap);
    if (n == 0) return {};

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (const auto& e : graph.edges()) {
        a(e.i, e.j) = e.weight;
        a(e.j, e.i) = e.weight;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DegenerateInputError("adjacency eigensolve failed");

    SpectrumSummary s;
    s.min_eigenvalue = solver.eigenvalues().minCoeff();
    s.max_eigenvalue = solver.eigenvalues().maxCoeff();
    s.indefinite = s.min_eigenvalue < -1e-9 && s.max_eigenvalue > 1e-9;
    return s;
}

}  // namespace isingmap
