#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isingmap/error.hpp"

namespace isingmap {

// Discrete context profile of one territorial unit. Codes follow the ingest
// conventions: three-level ordinal attributes are 1..3, the binary flag is 0/1.
struct AttributeProfile {
    int altitude = 0;     // ALT: 1 plain, 2 hill, 3 mountain
    int population = 0;   // POP: 1 small, 2 medium, 3 large
    int area = 0;         // SUP: 1 small, 2 medium, 3 large
    int coastal = 0;      // CLITO: 0 inland, 1 coastal
    int urbanization = 0; // DEGURB: 1 dense, 2 intermediate, 3 rural

    friend bool operator==(const AttributeProfile&, const AttributeProfile&) = default;
};

class InvalidAttributeError : public Error {
  public:
    InvalidAttributeError(std::size_t unit, const std::string& field, int value)
        : Error("unit " + std::to_string(unit) + ": attribute '" + field + "' value " +
                std::to_string(value) + " outside its admissible codes") {}
};

void validate_profile(const AttributeProfile& profile, std::size_t unit);

// Number of coinciding attributes out of the five.
int matching_attributes(const AttributeProfile& a, const AttributeProfile& b);

struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

class SelfLoopError : public Error {
  public:
    explicit SelfLoopError(std::uint32_t node)
        : Error("self loop on node " + std::to_string(node)) {}
};

class DuplicateEdgeError : public Error {
  public:
    DuplicateEdgeError(std::uint32_t i, std::uint32_t j)
        : Error("duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")") {}
};

// Undirected weighted graph in compressed sparse row form. Edges are stored
// once with i < j; the adjacency exposes both directions.
class InteractionGraph {
  public:
    InteractionGraph() = default;

    // Normalizes orientation to i < j, rejects self loops, duplicates and
    // out-of-range endpoints.
    static InteractionGraph from_edges(std::size_t n, std::vector<Edge> edges);

    std::size_t size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    std::size_t degree(std::size_t node) const;

    // Neighbor ids and the matching weights, index-aligned.
    const std::uint32_t* neighbors_of(std::size_t node) const;
    const double* weights_of(std::size_t node) const;

    std::size_t component_count() const;

  private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> adj_;
    std::vector<double> w_;
};

// Connects units whose profiles agree on at least min_match of the five
// attributes. The default requires full agreement, which yields a disjoint
// union of cliques (one per realized profile).
InteractionGraph build_graph(const std::vector<AttributeProfile>& profiles, int min_match = 5);

// Weighted local field term sum_j J_ij s_j for one node.
double neighbor_sum(const InteractionGraph& graph, const std::vector<std::int8_t>& spins,
                    std::size_t node);

class TooLargeError : public Error {
  public:
    TooLargeError(std::size_t n, std::size_t cap)
        : Error("dense spectrum requested for n = " + std::to_string(n) + " (cap " +
                std::to_string(cap) + ")") {}
};

struct SpectrumSummary {
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool indefinite = false;
};

// Extreme eigenvalues of the dense adjacency matrix. Guarded by dense_cap
// because the decomposition is O(n^3).
SpectrumSummary spectrum_summary(const InteractionGraph& graph, std::size_t dense_cap = 5000);

}  // namespace isingmap
