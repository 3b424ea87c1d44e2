#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "topohk/rng.hpp"

namespace topohk {

// Sentinel for node pairs with no connecting path. Kept as +inf (never a
// large finite number) so downstream filtration code can skip such pairs.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool is_unreachable(double d) { return d == kUnreachable; }

// Dense symmetric binary adjacency, flat row-major.
struct AdjacencyMatrix {
    int n = 0;
    std::vector<uint8_t> a;  // n*n, a[i*n+j]

    static AdjacencyMatrix zeros(int n) { return {n, std::vector<uint8_t>(static_cast<size_t>(n) * n, 0)}; }
    uint8_t at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    void set(int i, int j, uint8_t v) {
        a[static_cast<size_t>(i) * n + j] = v;
        a[static_cast<size_t>(j) * n + i] = v;
    }
};

// Dense symmetric matrix of pairwise distances; entries are hop counts for
// unweighted graphs, or kUnreachable for disconnected pairs.
struct DistanceMatrix {
    int n = 0;
    std::vector<double> d;  // n*n, row-major

    static DistanceMatrix filled(int n, double value) {
        return {n, std::vector<double>(static_cast<size_t>(n) * n, value)};
    }
    double at(int i, int j) const { return d[static_cast<size_t>(i) * n + j]; }
    void set(int i, int j, double v) {
        d[static_cast<size_t>(i) * n + j] = v;
        d[static_cast<size_t>(j) * n + i] = v;
    }
};

// Undirected graph, no self-loops, canonical edge list (i < j, sorted,
// deduplicated). Node features, when present, are row-major
// num_nodes x feature_dim.
struct Graph {
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;
    std::optional<std::vector<double>> node_features;
    int feature_dim = 0;
    int label = 0;

    AdjacencyMatrix adjacency() const;
    // Directed edge list with both orientations, for message passing.
    std::vector<std::pair<int, int>> directed_edges() const;
};

struct PerturbConfig {
    double p = 0.05;       // Bernoulli flip probability, in [0, 1]
    uint64_t seed = 42;
};

// All-pairs shortest hop counts. adj must be symmetric with zero diagonal.
// Unreachable pairs come back as kUnreachable. Empty input -> 0x0 matrix.
DistanceMatrix floyd_warshall(const AdjacencyMatrix& adj);

// Incidence counts per node.
std::vector<int> node_degrees(const Graph& g);

// One-hot of min(deg, d_max) into a vector of length d_max + 1.
std::vector<double> one_hot_degree(int deg, int d_max);

// Flip each upper-triangle entry independently with probability cfg.p,
// then mirror to the lower triangle; diagonal stays zero. Deterministic
// given cfg.seed.
AdjacencyMatrix perturb_edges(const AdjacencyMatrix& adj, const PerturbConfig& cfg);

// Keep each undirected edge with probability 1 - p. Deterministic given seed.
std::vector<std::pair<int, int>> drop_edges(const std::vector<std::pair<int, int>>& edges,
                                            double p, uint64_t seed);

}  // namespace topohk
