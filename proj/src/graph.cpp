#include "topohk/graph.hpp"

#include <algorithm>

#include "topohk/error.hpp"

namespace topohk {

AdjacencyMatrix Graph::adjacency() const {
    AdjacencyMatrix adj = AdjacencyMatrix::zeros(num_nodes);
    for (const auto& [u, v] : edges) adj.set(u, v, 1);
    return adj;
}

std::vector<std::pair<int, int>> Graph::directed_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
        out.emplace_back(u, v);
        out.emplace_back(v, u);
    }
    return out;
}

DistanceMatrix floyd_warshall(const AdjacencyMatrix& adj) {
    const int n = adj.n;
    DistanceMatrix dist = DistanceMatrix::filled(n, kUnreachable);
    for (int i = 0; i < n; ++i) {
        dist.d[static_cast<size_t>(i) * n + i] = 0.0;
        for (int j = 0; j < n; ++j) {
            if (adj.at(i, j)) dist.d[static_cast<size_t>(i) * n + j] = 1.0;
        }
    }
    for (int k = 0; k < n; ++k) {
        const double* dk = &dist.d[static_cast<size_t>(k) * n];
        for (int i = 0; i < n; ++i) {
            const double dik = dist.d[static_cast<size_t>(i) * n + k];
            if (is_unreachable(dik)) continue;
            double* di = &dist.d[static_cast<size_t>(i) * n];
            for (int j = 0; j < n; ++j) {
                const double via = dik + dk[j];
                if (via < di[j]) di[j] = via;
            }
        }
    }
    return dist;
}

std::vector<int> node_degrees(const Graph& g) {
    std::vector<int> deg(static_cast<size_t>(g.num_nodes), 0);
    for (const auto& [u, v] : g.edges) {
        ++deg[static_cast<size_t>(u)];
        ++deg[static_cast<size_t>(v)];
    }
    return deg;
}

std::vector<double> one_hot_degree(int deg, int d_max) {
    if (d_max < 0) throw InvalidArgument("one_hot_degree: d_max must be >= 0");
    std::vector<double> v(static_cast<size_t>(d_max) + 1, 0.0);
    v[static_cast<size_t>(std::min(deg, d_max))] = 1.0;
    return v;
}

AdjacencyMatrix perturb_edges(const AdjacencyMatrix& adj, const PerturbConfig& cfg) {
    if (cfg.p < 0.0 || cfg.p > 1.0) throw InvalidArgument("perturb_edges: p must be in [0, 1]");
    AdjacencyMatrix out = adj;
    Rng rng(cfg.seed);
    // Row-major sweep of the strict upper triangle; this order is part of
    // the reproducibility contract.
    for (int i = 0; i < adj.n; ++i) {
        for (int j = i + 1; j < adj.n; ++j) {
            if (rng.bernoulli(cfg.p)) out.set(i, j, adj.at(i, j) ? 0 : 1);
        }
    }
    for (int i = 0; i < adj.n; ++i) out.a[static_cast<size_t>(i) * adj.n + i] = 0;
    return out;
}

std::vector<std::pair<int, int>> drop_edges(const std::vector<std::pair<int, int>>& edges,
                                            double p, uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw InvalidArgument("drop_edges: p must be in [0, 1]");
    std::vector<std::pair<int, int>> kept;
    kept.reserve(edges.size());
    Rng rng(seed);
    for (const auto& e : edges) {
        if (!rng.bernoulli(p)) kept.push_back(e);
    }
    return kept;
}

}  // namespace topohk
