#include "synth_data.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "topohk/error.hpp"

namespace topohk::datagen {

namespace {

// Random attachment tree on n nodes.
std::vector<std::pair<int, int>> random_tree(int n, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) {
        const int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(i)));
        edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    return edges;
}

void add_random_edges(std::set<std::pair<int, int>>& edges, int n, int count, Rng& rng) {
    int attempts = 0;
    while (count > 0 && attempts < 50 * (count + 1)) {
        ++attempts;
        const int a = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        const int b = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        if (a == b) continue;
        const auto e = std::make_pair(std::min(a, b), std::max(a, b));
        if (edges.insert(e).second) --count;
    }
}

Graph finish_graph(int n, const std::set<std::pair<int, int>>& edges, int label) {
    Graph g;
    g.num_nodes = n;
    g.edges.assign(edges.begin(), edges.end());
    g.label = label;
    return g;
}

std::vector<int> class_labels(int n, int label, int kinds, Rng& rng) {
    std::vector<int> out(static_cast<size_t>(n));
    for (int& k : out) {
        if (rng.bernoulli(0.5)) k = label % kinds;
        else k = static_cast<int>(rng.next_below(static_cast<uint64_t>(kinds)));
    }
    return out;
}

}  // namespace

std::vector<LabeledGraph> make_synth_mutag(uint64_t seed) {
    const Rng base(seed);
    std::vector<LabeledGraph> out;
    out.reserve(188);
    for (int idx = 0; idx < 188; ++idx) {
        Rng rng = base.fork(static_cast<uint64_t>(idx));
        const int label = idx < 125 ? 0 : 1;
        const int n = 12 + static_cast<int>(rng.next_below(13));  // 12..24
        std::set<std::pair<int, int>> edges;
        if (label == 0) {
            const auto tree = random_tree(n, rng);
            edges.insert(tree.begin(), tree.end());
        } else {
            const int ring = 5 + static_cast<int>(rng.next_below(4));  // 5..8
            for (int i = 0; i < ring; ++i) edges.insert({std::min(i, (i + 1) % ring),
                                                         std::max(i, (i + 1) % ring)});
            for (int i = ring; i < n; ++i) {
                const int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(i)));
                edges.insert({std::min(i, j), std::max(i, j)});
            }
        }
        LabeledGraph lg;
        lg.graph = finish_graph(n, edges, label);
        lg.node_labels = class_labels(n, label, 7, rng);
        out.push_back(std::move(lg));
    }
    return out;
}

namespace {

std::vector<int> hop_distances_from(int src, int n,
                                    const std::set<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const auto& [u, v] : edges) {
        adj[static_cast<size_t>(u)].push_back(v);
        adj[static_cast<size_t>(v)].push_back(u);
    }
    std::vector<int> dist(static_cast<size_t>(n), -1);
    std::vector<int> frontier{src};
    dist[static_cast<size_t>(src)] = 0;
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int u : frontier)
            for (int v : adj[static_cast<size_t>(u)])
                if (dist[static_cast<size_t>(v)] < 0) {
                    dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    return dist;
}

// Adds one edge whose endpoints are at the requested hop distance: 2 closes
// a triangle (no persistent loop), >= 3 opens a chordless cycle.
void add_edge_at_distance(std::set<std::pair<int, int>>& edges, int n, bool long_range, Rng& rng) {
    for (int attempt = 0; attempt < 40; ++attempt) {
        const int u = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        const auto dist = hop_distances_from(u, n, edges);
        std::vector<int> candidates;
        for (int v = 0; v < n; ++v) {
            if (long_range ? dist[static_cast<size_t>(v)] >= 3 : dist[static_cast<size_t>(v)] == 2)
                candidates.push_back(v);
        }
        if (candidates.empty()) continue;
        const int v = candidates[rng.next_below(candidates.size())];
        if (edges.insert({std::min(u, v), std::max(u, v)}).second) return;
    }
}

}  // namespace

std::vector<LabeledGraph> make_synth_proteins(uint64_t seed) {
    // Both classes share the size, degree and node-label distributions;
    // they differ in how their extra edges close up: label 0 mostly closes
    // triangles (no surviving loops), label 1 mostly opens long cycles.
    const Rng base(seed);
    std::vector<LabeledGraph> out;
    out.reserve(1113);
    for (int idx = 0; idx < 1113; ++idx) {
        Rng rng = base.fork(0x50000000ULL + static_cast<uint64_t>(idx));
        const int label = idx < 663 ? 0 : 1;
        const int n = 20 + static_cast<int>(rng.next_below(39));  // 20..58
        std::set<std::pair<int, int>> edges;
        const auto tree = random_tree(n, rng);
        edges.insert(tree.begin(), tree.end());
        const int extras = static_cast<int>(0.25 * n);
        const double long_range_rate = label == 0 ? 0.2 : 0.45;
        for (int e = 0; e < extras; ++e)
            add_edge_at_distance(edges, n, rng.bernoulli(long_range_rate), rng);
        LabeledGraph lg;
        lg.graph = finish_graph(n, edges, label);
        lg.node_labels.assign(static_cast<size_t>(n), 0);
        for (int& k : lg.node_labels) k = static_cast<int>(rng.next_below(3));
        out.push_back(std::move(lg));
    }
    return out;
}

void write_tudataset(const std::string& dir, const std::string& name,
                     const std::vector<LabeledGraph>& graphs, bool with_node_labels) {
    namespace fs = std::filesystem;
    const fs::path root = fs::path(dir) / name;
    fs::create_directories(root);
    const std::string base = (root / name).string();

    std::ofstream a(base + "_A.txt");
    std::ofstream indicator(base + "_graph_indicator.txt");
    std::ofstream labels(base + "_graph_labels.txt");
    std::ofstream node_labels;
    if (with_node_labels) node_labels.open(base + "_node_labels.txt");
    if (!a || !indicator || !labels || (with_node_labels && !node_labels))
        throw IoError("write_tudataset: cannot create files under " + root.string());

    int offset = 0;
    for (size_t g = 0; g < graphs.size(); ++g) {
        const Graph& graph = graphs[g].graph;
        for (int i = 0; i < graph.num_nodes; ++i) {
            indicator << (g + 1) << "\n";
            if (with_node_labels) node_labels << graphs[g].node_labels[static_cast<size_t>(i)] << "\n";
        }
        for (const auto& [u, v] : graph.edges) {
            a << (u + 1 + offset) << ", " << (v + 1 + offset) << "\n";
            a << (v + 1 + offset) << ", " << (u + 1 + offset) << "\n";
        }
        labels << graph.label << "\n";
        offset += graph.num_nodes;
    }
}

void write_synth_benchmark(const std::string& dir, const std::string& which, uint64_t seed) {
    if (which == "MUTAG") {
        write_tudataset(dir, which, make_synth_mutag(seed), true);
    } else if (which == "PROTEINS") {
        write_tudataset(dir, which, make_synth_proteins(seed), true);
    } else {
        throw InvalidArgument("write_synth_benchmark: unknown benchmark '" + which + "'");
    }
}

}  // namespace topohk::datagen
