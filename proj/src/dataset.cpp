#include "topohk/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "topohk/error.hpp"

namespace topohk {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing or unreadable file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

// Comma/whitespace tolerant integer tokenizer; complains with file:line.
std::vector<long> parse_ints(const std::string& line, const std::string& path, size_t lineno) {
    std::vector<long> out;
    const char* p = line.c_str();
    while (*p) {
        while (*p == ' ' || *p == '\t' || *p == ',') ++p;
        if (!*p) break;
        char* end = nullptr;
        const long v = std::strtol(p, &end, 10);
        if (end == p || (*end && *end != ' ' && *end != '\t' && *end != ','))
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected integer, got '" +
                              std::string(p) + "'");
        out.push_back(v);
        p = end;
    }
    return out;
}

long parse_single_int(const std::string& line, const std::string& path, size_t lineno) {
    const auto vals = parse_ints(line, path, lineno);
    if (vals.size() != 1)
        throw FormatError(path + ":" + std::to_string(lineno) + ": expected one integer");
    return vals[0];
}

bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("feature cache truncated: " + path);
    return v;
}

}  // namespace

DatasetBundle parse_tudataset(const std::string& dir, const std::string& name) {
    const std::string base = dir + "/" + name + "/" + name;
    const std::string a_path = base + "_A.txt";
    const std::string ind_path = base + "_graph_indicator.txt";
    const std::string lab_path = base + "_graph_labels.txt";
    const std::string node_lab_path = base + "_node_labels.txt";

    const auto indicator = read_lines(ind_path);
    const size_t num_nodes_total = indicator.size();

    // graph id (0-based) per global node, and local index per global node
    std::vector<int> node_graph(num_nodes_total);
    std::vector<int> node_local(num_nodes_total);
    int num_graphs = 0;
    for (size_t k = 0; k < num_nodes_total; ++k) {
        const long gid = parse_single_int(indicator[k], ind_path, k + 1);
        if (gid < 1)
            throw FormatError(ind_path + ":" + std::to_string(k + 1) + ": graph id must be >= 1");
        num_graphs = std::max(num_graphs, static_cast<int>(gid));
        node_graph[k] = static_cast<int>(gid) - 1;
    }
    std::vector<int> node_count(static_cast<size_t>(num_graphs), 0);
    for (size_t k = 0; k < num_nodes_total; ++k)
        node_local[k] = node_count[static_cast<size_t>(node_graph[k])]++;

    DatasetBundle bundle;
    bundle.name = name;
    bundle.graphs.resize(static_cast<size_t>(num_graphs));
    for (int g = 0; g < num_graphs; ++g)
        bundle.graphs[static_cast<size_t>(g)].num_nodes = node_count[static_cast<size_t>(g)];

    // Edges: 1-based global node pairs, both directions present; dedupe to
    // canonical undirected pairs, drop self-loops.
    std::vector<std::set<std::pair<int, int>>> edge_sets(static_cast<size_t>(num_graphs));
    const auto edge_lines = read_lines(a_path);
    for (size_t k = 0; k < edge_lines.size(); ++k) {
        if (edge_lines[k].empty()) continue;
        const auto vals = parse_ints(edge_lines[k], a_path, k + 1);
        if (vals.size() != 2)
            throw FormatError(a_path + ":" + std::to_string(k + 1) + ": expected two integers");
        const long gi = vals[0], gj = vals[1];
        if (gi < 1 || gi > static_cast<long>(num_nodes_total) || gj < 1 ||
            gj > static_cast<long>(num_nodes_total))
            throw FormatError(a_path + ":" + std::to_string(k + 1) + ": edge references unknown node " +
                              std::to_string(gi > static_cast<long>(num_nodes_total) || gi < 1 ? gi : gj));
        const size_t ni = static_cast<size_t>(gi) - 1, nj = static_cast<size_t>(gj) - 1;
        if (node_graph[ni] != node_graph[nj])
            throw FormatError(a_path + ":" + std::to_string(k + 1) +
                              ": edge endpoints belong to different graphs");
        if (ni == nj) continue;
        const int u = std::min(node_local[ni], node_local[nj]);
        const int v = std::max(node_local[ni], node_local[nj]);
        edge_sets[static_cast<size_t>(node_graph[ni])].insert({u, v});
    }
    for (int g = 0; g < num_graphs; ++g)
        bundle.graphs[static_cast<size_t>(g)].edges.assign(edge_sets[static_cast<size_t>(g)].begin(),
                                                           edge_sets[static_cast<size_t>(g)].end());

    // Graph labels, remapped to contiguous 0-based classes.
    const auto label_lines = read_lines(lab_path);
    if (label_lines.size() < static_cast<size_t>(num_graphs))
        throw FormatError(lab_path + ": has " + std::to_string(label_lines.size()) +
                          " labels for " + std::to_string(num_graphs) + " graphs");
    std::vector<long> raw_labels(static_cast<size_t>(num_graphs));
    std::set<long> distinct;
    for (int g = 0; g < num_graphs; ++g) {
        raw_labels[static_cast<size_t>(g)] =
            parse_single_int(label_lines[static_cast<size_t>(g)], lab_path, static_cast<size_t>(g) + 1);
        distinct.insert(raw_labels[static_cast<size_t>(g)]);
    }
    std::map<long, int> label_map;
    for (long v : distinct) label_map.emplace(v, static_cast<int>(label_map.size()));
    for (int g = 0; g < num_graphs; ++g)
        bundle.graphs[static_cast<size_t>(g)].label = label_map.at(raw_labels[static_cast<size_t>(g)]);
    bundle.num_classes = static_cast<int>(label_map.size());

    // Optional node labels become one-hot features.
    if (file_exists(node_lab_path)) {
        const auto node_lines = read_lines(node_lab_path);
        if (node_lines.size() < num_nodes_total)
            throw FormatError(node_lab_path + ": has " + std::to_string(node_lines.size()) +
                              " labels for " + std::to_string(num_nodes_total) + " nodes");
        std::vector<long> raw(num_nodes_total);
        std::set<long> kinds;
        for (size_t k = 0; k < num_nodes_total; ++k) {
            raw[k] = parse_single_int(node_lines[k], node_lab_path, k + 1);
            kinds.insert(raw[k]);
        }
        std::map<long, int> kind_map;
        for (long v : kinds) kind_map.emplace(v, static_cast<int>(kind_map.size()));
        const int dim = static_cast<int>(kind_map.size());
        for (auto& g : bundle.graphs) {
            g.feature_dim = dim;
            g.node_features = std::vector<double>(static_cast<size_t>(g.num_nodes) * dim, 0.0);
        }
        for (size_t k = 0; k < num_nodes_total; ++k) {
            Graph& g = bundle.graphs[static_cast<size_t>(node_graph[k])];
            (*g.node_features)[static_cast<size_t>(node_local[k]) * dim + kind_map.at(raw[k])] = 1.0;
        }
        bundle.feature_dim = dim;
    }
    return bundle;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(const DatasetBundle& bundle,
                                                               double train_frac, uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw InvalidArgument("stratified_split: train_frac must be in (0, 1)");
    std::map<int, std::vector<int>> by_class;
    for (size_t i = 0; i < bundle.graphs.size(); ++i)
        by_class[bundle.graphs[i].label].push_back(static_cast<int>(i));

    std::vector<int> train, test;
    Rng rng(seed);
    for (auto& [label, members] : by_class) {
        if (members.size() < 2)
            throw StateError("stratified_split: class " + std::to_string(label) +
                             " has fewer than 2 graphs");
        Rng class_rng = rng.fork(static_cast<uint64_t>(label) + 1);
        class_rng.shuffle(members);
        const auto n = static_cast<long>(members.size());
        long take = std::lround(train_frac * static_cast<double>(n));
        take = std::clamp(take, 1L, n - 1);
        train.insert(train.end(), members.begin(), members.begin() + take);
        test.insert(test.end(), members.begin() + take, members.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

namespace {

Batch assemble_batch(const DatasetBundle& bundle, const std::vector<int>& order,
                     const std::vector<std::vector<std::pair<int, int>>>* edge_override) {
    if (!bundle.features_attached())
        throw StateError("batch_graphs: topological features not attached");
    const int fdim = bundle.feature_dim;
    int total_nodes = 0;
    for (int idx : order) total_nodes += bundle.graphs[static_cast<size_t>(idx)].num_nodes;

    Batch batch;
    std::vector<double> feats(static_cast<size_t>(total_nodes) * fdim, 0.0);
    std::vector<double> topo, topo_pert;
    topo.reserve(order.size() * static_cast<size_t>(bundle.topo_dim));
    topo_pert.reserve(order.size() * static_cast<size_t>(bundle.topo_dim));
    batch.batch_vector.reserve(static_cast<size_t>(total_nodes));

    int offset = 0;
    for (size_t slot = 0; slot < order.size(); ++slot) {
        const int idx = order[slot];
        const Graph& g = bundle.graphs[static_cast<size_t>(idx)];
        if (!g.node_features)
            throw StateError("batch_graphs: graph " + std::to_string(idx) +
                             " has no node features");
        if (static_cast<int>(g.feature_dim) != fdim)
            throw ShapeError("batch_graphs: graph " + std::to_string(idx) + " feature dim " +
                             std::to_string(g.feature_dim) + " != bundle dim " +
                             std::to_string(fdim));
        std::copy(g.node_features->begin(), g.node_features->end(),
                  feats.begin() + static_cast<long>(offset) * fdim);
        for (int i = 0; i < g.num_nodes; ++i) batch.batch_vector.push_back(static_cast<int>(slot));
        const auto& edges = edge_override ? (*edge_override)[slot] : g.edges;
        for (const auto& [u, v] : edges) {
            batch.edge_index.emplace_back(u + offset, v + offset);
            batch.edge_index.emplace_back(v + offset, u + offset);
        }
        batch.labels.push_back(g.label);
        const auto& t = bundle.topo[static_cast<size_t>(idx)].values;
        const auto& tp = bundle.topo_pert[static_cast<size_t>(idx)].values;
        topo.insert(topo.end(), t.begin(), t.end());
        topo_pert.insert(topo_pert.end(), tp.begin(), tp.end());
        offset += g.num_nodes;
    }
    batch.node_features = Tensor::from_data({total_nodes, fdim}, std::move(feats));
    batch.topo =
        Tensor::from_data({static_cast<int>(order.size()), bundle.topo_dim}, std::move(topo));
    batch.topo_pert =
        Tensor::from_data({static_cast<int>(order.size()), bundle.topo_dim}, std::move(topo_pert));
    return batch;
}

}  // namespace

Batch batch_graphs(const DatasetBundle& bundle, const std::vector<int>& order) {
    return assemble_batch(bundle, order, nullptr);
}

Batch batch_graphs(const DatasetBundle& bundle, const std::vector<int>& order,
                   const std::vector<std::vector<std::pair<int, int>>>& edge_override) {
    if (edge_override.size() != order.size())
        throw InvalidArgument("batch_graphs: edge override size mismatch");
    return assemble_batch(bundle, order, &edge_override);
}

void attach_hk_features(DatasetBundle& bundle, const PiParams& pi, const PerturbConfig& perturb,
                        const FeatureConfig& features, int threads) {
    pi.validate();
    if (features.d_max < 1) throw InvalidArgument("attach_hk_features: d_max must be >= 1");
    const size_t n = bundle.graphs.size();

    // Degree fallback features for label-free datasets.
    if (bundle.feature_dim == 0) {
        const int dim = features.d_max + 1;
        for (auto& g : bundle.graphs) {
            const auto degs = node_degrees(g);
            std::vector<double> feats(static_cast<size_t>(g.num_nodes) * dim, 0.0);
            for (int i = 0; i < g.num_nodes; ++i) {
                const auto onehot = one_hot_degree(degs[static_cast<size_t>(i)], features.d_max);
                std::copy(onehot.begin(), onehot.end(), feats.begin() + static_cast<long>(i) * dim);
            }
            g.node_features = std::move(feats);
            g.feature_dim = dim;
        }
        bundle.feature_dim = dim;
    }

    bundle.topo_dim = pi.feature_dim();
    bundle.topo.assign(n, {});
    bundle.topo_pert.assign(n, {});

    const Rng base(perturb.seed);
    auto compute_one = [&](size_t i) {
        const Graph& g = bundle.graphs[i];
        const AdjacencyMatrix adj = g.adjacency();
        bundle.topo[i] = hk_feature_vector(floyd_warshall(adj), pi);
        PerturbConfig local{perturb.p, base.fork(static_cast<uint64_t>(i)).root_seed()};
        const AdjacencyMatrix noisy = perturb_edges(adj, local);
        bundle.topo_pert[i] = hk_feature_vector(floyd_warshall(noisy), pi);
    };

    const int nthreads = std::max(1, threads);
    if (nthreads == 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) compute_one(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> cursor{0};
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) compute_one(i);
        });
    }
    for (auto& th : pool) th.join();
}

namespace {
constexpr char kCacheMagic[8] = {'T', 'H', 'K', 'F', 'E', 'A', 'T', '1'};
}

void write_feature_cache(const DatasetBundle& bundle, const PiParams& pi,
                         const PerturbConfig& perturb, const FeatureConfig& features,
                         const std::string& path) {
    if (!bundle.features_attached())
        throw StateError("write_feature_cache: features not attached");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kCacheMagic, sizeof(kCacheMagic));
    write_pod(out, static_cast<uint32_t>(1));  // version
    write_pod(out, pi.r0);
    write_pod(out, pi.r1);
    write_pod(out, pi.sigma);
    write_pod(out, static_cast<int32_t>(pi.res));
    write_pod(out, perturb.p);
    write_pod(out, static_cast<uint64_t>(perturb.seed));
    write_pod(out, static_cast<int32_t>(features.d_max));
    write_pod(out, static_cast<uint32_t>(bundle.graphs.size()));
    write_pod(out, static_cast<uint32_t>(bundle.topo_dim));
    for (uint32_t i = 0; i < bundle.graphs.size(); ++i) {
        write_pod(out, i);
        const auto& t = bundle.topo[i].values;
        const auto& tp = bundle.topo_pert[i].values;
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<long>(t.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(tp.data()),
                  static_cast<long>(tp.size() * sizeof(double)));
    }
    if (!out) throw IoError("write failed: " + path);
}

void load_feature_cache(DatasetBundle& bundle, const PiParams& pi, const PerturbConfig& perturb,
                        const FeatureConfig& features, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("missing or unreadable file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
        throw FormatError("not a feature cache: " + path);
    if (read_pod<uint32_t>(in, path) != 1)
        throw FormatError("unsupported feature cache version: " + path);
    const double r0 = read_pod<double>(in, path);
    const double r1 = read_pod<double>(in, path);
    const double sigma = read_pod<double>(in, path);
    const int32_t res = read_pod<int32_t>(in, path);
    const double p = read_pod<double>(in, path);
    const uint64_t seed = read_pod<uint64_t>(in, path);
    const int32_t d_max = read_pod<int32_t>(in, path);
    if (r0 != pi.r0 || r1 != pi.r1 || sigma != pi.sigma || res != pi.res || p != perturb.p ||
        seed != perturb.seed || d_max != features.d_max)
        throw FormatError("feature cache parameters disagree with the requested configuration: " +
                          path);
    const uint32_t n = read_pod<uint32_t>(in, path);
    const uint32_t dim = read_pod<uint32_t>(in, path);
    if (n != bundle.graphs.size())
        throw FormatError("feature cache holds " + std::to_string(n) + " graphs, dataset has " +
                          std::to_string(bundle.graphs.size()));
    if (dim != static_cast<uint32_t>(pi.feature_dim()))
        throw FormatError("feature cache dimension mismatch: " + path);

    // Degree fallback features still need computing; the cache only covers
    // the topological vectors.
    if (bundle.feature_dim == 0) {
        const int fdim = features.d_max + 1;
        for (auto& g : bundle.graphs) {
            const auto degs = node_degrees(g);
            std::vector<double> feats(static_cast<size_t>(g.num_nodes) * fdim, 0.0);
            for (int i = 0; i < g.num_nodes; ++i) {
                const auto onehot = one_hot_degree(degs[static_cast<size_t>(i)], features.d_max);
                std::copy(onehot.begin(), onehot.end(), feats.begin() + static_cast<long>(i) * fdim);
            }
            g.node_features = std::move(feats);
            g.feature_dim = fdim;
        }
        bundle.feature_dim = fdim;
    }

    bundle.topo_dim = static_cast<int>(dim);
    bundle.topo.assign(n, {});
    bundle.topo_pert.assign(n, {});
    for (uint32_t i = 0; i < n; ++i) {
        const uint32_t gid = read_pod<uint32_t>(in, path);
        if (gid >= n) throw FormatError("feature cache row id out of range: " + path);
        auto& t = bundle.topo[gid].values;
        auto& tp = bundle.topo_pert[gid].values;
        t.resize(dim);
        tp.resize(dim);
        in.read(reinterpret_cast<char*>(t.data()), static_cast<long>(dim * sizeof(double)));
        in.read(reinterpret_cast<char*>(tp.data()), static_cast<long>(dim * sizeof(double)));
        if (!in) throw FormatError("feature cache truncated: " + path);
    }
}

}  // namespace topohk
