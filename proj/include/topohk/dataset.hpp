#pragma once

#include <string>
#include <utility>
#include <vector>

#include "topohk/graph.hpp"
#include "topohk/persistence_image.hpp"
#include "topohk/tensor.hpp"

namespace topohk {

// Degree-fallback feature settings for datasets without node labels.
struct FeatureConfig {
    int d_max = 10;  // degrees clip into the last one-hot bucket
};

// A parsed benchmark: graphs plus (after attach_hk_features) the per-graph
// original and perturbed topological feature vectors.
struct DatasetBundle {
    std::string name;
    std::vector<Graph> graphs;
    int num_classes = 0;
    int feature_dim = 0;
    int topo_dim = 0;
    std::vector<TopoFeature> topo;
    std::vector<TopoFeature> topo_pert;

    bool features_attached() const {
        return !graphs.empty() && topo.size() == graphs.size() &&
               topo_pert.size() == graphs.size();
    }
};

// Mini-batch as a disjoint union of graphs.
struct Batch {
    Tensor node_features;                         // (N, F)
    std::vector<std::pair<int, int>> edge_index;  // directed, both orientations
    std::vector<int> batch_vector;                // node -> graph slot, nondecreasing
    std::vector<int> labels;                      // per graph
    Tensor topo;                                  // (B, D)
    Tensor topo_pert;                             // (B, D)

    int num_graphs() const { return static_cast<int>(labels.size()); }
};

// Parse the TUDataset text format from dir: NAME_A.txt,
// NAME_graph_indicator.txt, NAME_graph_labels.txt and optionally
// NAME_node_labels.txt. File indices are 1-based; everything is converted
// to 0-based here and nowhere else. Graph labels are remapped to
// contiguous 0-based classes; node labels become one-hot features.
DatasetBundle parse_tudataset(const std::string& dir, const std::string& name);

// Per-class shuffled 80/20-style split; deterministic given seed. Every
// class must have at least 2 graphs. Returns (train, test) index lists.
std::pair<std::vector<int>, std::vector<int>> stratified_split(const DatasetBundle& bundle,
                                                               double train_frac, uint64_t seed);

// Disjoint-union batch of bundle.graphs[order...]. Requires node features
// and topological features to be attached.
Batch batch_graphs(const DatasetBundle& bundle, const std::vector<int>& order);

// Same, with the edge list of each selected graph replaced (used by the
// noisy-evaluation edge-drop path).
Batch batch_graphs(const DatasetBundle& bundle, const std::vector<int>& order,
                   const std::vector<std::vector<std::pair<int, int>>>& edge_override);

// For every graph: attach degree one-hot node features when none are
// present, then compute topo = PI(dist(A)) and topo_pert =
// PI(dist(perturb(A))). The perturbation is drawn once per graph from a
// stream forked off (perturb.seed, graph index), so the result is
// independent of thread count and reruns overwrite with identical values.
void attach_hk_features(DatasetBundle& bundle, const PiParams& pi, const PerturbConfig& perturb,
                        const FeatureConfig& features, int threads = 1);

// Binary feature cache (format v1, little-endian; see README): parameter
// header followed by per-graph topo/topo_pert rows.
void write_feature_cache(const DatasetBundle& bundle, const PiParams& pi,
                         const PerturbConfig& perturb, const FeatureConfig& features,
                         const std::string& path);

// Loads a cache written with the same parameters; throws FormatError when
// the header disagrees with the requested configuration or the bundle.
void load_feature_cache(DatasetBundle& bundle, const PiParams& pi, const PerturbConfig& perturb,
                        const FeatureConfig& features, const std::string& path);

}  // namespace topohk
