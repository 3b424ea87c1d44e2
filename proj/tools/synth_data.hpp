#pragma once

// Deterministic synthetic benchmark generators in TUDataset text format.
// These provide desk-scale stand-ins (matching graph/class counts of the
// MUTAG and PROTEINS benchmarks) for development and CI in environments
// where the real archives are not available; real data produced by
// tools/fetch_tudataset.py takes the same on-disk shape.

#include <cstdint>
#include <string>
#include <vector>

#include "topohk/graph.hpp"

namespace topohk::datagen {

struct LabeledGraph {
    Graph graph;
    std::vector<int> node_labels;
};

// 188 graphs, classes 125/63 (label 0: acyclic molecules, label 1: ring
// systems), ~18 nodes on average, 7 node-label kinds.
std::vector<LabeledGraph> make_synth_mutag(uint64_t seed);

// 1113 graphs, classes 663/450 (label 0: sparse near-tree, label 1:
// cycle-rich), ~39 nodes on average, 3 node-label kinds.
std::vector<LabeledGraph> make_synth_proteins(uint64_t seed);

// Writes <dir>/<name>/<name>_A.txt, _graph_indicator.txt, _graph_labels.txt
// and (when node labels are present) _node_labels.txt.
void write_tudataset(const std::string& dir, const std::string& name,
                     const std::vector<LabeledGraph>& graphs, bool with_node_labels);

// Convenience: generate-and-write one of the named stand-ins.
void write_synth_benchmark(const std::string& dir, const std::string& which, uint64_t seed);

}  // namespace topohk::datagen
