#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "synth_data.hpp"
#include "topohk/dataset.hpp"
#include "topohk/error.hpp"

using namespace topohk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("topohk-test-" + tag + "-" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

datagen::LabeledGraph make_labeled(int n, std::vector<std::pair<int, int>> edges, int label,
                                   std::vector<int> node_labels) {
    datagen::LabeledGraph lg;
    lg.graph.num_nodes = n;
    lg.graph.edges = std::move(edges);
    lg.graph.label = label;
    lg.node_labels = std::move(node_labels);
    return lg;
}

// In-memory bundle with attached features, for split/batch tests.
DatasetBundle attached_bundle(const std::vector<datagen::LabeledGraph>& graphs) {
    const auto dir = fresh_dir("mem");
    datagen::write_tudataset(dir.string(), "TINY", graphs, true);
    DatasetBundle bundle = parse_tudataset(dir.string(), "TINY");
    attach_hk_features(bundle, PiParams{}, PerturbConfig{0.05, 7}, FeatureConfig{10});
    return bundle;
}

}  // namespace

TEST_CASE("tudataset round-trip through write and parse") {
    const auto dir = fresh_dir("roundtrip");
    std::vector<datagen::LabeledGraph> graphs;
    graphs.push_back(make_labeled(3, {{0, 1}, {1, 2}}, 0, {0, 1, 0}));
    graphs.push_back(make_labeled(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 1, {1, 1, 2, 0}));
    datagen::write_tudataset(dir.string(), "TINY", graphs, true);

    const DatasetBundle bundle = parse_tudataset(dir.string(), "TINY");
    REQUIRE(bundle.graphs.size() == 2);
    CHECK(bundle.num_classes == 2);
    CHECK(bundle.graphs[0].num_nodes == 3);
    auto sorted = [](std::vector<std::pair<int, int>> e) {
        std::sort(e.begin(), e.end());
        return e;
    };
    CHECK(bundle.graphs[0].edges == sorted(graphs[0].graph.edges));
    CHECK(bundle.graphs[1].edges == sorted(graphs[1].graph.edges));
    CHECK(bundle.graphs[0].label == 0);
    CHECK(bundle.graphs[1].label == 1);
    // node labels one-hot over 3 kinds
    CHECK(bundle.feature_dim == 3);
    REQUIRE(bundle.graphs[0].node_features.has_value());
    CHECK((*bundle.graphs[0].node_features)[0] == 1.0);  // node 0 kind 0
    CHECK((*bundle.graphs[0].node_features)[3 + 1] == 1.0);  // node 1 kind 1
}

TEST_CASE("tudataset parse failures") {
    SUBCASE("missing mandatory file names it") {
        const auto dir = fresh_dir("missing");
        fs::create_directories(dir / "GONE");
        CHECK_THROWS_WITH_AS(parse_tudataset(dir.string(), "GONE"),
                             doctest::Contains("GONE_graph_indicator.txt"), IoError);
    }
    SUBCASE("edge referencing unknown node carries the line number") {
        const auto dir = fresh_dir("badedge");
        std::vector<datagen::LabeledGraph> graphs{make_labeled(2, {{0, 1}}, 0, {0, 0})};
        datagen::write_tudataset(dir.string(), "BAD", graphs, false);
        std::ofstream a(dir / "BAD" / "BAD_A.txt", std::ios::app);
        a << "1, 99\n";
        a.close();
        CHECK_THROWS_WITH_AS(parse_tudataset(dir.string(), "BAD"), doctest::Contains("BAD_A.txt:3"),
                             FormatError);
    }
    SUBCASE("non-integer token is a format error") {
        const auto dir = fresh_dir("badtok");
        std::vector<datagen::LabeledGraph> graphs{make_labeled(2, {{0, 1}}, 0, {0, 0})};
        datagen::write_tudataset(dir.string(), "BAD", graphs, false);
        std::ofstream lab(dir / "BAD" / "BAD_graph_labels.txt");
        lab << "0.75\n";
        lab.close();
        CHECK_THROWS_AS(parse_tudataset(dir.string(), "BAD"), FormatError);
    }
    SUBCASE("edge across graphs is a format error") {
        const auto dir = fresh_dir("crossedge");
        std::vector<datagen::LabeledGraph> graphs{make_labeled(2, {{0, 1}}, 0, {0, 0}),
                                                  make_labeled(2, {{0, 1}}, 1, {0, 0})};
        datagen::write_tudataset(dir.string(), "BAD", graphs, false);
        std::ofstream a(dir / "BAD" / "BAD_A.txt", std::ios::app);
        a << "1, 3\n";
        a.close();
        CHECK_THROWS_WITH_AS(parse_tudataset(dir.string(), "BAD"),
                             doctest::Contains("different graphs"), FormatError);
    }
}

TEST_CASE("stratified_split") {
    SUBCASE("exact arithmetic on balanced classes") {
        std::vector<datagen::LabeledGraph> graphs;
        for (int i = 0; i < 10; ++i)
            graphs.push_back(make_labeled(2, {{0, 1}}, i < 5 ? 0 : 1, {0, 0}));
        const auto bundle = attached_bundle(graphs);
        const auto [train, test] = stratified_split(bundle, 0.8, 42);
        CHECK(train.size() == 8);
        CHECK(test.size() == 2);
        int test_class0 = 0, test_class1 = 0;
        for (int idx : test)
            (bundle.graphs[static_cast<size_t>(idx)].label == 0 ? test_class0 : test_class1)++;
        CHECK(test_class0 == 1);
        CHECK(test_class1 == 1);
    }
    SUBCASE("125/63 class counts give a train size of 150") {
        // Per-class rounding: 0.8*125 = 100, 0.8*63 = 50.4 -> 50.
        std::vector<datagen::LabeledGraph> graphs;
        for (int i = 0; i < 188; ++i)
            graphs.push_back(make_labeled(2, {{0, 1}}, i < 125 ? 0 : 1, {0, 0}));
        const auto bundle = attached_bundle(graphs);
        const auto [train, test] = stratified_split(bundle, 0.8, 1);
        CHECK(std::abs(static_cast<int>(train.size()) - 150) <= 1);
        CHECK(train.size() + test.size() == 188);
    }
    SUBCASE("deterministic, disjoint, exhaustive") {
        std::vector<datagen::LabeledGraph> graphs;
        for (int i = 0; i < 30; ++i)
            graphs.push_back(make_labeled(3, {{0, 1}, {1, 2}}, i % 3, {0, 1, 0}));
        const auto bundle = attached_bundle(graphs);
        const auto [train1, test1] = stratified_split(bundle, 0.8, 5);
        const auto [train2, test2] = stratified_split(bundle, 0.8, 5);
        CHECK(train1 == train2);
        CHECK(test1 == test2);
        std::vector<char> seen(30, 0);
        for (int i : train1) seen[static_cast<size_t>(i)]++;
        for (int i : test1) seen[static_cast<size_t>(i)]++;
        for (char c : seen) CHECK(c == 1);
    }
    SUBCASE("class with one member fails") {
        std::vector<datagen::LabeledGraph> graphs;
        graphs.push_back(make_labeled(2, {{0, 1}}, 0, {0, 0}));
        graphs.push_back(make_labeled(2, {{0, 1}}, 0, {0, 0}));
        graphs.push_back(make_labeled(2, {{0, 1}}, 1, {0, 0}));
        const auto bundle = attached_bundle(graphs);
        CHECK_THROWS_AS(stratified_split(bundle, 0.8, 1), StateError);
    }
}

TEST_CASE("batch_graphs") {
    std::vector<datagen::LabeledGraph> graphs;
    graphs.push_back(make_labeled(3, {{0, 1}, {1, 2}}, 0, {0, 1, 2}));
    graphs.push_back(make_labeled(2, {{0, 1}}, 1, {1, 0}));
    const auto bundle = attached_bundle(graphs);

    SUBCASE("single graph pools to slot zero") {
        const Batch b = batch_graphs(bundle, {0});
        CHECK(b.batch_vector == std::vector<int>{0, 0, 0});
        CHECK(b.num_graphs() == 1);
    }
    SUBCASE("two graphs offset correctly") {
        const Batch b = batch_graphs(bundle, {0, 1});
        CHECK(b.batch_vector == std::vector<int>{0, 0, 0, 1, 1});
        // second graph's single edge lands at offset 3 (both orientations)
        bool found = false;
        for (const auto& [u, v] : b.edge_index)
            if (u == 3 && v == 4) found = true;
        CHECK(found);
        CHECK(b.labels == std::vector<int>{0, 1});
    }
    SUBCASE("batch pooling equals per-graph pooling") {
        const Batch whole = batch_graphs(bundle, {0, 1});
        const Tensor pooled =
            scatter_add_pool(whole.node_features, whole.batch_vector, whole.num_graphs());
        for (int g = 0; g < 2; ++g) {
            const Batch alone = batch_graphs(bundle, {g});
            const Tensor single =
                scatter_add_pool(alone.node_features, alone.batch_vector, 1);
            for (int j = 0; j < pooled.dim(1); ++j)
                CHECK(pooled.data()[static_cast<size_t>(g) * pooled.dim(1) + j] ==
                      single.data()[static_cast<size_t>(j)]);
        }
    }
    SUBCASE("missing topo features is a state error") {
        DatasetBundle bare = bundle;
        bare.topo.clear();
        CHECK_THROWS_AS(batch_graphs(bare, {0}), StateError);
    }
}

TEST_CASE("attach_hk_features") {
    SUBCASE("native features are preserved, topo appended") {
        std::vector<datagen::LabeledGraph> graphs;
        graphs.push_back(make_labeled(3, {{0, 1}, {1, 2}}, 0, {0, 1, 0}));
        graphs.push_back(make_labeled(3, {{0, 1}, {1, 2}}, 1, {1, 1, 1}));
        const auto dir = fresh_dir("native");
        datagen::write_tudataset(dir.string(), "NAT", graphs, true);
        DatasetBundle bundle = parse_tudataset(dir.string(), "NAT");
        const auto before = *bundle.graphs[0].node_features;
        attach_hk_features(bundle, PiParams{}, {0.05, 3}, FeatureConfig{10});
        CHECK(*bundle.graphs[0].node_features == before);
        CHECK(bundle.topo_dim == 200);
        CHECK(bundle.features_attached());
    }
    SUBCASE("degree fallback when node labels are absent") {
        std::vector<datagen::LabeledGraph> graphs;
        graphs.push_back(make_labeled(3, {{0, 1}, {0, 2}}, 0, {}));
        graphs.push_back(make_labeled(2, {{0, 1}}, 1, {}));
        const auto dir = fresh_dir("fallback");
        datagen::write_tudataset(dir.string(), "DEG", graphs, false);
        DatasetBundle bundle = parse_tudataset(dir.string(), "DEG");
        CHECK(bundle.feature_dim == 0);
        attach_hk_features(bundle, PiParams{}, {0.05, 3}, FeatureConfig{4});
        CHECK(bundle.feature_dim == 5);
        // node 0 of graph 0 has degree 2
        CHECK((*bundle.graphs[0].node_features)[2] == 1.0);
    }
    SUBCASE("p = 0 makes topo_pert equal topo") {
        std::vector<datagen::LabeledGraph> graphs;
        graphs.push_back(make_labeled(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 0, {0, 0, 0, 0}));
        const auto dir = fresh_dir("p0");
        datagen::write_tudataset(dir.string(), "PZ", graphs, true);
        DatasetBundle bundle = parse_tudataset(dir.string(), "PZ");
        attach_hk_features(bundle, PiParams{}, {0.0, 3}, FeatureConfig{10});
        CHECK(bundle.topo[0].values == bundle.topo_pert[0].values);
    }
    SUBCASE("4-cycle carries mass in both halves") {
        std::vector<datagen::LabeledGraph> graphs;
        graphs.push_back(make_labeled(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 0, {0, 0, 0, 0}));
        const auto dir = fresh_dir("cyc");
        datagen::write_tudataset(dir.string(), "CYC", graphs, true);
        DatasetBundle bundle = parse_tudataset(dir.string(), "CYC");
        attach_hk_features(bundle, PiParams{}, {0.0, 3}, FeatureConfig{10});
        double h0 = 0.0, h1 = 0.0;
        for (int i = 0; i < 100; ++i) h0 += bundle.topo[0].values[static_cast<size_t>(i)];
        for (int i = 100; i < 200; ++i) h1 += bundle.topo[0].values[static_cast<size_t>(i)];
        CHECK(h0 > 0.0);
        CHECK(h1 > 0.0);
    }
    SUBCASE("idempotent under the same seed, and thread-count independent") {
        const auto graphs = datagen::make_synth_mutag(3);
        std::vector<datagen::LabeledGraph> subset(graphs.begin(), graphs.begin() + 24);
        const auto dir = fresh_dir("idem");
        datagen::write_tudataset(dir.string(), "IDEM", subset, true);
        DatasetBundle bundle = parse_tudataset(dir.string(), "IDEM");
        attach_hk_features(bundle, PiParams{}, {0.1, 9}, FeatureConfig{10}, 1);
        const auto topo_first = bundle.topo;
        const auto pert_first = bundle.topo_pert;
        attach_hk_features(bundle, PiParams{}, {0.1, 9}, FeatureConfig{10}, 4);
        for (size_t i = 0; i < bundle.topo.size(); ++i) {
            CHECK(bundle.topo[i].values == topo_first[i].values);
            CHECK(bundle.topo_pert[i].values == pert_first[i].values);
        }
    }
}

TEST_CASE("feature cache round-trip") {
    const auto graphs = datagen::make_synth_mutag(5);
    std::vector<datagen::LabeledGraph> subset(graphs.begin(), graphs.begin() + 12);
    const auto dir = fresh_dir("cache");
    datagen::write_tudataset(dir.string(), "CCH", subset, true);
    DatasetBundle bundle = parse_tudataset(dir.string(), "CCH");
    const PiParams pi{};
    const PerturbConfig perturb{0.05, 42};
    const FeatureConfig feat{10};
    attach_hk_features(bundle, pi, perturb, feat);
    const auto cache = (dir / "cch.thkfeat").string();
    write_feature_cache(bundle, pi, perturb, feat, cache);

    SUBCASE("load restores identical vectors") {
        DatasetBundle fresh = parse_tudataset(dir.string(), "CCH");
        load_feature_cache(fresh, pi, perturb, feat, cache);
        REQUIRE(fresh.features_attached());
        for (size_t i = 0; i < bundle.topo.size(); ++i) {
            CHECK(fresh.topo[i].values == bundle.topo[i].values);
            CHECK(fresh.topo_pert[i].values == bundle.topo_pert[i].values);
        }
    }
    SUBCASE("rewriting produces identical bytes") {
        const auto cache2 = (dir / "cch2.thkfeat").string();
        write_feature_cache(bundle, pi, perturb, feat, cache2);
        std::ifstream a(cache, std::ios::binary), b(cache2, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
    SUBCASE("parameter mismatch is rejected") {
        DatasetBundle fresh = parse_tudataset(dir.string(), "CCH");
        CHECK_THROWS_AS(load_feature_cache(fresh, pi, PerturbConfig{0.2, 42}, feat, cache),
                        FormatError);
    }
}
