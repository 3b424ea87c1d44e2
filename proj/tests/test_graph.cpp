#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "topohk/error.hpp"
#include "topohk/graph.hpp"

using namespace topohk;

namespace {

AdjacencyMatrix from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    AdjacencyMatrix adj = AdjacencyMatrix::zeros(n);
    for (const auto& [u, v] : edges) adj.set(u, v, 1);
    return adj;
}

}  // namespace

TEST_CASE("floyd_warshall on trivial graphs") {
    SUBCASE("single vertex") {
        const auto d = floyd_warshall(AdjacencyMatrix::zeros(1));
        CHECK(d.n == 1);
        CHECK(d.at(0, 0) == 0.0);
    }
    SUBCASE("empty graph") {
        const auto d = floyd_warshall(AdjacencyMatrix::zeros(0));
        CHECK(d.n == 0);
        CHECK(d.d.empty());
    }
    SUBCASE("path 0-1-2") {
        const auto d = floyd_warshall(from_edges(3, {{0, 1}, {1, 2}}));
        CHECK(d.at(0, 1) == 1.0);
        CHECK(d.at(0, 2) == 2.0);
        CHECK(d.at(1, 2) == 1.0);
    }
    SUBCASE("disconnected pair is unreachable") {
        const auto d = floyd_warshall(AdjacencyMatrix::zeros(2));
        CHECK(is_unreachable(d.at(0, 1)));
        CHECK(d.at(0, 0) == 0.0);
    }
}

TEST_CASE("floyd_warshall matches repeated BFS on random graphs") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(8));
        const auto adj = oracle::random_adjacency(n, rng.uniform(0.1, 0.7), rng);
        const auto fast = floyd_warshall(adj);
        const auto ref = oracle::bfs_all_pairs(adj);
        REQUIRE(fast.d == ref.d);
    }
}

TEST_CASE("floyd_warshall distances are symmetric nonnegative integers") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(11));
        const auto adj = oracle::random_adjacency(n, 0.3, rng);
        const auto d = floyd_warshall(adj);
        for (int i = 0; i < n; ++i) {
            CHECK(d.at(i, i) == 0.0);
            for (int j = 0; j < n; ++j) {
                CHECK(d.at(i, j) == d.at(j, i));
                if (!is_unreachable(d.at(i, j))) {
                    CHECK(d.at(i, j) >= 0.0);
                    CHECK(d.at(i, j) == std::floor(d.at(i, j)));
                }
            }
        }
    }
}

TEST_CASE("node_degrees") {
    Graph g;
    g.num_nodes = 5;
    SUBCASE("no edges") { CHECK(node_degrees(g) == std::vector<int>{0, 0, 0, 0, 0}); }
    SUBCASE("star on 5 nodes") {
        g.edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
        CHECK(node_degrees(g) == std::vector<int>{4, 1, 1, 1, 1});
    }
    SUBCASE("triangle") {
        g.num_nodes = 3;
        g.edges = {{0, 1}, {0, 2}, {1, 2}};
        CHECK(node_degrees(g) == std::vector<int>{2, 2, 2});
    }
}

TEST_CASE("one_hot_degree") {
    CHECK(one_hot_degree(0, 3) == std::vector<double>{1, 0, 0, 0});
    CHECK(one_hot_degree(2, 3) == std::vector<double>{0, 0, 1, 0});
    CHECK(one_hot_degree(9, 3) == std::vector<double>{0, 0, 0, 1});
}

TEST_CASE("perturb_edges basics") {
    SUBCASE("p = 0 is the identity") {
        Rng rng(3);
        const auto adj = oracle::random_adjacency(6, 0.4, rng);
        const auto out = perturb_edges(adj, {0.0, 99});
        CHECK(out.a == adj.a);
    }
    SUBCASE("p = 1 on empty 3-node graph gives K3") {
        const auto out = perturb_edges(AdjacencyMatrix::zeros(3), {1.0, 5});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(out.at(i, j) == (i == j ? 0 : 1));
    }
    SUBCASE("deterministic given seed") {
        Rng rng(4);
        const auto adj = oracle::random_adjacency(10, 0.3, rng);
        const auto a = perturb_edges(adj, {0.3, 1234});
        const auto b = perturb_edges(adj, {0.3, 1234});
        CHECK(a.a == b.a);
    }
}

TEST_CASE("perturb_edges flip frequency approximately p") {
    // Monte-Carlo on a single entry; binomial sd of the mean at p=0.5,
    // n=10000 is 0.005, so +-0.02 is a 4-sigma band.
    int flips = 0;
    const auto adj = AdjacencyMatrix::zeros(2);
    for (int t = 0; t < 10000; ++t) {
        const auto out = perturb_edges(adj, {0.5, static_cast<uint64_t>(t)});
        if (out.at(0, 1)) ++flips;
    }
    CHECK(std::abs(flips / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("perturb_edges output is symmetric with zero diagonal") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(12));
        const auto adj = oracle::random_adjacency(n, rng.uniform(0.0, 1.0), rng);
        const auto out = perturb_edges(adj, {rng.uniform(0.0, 1.0), rng.next_u64()});
        for (int i = 0; i < n; ++i) {
            CHECK(out.at(i, i) == 0);
            for (int j = 0; j < n; ++j) CHECK(out.at(i, j) == out.at(j, i));
        }
    }
}

TEST_CASE("drop_edges") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 10000; ++i) edges.emplace_back(i, i + 1);

    SUBCASE("p = 0 keeps everything") { CHECK(drop_edges(edges, 0.0, 1) == edges); }
    SUBCASE("p = 1 drops everything") { CHECK(drop_edges(edges, 1.0, 1).empty()); }
    SUBCASE("retention is binomial") {
        const auto kept = drop_edges(edges, 0.1, 42);
        CHECK(std::abs(static_cast<double>(kept.size()) - 9000.0) < 150.0);
    }
    SUBCASE("deterministic given seed") {
        CHECK(drop_edges(edges, 0.25, 9) == drop_edges(edges, 0.25, 9));
    }
    SUBCASE("rejects bad p") { CHECK_THROWS_AS(drop_edges(edges, 1.5, 0), InvalidArgument); }
}
