#include <doctest.h>

#include <cmath>
#include <tuple>

#include "oracles.hpp"
#include "topohk/error.hpp"
#include "topohk/persistence.hpp"

using namespace topohk;

namespace {

AdjacencyMatrix from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    AdjacencyMatrix adj = AdjacencyMatrix::zeros(n);
    for (const auto& [u, v] : edges) adj.set(u, v, 1);
    return adj;
}

DistanceMatrix graph_metric(int n, const std::vector<std::pair<int, int>>& edges) {
    return floyd_warshall(from_edges(n, edges));
}

double full_scale(const DistanceMatrix& d) {
    double mx = 1.0;
    for (double v : d.d)
        if (!is_unreachable(v)) mx = std::max(mx, v);
    return mx + 1.0;
}

}  // namespace

TEST_CASE("build_rips structure") {
    SUBCASE("two isolated points give two vertices only") {
        const auto complex = build_rips(graph_metric(2, {}), 1.2);
        REQUIRE(complex.size() == 2);
        CHECK(complex[0].dim == 0);
        CHECK(complex[1].dim == 0);
    }
    SUBCASE("triangle graph at scale 1.2") {
        const auto complex = build_rips(graph_metric(3, {{0, 1}, {0, 2}, {1, 2}}), 1.2);
        REQUIRE(complex.size() == 7);  // 3 vertices, 3 edges, 1 triangle
        CHECK(complex[6].dim == 2);
        CHECK(complex[6].filtration_value == 1.0);
        for (int i = 3; i < 6; ++i) CHECK(complex[static_cast<size_t>(i)].filtration_value == 1.0);
    }
    SUBCASE("4-cycle at scale 1.2 has no triangles") {
        const auto complex = build_rips(graph_metric(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}), 1.2);
        REQUIRE(complex.size() == 8);  // 4 vertices + 4 edges
        for (const auto& s : complex) CHECK(s.dim <= 1);
    }
    SUBCASE("sorted by (filtration, dim, vertices)") {
        Rng rng(5);
        const auto adj = oracle::random_adjacency(9, 0.4, rng);
        const auto complex = build_rips(floyd_warshall(adj), 3.0);
        for (size_t i = 1; i < complex.size(); ++i) {
            const auto& a = complex[i - 1];
            const auto& b = complex[i];
            const auto ka = std::make_tuple(a.filtration_value, a.dim, a.vertices);
            const auto kb = std::make_tuple(b.filtration_value, b.dim, b.vertices);
            CHECK(ka <= kb);
        }
    }
}

TEST_CASE("compute_persistence on small fixtures") {
    SUBCASE("path P3") {
        // Union-find oracle confirms: two components die at 1, one lives.
        const auto complex = build_rips(graph_metric(3, {{0, 1}, {1, 2}}), 1.2);
        auto [h0, h1] = compute_persistence(complex);
        REQUIRE(h0.intervals.size() == 3);
        CHECK(h0.intervals[0].birth == 0.0);
        CHECK(h0.intervals[0].death == 1.0);
        CHECK(h0.intervals[1].death == 1.0);
        CHECK(h0.intervals[2].infinite());
        CHECK(h1.intervals.empty());
        CHECK(oracle::diagrams_equal(h0.intervals, oracle::h0_union_find(complex)));
    }
    SUBCASE("4-cycle, scale 1.2: one essential loop") {
        const auto complex = build_rips(graph_metric(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}), 1.2);
        auto [h0, h1] = compute_persistence(complex);
        REQUIRE(h1.intervals.size() == 1);
        CHECK(h1.intervals[0].birth == 1.0);
        CHECK(h1.intervals[0].infinite());
    }
    SUBCASE("4-cycle, scale 2.5: loop filled at 2") {
        const auto complex = build_rips(graph_metric(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}), 2.5);
        auto [h0, h1] = compute_persistence(complex);
        REQUIRE(h1.intervals.size() == 1);
        CHECK(h1.intervals[0].birth == 1.0);
        CHECK(h1.intervals[0].death == 2.0);
    }
    SUBCASE("rejects a non-face-closed complex") {
        std::vector<FilteredSimplex> bad = {{{0, -1, -1}, 0, 0.0}, {{0, 1, -1}, 1, 1.0}};
        CHECK_THROWS_AS(compute_persistence(bad), StateError);
    }
    SUBCASE("rejects an unsorted complex") {
        std::vector<FilteredSimplex> bad = {{{0, 1, -1}, 1, 1.0}, {{0, -1, -1}, 0, 0.0}};
        CHECK_THROWS_AS(compute_persistence(bad), StateError);
    }
}

TEST_CASE("H0 equals union-find sweep and H1 equals dense reduction on random graphs") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(10));
        const auto adj = oracle::random_adjacency(n, rng.uniform(0.1, 0.8), rng);
        const auto dist = floyd_warshall(adj);
        const auto complex = build_rips(dist, full_scale(dist));
        auto [h0, h1] = compute_persistence(complex);
        REQUIRE(oracle::diagrams_equal(h0.intervals, oracle::h0_union_find(complex)));
        auto [d0, d1] = oracle::dense_reduction(complex);
        REQUIRE(oracle::diagrams_equal(h0.intervals, d0));
        REQUIRE(oracle::diagrams_equal(h1.intervals, d1));
    }
}

TEST_CASE("H0 interval count equals vertex count; pairing reconciles with Euler characteristic") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(10));
        const auto adj = oracle::random_adjacency(n, rng.uniform(0.1, 0.9), rng);
        const auto dist = floyd_warshall(adj);
        const auto complex = build_rips(dist, full_scale(dist));
        ReductionStats stats;
        auto [h0, h1] = compute_persistence(complex, &stats);
        CHECK(static_cast<int>(h0.intervals.size()) == n);  // graph edges enter at >= 1 > 0

        int counts[3] = {0, 0, 0};
        for (const auto& s : complex) counts[s.dim]++;
        // Every simplex is a creator or a destroyer.
        CHECK(stats.creators[0] + stats.creators[1] + stats.creators[2] + stats.destroyers[0] +
                  stats.destroyers[1] + stats.destroyers[2] ==
              static_cast<int>(complex.size()));
        // Euler characteristic V - E + T = sum of essential Betti numbers.
        CHECK(counts[0] - counts[1] + counts[2] ==
              stats.essential[0] - stats.essential[1] + stats.essential[2]);
    }
}

TEST_CASE("window_intervals") {
    const PersistenceDiagram inf_bar{0, {{0.0, kUnreachable}}};
    SUBCASE("infinite bar clamps to the window") {
        const auto w = window_intervals(inf_bar, 0.4, 1.2);
        REQUIRE(w.intervals.size() == 1);
        CHECK(w.intervals[0].birth == 0.4);
        CHECK(w.intervals[0].death == 1.2);
    }
    SUBCASE("interval dying before r0 is dropped") {
        const auto w = window_intervals({0, {{0.0, 0.3}}}, 0.4, 1.2);
        CHECK(w.intervals.empty());
    }
    SUBCASE("P3 H0 diagram windows to three clamped intervals") {
        const PersistenceDiagram p3{0, {{0.0, 1.0}, {0.0, 1.0}, {0.0, kUnreachable}}};
        const auto w = window_intervals(p3, 0.4, 1.2);
        REQUIRE(w.intervals.size() == 3);
        CHECK(w.intervals[0].birth == 0.4);
        CHECK(w.intervals[0].death == 1.0);
        CHECK(w.intervals[1].death == 1.0);
        CHECK(w.intervals[2].death == 1.2);
    }
    SUBCASE("windowed intervals always satisfy r0 <= b < d <= r1") {
        Rng rng(13);
        for (int t = 0; t < 200; ++t) {
            PersistenceDiagram diag{1, {}};
            for (int k = 0; k < 6; ++k) {
                const double b = rng.uniform(0.0, 2.0);
                diag.intervals.push_back(
                    {b, rng.bernoulli(0.2) ? kUnreachable : b + rng.uniform(0.001, 2.0)});
            }
            const auto w = window_intervals(diag, 0.4, 1.2);
            for (const auto& iv : w.intervals) {
                CHECK(iv.birth >= 0.4);
                CHECK(iv.birth < iv.death);
                CHECK(iv.death <= 1.2);
            }
        }
    }
}

TEST_CASE("bottleneck_distance basics") {
    const WindowedDiagram empty{0, {}};
    SUBCASE("identical diagrams") {
        const WindowedDiagram a{0, {{0.0, 1.0}, {0.5, 0.9}}};
        CHECK(bottleneck_distance(a, a) == 0.0);
    }
    SUBCASE("single point vs empty uses diagonal distance") {
        const WindowedDiagram a{0, {{0.0, 1.0}}};
        CHECK(bottleneck_distance(a, empty) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(bottleneck_distance(empty, a) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("shifted point matches at L-infinity cost") {
        const WindowedDiagram a{0, {{0.0, 1.0}}};
        const WindowedDiagram b{0, {{0.1, 1.1}}};
        CHECK(bottleneck_distance(a, b) == doctest::Approx(0.1).epsilon(1e-12));
    }
    SUBCASE("both empty") { CHECK(bottleneck_distance(empty, empty) == 0.0); }
    SUBCASE("mismatched infinite bars give infinity") {
        const PersistenceDiagram a{0, {{0.0, kUnreachable}}};
        const PersistenceDiagram b{0, {}};
        CHECK(is_unreachable(bottleneck_distance(a, b)));
    }
}

TEST_CASE("diagram stability under metric-repaired perturbations") {
    // Stability statement the windowing/feature stack relies on:
    // perturbing the input metric by eps moves both diagrams by at most eps
    // in bottleneck distance.
    Rng rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(7));
        const auto base = oracle::random_metric(n, 0.5, 2.0, rng);
        DistanceMatrix noisy = base;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                noisy.set(i, j, noisy.at(i, j) + rng.uniform(-0.05, 0.05));
        const auto repaired = oracle::metric_closure(noisy);
        const double eps = oracle::linf_diff(base, repaired);

        const double scale = 4.0;  // beyond every pairwise distance
        auto [a0, a1] = compute_persistence(build_rips(base, scale));
        auto [b0, b1] = compute_persistence(build_rips(repaired, scale));
        CHECK(bottleneck_distance(a0, b0) <= eps + 1e-9);
        CHECK(bottleneck_distance(a1, b1) <= eps + 1e-9);
    }
}

TEST_CASE("format_diagram prints inf for essential intervals") {
    const PersistenceDiagram d{1, {{1.0, 2.0}, {1.0, kUnreachable}}};
    const auto text = format_diagram(d);
    CHECK(text.find("1 1 2\n") != std::string::npos);
    CHECK(text.find("1 1 inf\n") != std::string::npos);
}
