#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "topohk/graph.hpp"

namespace topohk {

// One simplex of a filtered complex, dimension 0..2.
// Invariants: vertices sorted ascending; vertex filtration 0, edge
// filtration d(u,v), triangle filtration = max of its three edges.
struct FilteredSimplex {
    std::array<int, 3> vertices{-1, -1, -1};  // unused slots = -1
    int dim = 0;                              // 0, 1 or 2
    double filtration_value = 0.0;
};

struct Interval {
    double birth = 0.0;
    double death = 0.0;  // may be +inf

    bool infinite() const { return death == kUnreachable; }
};

// Multiset of (birth, death) intervals with death > birth.
struct PersistenceDiagram {
    int dim = 0;
    std::vector<Interval> intervals;
};

// Diagram restricted to [r0, r1]: survivors clamped, infinite deaths
// resolved to r1, so every interval satisfies r0 <= birth < death <= r1.
struct WindowedDiagram {
    int dim = 0;
    std::vector<Interval> intervals;
};

// Bookkeeping from the matrix reduction, used by consistency checks
// (Euler characteristic reconciliation, total-pairing property).
struct ReductionStats {
    std::array<int, 3> creators{0, 0, 0};    // positive simplices per dim
    std::array<int, 3> destroyers{0, 0, 0};  // negative simplices per dim
    std::array<int, 3> essential{0, 0, 0};   // unpaired creators per dim
    int zero_length_dropped = 0;
};

// Vietoris-Rips filtration of dimension <= 2: every vertex, every edge with
// d(u,v) <= max_scale (skipping unreachable pairs), every triangle whose
// three edges qualify. Sorted by (filtration, dim, lexicographic vertices).
std::vector<FilteredSimplex> build_rips(const DistanceMatrix& dist, double max_scale);

// Standard persistence pairing over the field with two elements
// (column reduction with lowest-one pivots). Zero-length intervals are
// dropped. Throws StateError if the complex is not face-closed or not
// sorted. stats, when non-null, receives the pairing counts.
std::pair<PersistenceDiagram, PersistenceDiagram> compute_persistence(
    const std::vector<FilteredSimplex>& complex, ReductionStats* stats = nullptr);

// {(max(b,r0), min(d,r1)) : (b,d) in diag, d > r0, b < r1}
WindowedDiagram window_intervals(const PersistenceDiagram& diag, double r0, double r1);

// Exact bottleneck distance via binary search over candidate costs plus a
// bipartite perfect-matching feasibility test. Intended for diagrams of up
// to a few hundred points.
double bottleneck_distance(const WindowedDiagram& a, const WindowedDiagram& b);

// Overload for raw diagrams: infinite bars must match infinite bars (by
// birth); returns +inf when the infinite-bar counts differ.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

// Debug dump, one interval per line: "dim birth death" with "inf" for
// infinite deaths.
std::string format_diagram(const PersistenceDiagram& diag);

}  // namespace topohk
