#include "topohk/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "topohk/error.hpp"

namespace topohk {

namespace {

bool simplex_order(const FilteredSimplex& a, const FilteredSimplex& b) {
    if (a.filtration_value != b.filtration_value) return a.filtration_value < b.filtration_value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
}

// dim <= 2 and vertex ids < 2^21 fit into one packed key.
uint64_t simplex_key(const std::array<int, 3>& v) {
    return (static_cast<uint64_t>(v[0] + 1) << 42) | (static_cast<uint64_t>(v[1] + 1) << 21) |
           static_cast<uint64_t>(v[2] + 1);
}

// Symmetric difference of two ascending index lists (addition over Z/2).
std::vector<int> column_xor(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) out.push_back(a[i++]);
        else if (b[j] < a[i]) out.push_back(b[j++]);
        else { ++i; ++j; }
    }
    out.insert(out.end(), a.begin() + static_cast<long>(i), a.end());
    out.insert(out.end(), b.begin() + static_cast<long>(j), b.end());
    return out;
}

}  // namespace

std::vector<FilteredSimplex> build_rips(const DistanceMatrix& dist, double max_scale) {
    if (max_scale <= 0.0) throw InvalidArgument("build_rips: max_scale must be > 0");
    const int n = dist.n;
    std::vector<FilteredSimplex> complex;

    for (int i = 0; i < n; ++i) complex.push_back({{i, -1, -1}, 0, 0.0});

    auto edge_ok = [&](int i, int j) {
        const double d = dist.at(i, j);
        return !is_unreachable(d) && d <= max_scale;
    };

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (edge_ok(i, j)) complex.push_back({{i, j, -1}, 1, dist.at(i, j)});
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!edge_ok(i, j)) continue;
            for (int k = j + 1; k < n; ++k) {
                if (!edge_ok(i, k) || !edge_ok(j, k)) continue;
                const double f = std::max({dist.at(i, j), dist.at(i, k), dist.at(j, k)});
                complex.push_back({{i, j, k}, 2, f});
            }
        }
    }
    std::sort(complex.begin(), complex.end(), simplex_order);
    return complex;
}

std::pair<PersistenceDiagram, PersistenceDiagram> compute_persistence(
    const std::vector<FilteredSimplex>& complex, ReductionStats* stats) {
    const int m = static_cast<int>(complex.size());

    for (int i = 1; i < m; ++i) {
        if (simplex_order(complex[static_cast<size_t>(i)], complex[static_cast<size_t>(i) - 1]))
            throw StateError("compute_persistence: complex is not sorted by filtration");
    }

    std::unordered_map<uint64_t, int> index_of;
    index_of.reserve(static_cast<size_t>(m) * 2);
    for (int i = 0; i < m; ++i) index_of[simplex_key(complex[static_cast<size_t>(i)].vertices)] = i;

    auto facet_index = [&](std::array<int, 3> v, int self) {
        auto it = index_of.find(simplex_key(v));
        if (it == index_of.end() || it->second >= self)
            throw StateError("compute_persistence: complex is not face-closed");
        return it->second;
    };

    // Boundary columns over Z/2, rows = global simplex indices.
    std::vector<std::vector<int>> boundary(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto& s = complex[static_cast<size_t>(i)];
        auto& col = boundary[static_cast<size_t>(i)];
        if (s.dim == 1) {
            col = {facet_index({s.vertices[0], -1, -1}, i), facet_index({s.vertices[1], -1, -1}, i)};
        } else if (s.dim == 2) {
            col = {facet_index({s.vertices[0], s.vertices[1], -1}, i),
                   facet_index({s.vertices[0], s.vertices[2], -1}, i),
                   facet_index({s.vertices[1], s.vertices[2], -1}, i)};
        }
        std::sort(col.begin(), col.end());
    }

    std::vector<int> pivot_owner(static_cast<size_t>(m), -1);
    std::vector<char> positive(static_cast<size_t>(m), 0);
    std::vector<std::pair<int, int>> pairs;  // (creator index, destroyer index)

    for (int j = 0; j < m; ++j) {
        std::vector<int>& col = boundary[static_cast<size_t>(j)];
        while (!col.empty()) {
            const int low = col.back();
            const int owner = pivot_owner[static_cast<size_t>(low)];
            if (owner < 0) break;
            col = column_xor(col, boundary[static_cast<size_t>(owner)]);
        }
        if (col.empty()) {
            positive[static_cast<size_t>(j)] = 1;
        } else {
            const int low = col.back();
            pivot_owner[static_cast<size_t>(low)] = j;
            pairs.emplace_back(low, j);
        }
    }

    ReductionStats local;
    PersistenceDiagram h0{0, {}};
    PersistenceDiagram h1{1, {}};

    std::vector<char> paired(static_cast<size_t>(m), 0);
    for (const auto& [creator, destroyer] : pairs) {
        paired[static_cast<size_t>(creator)] = 1;
        const auto& cs = complex[static_cast<size_t>(creator)];
        const auto& ds = complex[static_cast<size_t>(destroyer)];
        local.destroyers[static_cast<size_t>(ds.dim)]++;
        if (cs.filtration_value == ds.filtration_value) {
            local.zero_length_dropped++;
            continue;
        }
        Interval iv{cs.filtration_value, ds.filtration_value};
        if (cs.dim == 0) h0.intervals.push_back(iv);
        else if (cs.dim == 1) h1.intervals.push_back(iv);
    }
    for (int i = 0; i < m; ++i) {
        if (!positive[static_cast<size_t>(i)]) continue;
        const auto& s = complex[static_cast<size_t>(i)];
        local.creators[static_cast<size_t>(s.dim)]++;
        if (paired[static_cast<size_t>(i)]) continue;
        local.essential[static_cast<size_t>(s.dim)]++;
        if (s.dim == 0) h0.intervals.push_back({s.filtration_value, kUnreachable});
        else if (s.dim == 1) h1.intervals.push_back({s.filtration_value, kUnreachable});
    }

    auto by_value = [](const Interval& a, const Interval& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    };
    std::sort(h0.intervals.begin(), h0.intervals.end(), by_value);
    std::sort(h1.intervals.begin(), h1.intervals.end(), by_value);

    if (stats) *stats = local;
    return {std::move(h0), std::move(h1)};
}

WindowedDiagram window_intervals(const PersistenceDiagram& diag, double r0, double r1) {
    if (!(r0 < r1)) throw InvalidArgument("window_intervals: requires r0 < r1");
    WindowedDiagram out{diag.dim, {}};
    for (const Interval& iv : diag.intervals) {
        if (!(iv.death > r0) || !(iv.birth < r1)) continue;
        out.intervals.push_back({std::max(iv.birth, r0), std::min(iv.death, r1)});
    }
    return out;
}

namespace {

double linf(const Interval& a, const Interval& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diag_dist(const Interval& a) { return (a.death - a.birth) / 2.0; }

// Perfect-matching feasibility at threshold t for the standard bottleneck
// construction: each point of A matches a point of B or its own diagonal
// slot; diagonal slots of B absorb leftover B points; slot-to-slot matches
// are free.
class BottleneckMatcher {
public:
    BottleneckMatcher(const std::vector<Interval>& a, const std::vector<Interval>& b)
        : a_(a), b_(b), na_(static_cast<int>(a.size())), nb_(static_cast<int>(b.size())) {}

    bool feasible(double t) {
        const int n_left = na_ + nb_;   // A points, then diagonal slots for B
        const int n_right = nb_ + na_;  // B points, then diagonal slots for A
        match_right_.assign(static_cast<size_t>(n_right), -1);
        int matched = 0;
        for (int u = 0; u < n_left; ++u) {
            seen_.assign(static_cast<size_t>(n_right), 0);
            if (augment(u, t)) ++matched;
        }
        return matched == n_left;
    }

private:
    bool edge(int u, int v, double t) const {
        if (u < na_) {
            const Interval& p = a_[static_cast<size_t>(u)];
            if (v < nb_) return linf(p, b_[static_cast<size_t>(v)]) <= t;
            return v - nb_ == u && diag_dist(p) <= t;  // own diagonal slot only
        }
        const int bj = u - na_;  // diagonal slot for B point bj
        if (v < nb_) return v == bj && diag_dist(b_[static_cast<size_t>(bj)]) <= t;
        return true;  // slot-slot
    }

    bool augment(int u, double t) {
        const int n_right = nb_ + na_;
        for (int v = 0; v < n_right; ++v) {
            if (seen_[static_cast<size_t>(v)] || !edge(u, v, t)) continue;
            seen_[static_cast<size_t>(v)] = 1;
            if (match_right_[static_cast<size_t>(v)] < 0 || augment(match_right_[static_cast<size_t>(v)], t)) {
                match_right_[static_cast<size_t>(v)] = u;
                return true;
            }
        }
        return false;
    }

    const std::vector<Interval>& a_;
    const std::vector<Interval>& b_;
    int na_, nb_;
    std::vector<int> match_right_;
    std::vector<char> seen_;
};

double bottleneck_finite(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    if (a.empty() && b.empty()) return 0.0;

    std::vector<double> candidates{0.0};
    for (const auto& p : a) candidates.push_back(diag_dist(p));
    for (const auto& q : b) candidates.push_back(diag_dist(q));
    for (const auto& p : a)
        for (const auto& q : b) candidates.push_back(linf(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    BottleneckMatcher matcher(a, b);
    size_t lo = 0, hi = candidates.size() - 1;
    if (matcher.feasible(candidates[lo])) return candidates[lo];
    // Largest candidate is always feasible (everything fits below max cost).
    while (hi - lo > 1) {
        const size_t mid = lo + (hi - lo) / 2;
        if (matcher.feasible(candidates[mid])) hi = mid;
        else lo = mid;
    }
    return candidates[hi];
}

}  // namespace

double bottleneck_distance(const WindowedDiagram& a, const WindowedDiagram& b) {
    return bottleneck_finite(a.intervals, b.intervals);
}

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    std::vector<Interval> fin_a, fin_b;
    std::vector<double> inf_a, inf_b;
    for (const auto& iv : a.intervals) {
        if (iv.infinite()) inf_a.push_back(iv.birth);
        else fin_a.push_back(iv);
    }
    for (const auto& iv : b.intervals) {
        if (iv.infinite()) inf_b.push_back(iv.birth);
        else fin_b.push_back(iv);
    }
    if (inf_a.size() != inf_b.size()) return kUnreachable;
    std::sort(inf_a.begin(), inf_a.end());
    std::sort(inf_b.begin(), inf_b.end());
    double inf_part = 0.0;
    for (size_t i = 0; i < inf_a.size(); ++i)
        inf_part = std::max(inf_part, std::abs(inf_a[i] - inf_b[i]));
    return std::max(inf_part, bottleneck_finite(fin_a, fin_b));
}

std::string format_diagram(const PersistenceDiagram& diag) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& iv : diag.intervals) {
        os << diag.dim << ' ' << iv.birth << ' ';
        if (iv.infinite()) os << "inf";
        else os << iv.death;
        os << '\n';
    }
    return os.str();
}

}  // namespace topohk
