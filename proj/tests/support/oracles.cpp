#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace topohk::oracle {

DistanceMatrix bfs_all_pairs(const AdjacencyMatrix& adj) {
    const int n = adj.n;
    DistanceMatrix dist = DistanceMatrix::filled(n, kUnreachable);
    for (int s = 0; s < n; ++s) {
        std::vector<int> hops(static_cast<size_t>(n), -1);
        std::queue<int> frontier;
        hops[static_cast<size_t>(s)] = 0;
        frontier.push(s);
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            for (int v = 0; v < n; ++v) {
                if (adj.at(u, v) && hops[static_cast<size_t>(v)] < 0) {
                    hops[static_cast<size_t>(v)] = hops[static_cast<size_t>(u)] + 1;
                    frontier.push(v);
                }
            }
        }
        for (int v = 0; v < n; ++v)
            if (hops[static_cast<size_t>(v)] >= 0)
                dist.d[static_cast<size_t>(s) * n + v] = hops[static_cast<size_t>(v)];
    }
    return dist;
}

std::vector<Interval> h0_union_find(const std::vector<FilteredSimplex>& complex) {
    // Map vertex id -> (position in complex, filtration).
    std::vector<int> vertex_pos;
    std::vector<double> vertex_birth;
    std::vector<int> id_of_vertex;  // vertex id -> dense index
    int max_vertex = -1;
    for (const auto& s : complex)
        if (s.dim == 0) max_vertex = std::max(max_vertex, s.vertices[0]);
    id_of_vertex.assign(static_cast<size_t>(max_vertex) + 1, -1);
    for (size_t i = 0; i < complex.size(); ++i) {
        if (complex[i].dim != 0) continue;
        id_of_vertex[static_cast<size_t>(complex[i].vertices[0])] =
            static_cast<int>(vertex_pos.size());
        vertex_pos.push_back(static_cast<int>(i));
        vertex_birth.push_back(complex[i].filtration_value);
    }
    const int nv = static_cast<int>(vertex_pos.size());
    std::vector<int> parent(static_cast<size_t>(nv));
    std::vector<int> creator(static_cast<size_t>(nv));  // complex position of component creator
    for (int i = 0; i < nv; ++i) {
        parent[static_cast<size_t>(i)] = i;
        creator[static_cast<size_t>(i)] = vertex_pos[static_cast<size_t>(i)];
    }
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };

    std::vector<Interval> out;
    for (const auto& s : complex) {
        if (s.dim != 1) continue;
        const int a = find(id_of_vertex[static_cast<size_t>(s.vertices[0])]);
        const int b = find(id_of_vertex[static_cast<size_t>(s.vertices[1])]);
        if (a == b) continue;
        // The component whose creator sorts later (younger) dies.
        const int young = creator[static_cast<size_t>(a)] > creator[static_cast<size_t>(b)] ? a : b;
        const int old = young == a ? b : a;
        const double birth =
            complex[static_cast<size_t>(creator[static_cast<size_t>(young)])].filtration_value;
        if (s.filtration_value != birth) out.push_back({birth, s.filtration_value});
        parent[static_cast<size_t>(young)] = old;
    }
    for (int i = 0; i < nv; ++i)
        if (find(i) == i)
            out.push_back({complex[static_cast<size_t>(creator[static_cast<size_t>(i)])].filtration_value,
                           kUnreachable});
    return out;
}

std::pair<std::vector<Interval>, std::vector<Interval>> dense_reduction(
    const std::vector<FilteredSimplex>& complex) {
    const int m = static_cast<int>(complex.size());
    // Dense columns over Z/2.
    std::vector<std::vector<char>> col(static_cast<size_t>(m),
                                       std::vector<char>(static_cast<size_t>(m), 0));
    auto pos_of = [&](std::array<int, 3> v) {
        for (int i = 0; i < m; ++i)
            if (complex[static_cast<size_t>(i)].vertices == v) return i;
        return -1;
    };
    for (int j = 0; j < m; ++j) {
        const auto& s = complex[static_cast<size_t>(j)];
        if (s.dim == 1) {
            col[static_cast<size_t>(j)][static_cast<size_t>(pos_of({s.vertices[0], -1, -1}))] = 1;
            col[static_cast<size_t>(j)][static_cast<size_t>(pos_of({s.vertices[1], -1, -1}))] = 1;
        } else if (s.dim == 2) {
            col[static_cast<size_t>(j)][static_cast<size_t>(pos_of({s.vertices[0], s.vertices[1], -1}))] = 1;
            col[static_cast<size_t>(j)][static_cast<size_t>(pos_of({s.vertices[0], s.vertices[2], -1}))] = 1;
            col[static_cast<size_t>(j)][static_cast<size_t>(pos_of({s.vertices[1], s.vertices[2], -1}))] = 1;
        }
    }
    auto lowest = [&](int j) {
        for (int i = m - 1; i >= 0; --i)
            if (col[static_cast<size_t>(j)][static_cast<size_t>(i)]) return i;
        return -1;
    };

    std::vector<int> owner(static_cast<size_t>(m), -1);
    std::vector<int> killer(static_cast<size_t>(m), -1);
    for (int j = 0; j < m; ++j) {
        int low = lowest(j);
        while (low >= 0 && owner[static_cast<size_t>(low)] >= 0) {
            const int o = owner[static_cast<size_t>(low)];
            for (int i = 0; i < m; ++i)
                col[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                    static_cast<char>(col[static_cast<size_t>(j)][static_cast<size_t>(i)] ^
                                      col[static_cast<size_t>(o)][static_cast<size_t>(i)]);
            low = lowest(j);
        }
        if (low >= 0) {
            owner[static_cast<size_t>(low)] = j;
            killer[static_cast<size_t>(low)] = j;
        }
    }

    std::vector<Interval> h0, h1;
    for (int i = 0; i < m; ++i) {
        const auto& s = complex[static_cast<size_t>(i)];
        if (s.dim > 1) continue;
        const bool is_positive = lowest(i) == -1;
        if (!is_positive) continue;
        Interval iv{s.filtration_value, kUnreachable};
        if (killer[static_cast<size_t>(i)] >= 0)
            iv.death = complex[static_cast<size_t>(killer[static_cast<size_t>(i)])].filtration_value;
        if (iv.death == iv.birth) continue;
        (s.dim == 0 ? h0 : h1).push_back(iv);
    }
    return {h0, h1};
}

std::vector<double> pi_reference(const std::vector<Interval>& intervals, const PiParams& params) {
    const int res = params.res;
    const double span = params.r1 - params.r0;
    const double cell = span / res;
    std::vector<double> img(static_cast<size_t>(res) * res, 0.0);
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            const double cx = params.r0 + (i + 0.5) * cell;
            const double cy = (j + 0.5) * cell;
            double value = 0.0;
            for (const auto& iv : intervals) {
                const double pers = iv.death - iv.birth;
                const double w = pers / span;
                const double g =
                    std::exp(-((cx - iv.birth) * (cx - iv.birth) + (cy - pers) * (cy - pers)) /
                             (2.0 * params.sigma * params.sigma)) /
                    (2.0 * std::numbers::pi * params.sigma * params.sigma);
                value += w * g * cell * cell;
            }
            img[static_cast<size_t>(i) * res + j] = value;
        }
    }
    return img;
}

double jacobi_top_singular_value(const std::vector<double>& w, int rows, int cols) {
    // S = W^T W, symmetric PSD (cols x cols).
    std::vector<double> s(static_cast<size_t>(cols) * cols, 0.0);
    for (int i = 0; i < cols; ++i)
        for (int j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (int r = 0; r < rows; ++r)
                acc += w[static_cast<size_t>(r) * cols + i] * w[static_cast<size_t>(r) * cols + j];
            s[static_cast<size_t>(i) * cols + j] = acc;
        }
    auto at = [&](int i, int j) -> double& { return s[static_cast<size_t>(i) * cols + j]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < cols; ++i)
            for (int j = i + 1; j < cols; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-24) break;
        for (int p = 0; p < cols; ++p) {
            for (int q = p + 1; q < cols; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < cols; ++k) {
                    const double skp = at(k, p), skq = at(k, q);
                    at(k, p) = c * skp - sn * skq;
                    at(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < cols; ++k) {
                    const double spk = at(p, k), sqk = at(q, k);
                    at(p, k) = c * spk - sn * sqk;
                    at(q, k) = sn * spk + c * sqk;
                }
            }
        }
    }
    double top = 0.0;
    for (int i = 0; i < cols; ++i) top = std::max(top, at(i, i));
    return std::sqrt(std::max(top, 0.0));
}

bool diagrams_equal(std::vector<Interval> a, std::vector<Interval> b) {
    auto cmp = [](const Interval& x, const Interval& y) {
        if (x.birth != y.birth) return x.birth < y.birth;
        return x.death < y.death;
    };
    std::sort(a.begin(), a.end(), cmp);
    std::sort(b.begin(), b.end(), cmp);
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].birth != b[i].birth || a[i].death != b[i].death) return false;
    return true;
}

AdjacencyMatrix random_adjacency(int n, double edge_prob, Rng& rng) {
    AdjacencyMatrix adj = AdjacencyMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(edge_prob)) adj.set(i, j, 1);
    return adj;
}

DistanceMatrix metric_closure(const DistanceMatrix& d) {
    DistanceMatrix out = d;
    const int n = d.n;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double via = out.at(i, k) + out.at(k, j);
                if (via < out.at(i, j)) out.d[static_cast<size_t>(i) * n + j] = via;
            }
    return out;
}

DistanceMatrix random_metric(int n, double lo, double hi, Rng& rng) {
    DistanceMatrix d = DistanceMatrix::filled(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d.set(i, j, rng.uniform(lo, hi));
    return metric_closure(d);
}

double linf_diff(const DistanceMatrix& a, const DistanceMatrix& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.d.size(); ++i) worst = std::max(worst, std::abs(a.d[i] - b.d[i]));
    return worst;
}

}  // namespace topohk::oracle
