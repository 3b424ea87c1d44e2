#include "topohk/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "topohk/error.hpp"

namespace topohk {

namespace {

using Node = Tensor::Node;

int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ')';
    return os.str();
}

std::shared_ptr<Node> make_leaf(std::vector<int> shape, std::vector<double> data,
                                bool requires_grad) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    node->requires_grad = requires_grad;
    node->needs_grad = requires_grad;
    return node;
}

// Result node wiring: parents and the backward rule are only retained when
// some ancestor wants gradients, so constant subgraphs cost nothing.
Tensor make_op(std::vector<int> shape, std::vector<double> data,
               std::vector<std::shared_ptr<Node>> parents, std::function<void(Node&)> fn) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    bool needs = false;
    for (const auto& p : parents) needs = needs || p->needs_grad;
    node->needs_grad = needs;
    if (needs) {
        node->parents = std::move(parents);
        node->backward_fn = std::move(fn);
    }
    return Tensor(node);
}

void require_matrix(const Tensor& t, const char* op) {
    if (t.shape().size() != 2)
        throw ShapeError(std::string(op) + ": expected a 2-D tensor, got " + shape_str(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

}  // namespace

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    auto n = shape_numel(shape);
    return Tensor(make_leaf(std::move(shape), std::vector<double>(static_cast<size_t>(n), 0.0),
                            requires_grad));
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
    auto n = shape_numel(shape);
    return Tensor(make_leaf(std::move(shape), std::vector<double>(static_cast<size_t>(n), value),
                            requires_grad));
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> data, bool requires_grad) {
    if (shape_numel(shape) != static_cast<int64_t>(data.size()))
        throw ShapeError("from_data: shape " + shape_str(shape) + " does not match buffer of " +
                         std::to_string(data.size()) + " elements");
    return Tensor(make_leaf(std::move(shape), std::move(data), requires_grad));
}

double Tensor::item() const {
    if (numel() != 1)
        throw InvalidArgument("item: tensor has " + std::to_string(numel()) + " elements");
    return node_->data[0];
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_matrix(a, "matmul");
    require_matrix(b, "matmul");
    const int m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
    if (k != k2)
        throw ShapeError("matmul: inner dims disagree " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
    const auto& da = a.data();
    const auto& db = b.data();
    for (int i = 0; i < m; ++i) {
        for (int l = 0; l < k; ++l) {
            const double av = da[static_cast<size_t>(i) * k + l];
            if (av == 0.0) continue;
            const double* brow = &db[static_cast<size_t>(l) * n];
            double* orow = &out[static_cast<size_t>(i) * n];
            for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    auto an = a.node(), bn = b.node();
    return make_op({m, n}, std::move(out), {an, bn}, [an, bn, m, k, n](Node& self) {
        const auto& g = self.grad;
        if (an->needs_grad) {
            auto& ga = an->ensure_grad();
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) {
                    const double gv = g[static_cast<size_t>(i) * n + j];
                    if (gv == 0.0) continue;
                    const double* brow = &bn->data[0];
                    for (int l = 0; l < k; ++l)
                        ga[static_cast<size_t>(i) * k + l] += gv * brow[static_cast<size_t>(l) * n + j];
                }
        }
        if (bn->needs_grad) {
            auto& gb = bn->ensure_grad();
            for (int i = 0; i < m; ++i)
                for (int l = 0; l < k; ++l) {
                    const double av = an->data[static_cast<size_t>(i) * k + l];
                    if (av == 0.0) continue;
                    const double* grow = &g[static_cast<size_t>(i) * n];
                    double* gbrow = &gb[static_cast<size_t>(l) * n];
                    for (int j = 0; j < n; ++j) gbrow[j] += av * grow[j];
                }
        }
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    const bool bias_case = a.shape().size() == 2 &&
                           ((b.shape().size() == 1 && b.dim(0) == a.dim(1)) ||
                            (b.shape().size() == 2 && b.dim(0) == 1 && b.dim(1) == a.dim(1)));
    if (!bias_case) require_same_shape(a, b, "add");

    std::vector<double> out(a.data().size());
    if (bias_case) {
        const int rows = a.dim(0), cols = a.dim(1);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                out[static_cast<size_t>(i) * cols + j] =
                    a.data()[static_cast<size_t>(i) * cols + j] + b.data()[static_cast<size_t>(j)];
    } else {
        for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    }
    auto an = a.node(), bn = b.node();
    return make_op(a.shape(), std::move(out), {an, bn}, [an, bn, bias_case](Node& self) {
        if (an->needs_grad) {
            auto& ga = an->ensure_grad();
            for (size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
        }
        if (bn->needs_grad) {
            auto& gb = bn->ensure_grad();
            if (bias_case) {
                const size_t cols = bn->data.size();
                const size_t rows = self.data.size() / cols;
                for (size_t i = 0; i < rows; ++i)
                    for (size_t j = 0; j < cols; ++j) gb[j] += self.grad[i * cols + j];
            } else {
                for (size_t i = 0; i < gb.size(); ++i) gb[i] += self.grad[i];
            }
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    auto an = a.node(), bn = b.node();
    return make_op(a.shape(), std::move(out), {an, bn}, [an, bn](Node& self) {
        if (an->needs_grad) {
            auto& ga = an->ensure_grad();
            for (size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
        }
        if (bn->needs_grad) {
            auto& gb = bn->ensure_grad();
            for (size_t i = 0; i < gb.size(); ++i) gb[i] -= self.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    auto an = a.node(), bn = b.node();
    return make_op(a.shape(), std::move(out), {an, bn}, [an, bn](Node& self) {
        if (an->needs_grad) {
            auto& ga = an->ensure_grad();
            for (size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i] * bn->data[i];
        }
        if (bn->needs_grad) {
            auto& gb = bn->ensure_grad();
            for (size_t i = 0; i < gb.size(); ++i) gb[i] += self.grad[i] * an->data[i];
        }
    });
}

Tensor scale(const Tensor& a, double c) {
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * c;
    auto an = a.node();
    return make_op(a.shape(), std::move(out), {an}, [an, c](Node& self) {
        if (!an->needs_grad) return;
        auto& ga = an->ensure_grad();
        for (size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i] * c;
    });
}

namespace {

// relu and hinge share the rule; derivative at exactly 0 is 0.
Tensor positive_part(const Tensor& x, const char*) {
    std::vector<double> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
    auto xn = x.node();
    return make_op(x.shape(), std::move(out), {xn}, [xn](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (size_t i = 0; i < gx.size(); ++i)
            if (xn->data[i] > 0.0) gx[i] += self.grad[i];
    });
}

}  // namespace

Tensor relu(const Tensor& x) { return positive_part(x, "relu"); }
Tensor hinge(const Tensor& x) { return positive_part(x, "hinge"); }

Tensor elu(const Tensor& x) {
    std::vector<double> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) {
        const double v = x.data()[i];
        out[i] = v > 0.0 ? v : std::expm1(v);
    }
    auto xn = x.node();
    return make_op(x.shape(), std::move(out), {xn}, [xn](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (size_t i = 0; i < gx.size(); ++i) {
            const double v = xn->data[i];
            gx[i] += self.grad[i] * (v > 0.0 ? 1.0 : self.data[i] + 1.0);
        }
    });
}

Tensor clamp_min(const Tensor& x, double eps) {
    std::vector<double> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::max(x.data()[i], eps);
    auto xn = x.node();
    return make_op(x.shape(), std::move(out), {xn}, [xn, eps](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (size_t i = 0; i < gx.size(); ++i)
            if (xn->data[i] > eps) gx[i] += self.grad[i];
    });
}

Tensor dropout(const Tensor& x, double rate, bool train, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw InvalidArgument("dropout: rate must be in [0, 1)");
    if (!train || rate == 0.0) return x;
    const double keep_scale = 1.0 / (1.0 - rate);
    std::vector<double> mask(x.data().size());
    std::vector<double> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) {
        mask[i] = rng.bernoulli(rate) ? 0.0 : keep_scale;
        out[i] = x.data()[i] * mask[i];
    }
    auto xn = x.node();
    return make_op(x.shape(), std::move(out), {xn}, [xn, mask = std::move(mask)](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (size_t i = 0; i < gx.size(); ++i) gx[i] += self.grad[i] * mask[i];
    });
}

Tensor log_softmax(const Tensor& x) {
    require_matrix(x, "log_softmax");
    const int rows = x.dim(0), cols = x.dim(1);
    std::vector<double> out(x.data().size());
    for (int i = 0; i < rows; ++i) {
        const double* row = &x.data()[static_cast<size_t>(i) * cols];
        double mx = row[0];
        for (int j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += std::exp(row[j] - mx);
        const double lse = mx + std::log(acc);
        for (int j = 0; j < cols; ++j) out[static_cast<size_t>(i) * cols + j] = row[j] - lse;
    }
    auto xn = x.node();
    return make_op(x.shape(), std::move(out), {xn}, [xn, rows, cols](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (int i = 0; i < rows; ++i) {
            double gsum = 0.0;
            for (int j = 0; j < cols; ++j) gsum += self.grad[static_cast<size_t>(i) * cols + j];
            for (int j = 0; j < cols; ++j) {
                const size_t idx = static_cast<size_t>(i) * cols + j;
                gx[idx] += self.grad[idx] - std::exp(self.data[idx]) * gsum;
            }
        }
    });
}

Tensor nll_from_log_softmax(const Tensor& logp, const std::vector<int>& labels) {
    require_matrix(logp, "nll_from_log_softmax");
    const int rows = logp.dim(0), cols = logp.dim(1);
    if (static_cast<int>(labels.size()) != rows)
        throw ShapeError("nll_from_log_softmax: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(rows) + " rows");
    double loss = 0.0;
    for (int i = 0; i < rows; ++i) {
        const int y = labels[static_cast<size_t>(i)];
        if (y < 0 || y >= cols)
            throw InvalidArgument("nll_from_log_softmax: label " + std::to_string(y) +
                                  " out of range at row " + std::to_string(i));
        loss -= logp.data()[static_cast<size_t>(i) * cols + y];
    }
    loss /= rows;
    auto pn = logp.node();
    return make_op({1}, {loss}, {pn}, [pn, labels, rows, cols](Node& self) {
        if (!pn->needs_grad) return;
        auto& gp = pn->ensure_grad();
        const double g = self.grad[0] / rows;
        for (int i = 0; i < rows; ++i)
            gp[static_cast<size_t>(i) * cols + labels[static_cast<size_t>(i)]] -= g;
    });
}

Tensor kl_divergence(const Tensor& p_log, const Tensor& q_log) {
    require_same_shape(p_log, q_log, "kl_divergence");
    require_matrix(p_log, "kl_divergence");
    const int rows = p_log.dim(0), cols = p_log.dim(1);
    double total = 0.0;
    for (size_t i = 0; i < p_log.data().size(); ++i)
        total += std::exp(p_log.data()[i]) * (p_log.data()[i] - q_log.data()[i]);
    total /= rows;
    auto pn = p_log.node(), qn = q_log.node();
    return make_op({1}, {total}, {pn, qn}, [pn, qn, rows, cols](Node& self) {
        const double g = self.grad[0] / rows;
        (void)cols;
        if (pn->needs_grad) {
            auto& gp = pn->ensure_grad();
            for (size_t i = 0; i < gp.size(); ++i) {
                const double ep = std::exp(pn->data[i]);
                gp[i] += g * ep * (pn->data[i] - qn->data[i] + 1.0);
            }
        }
        if (qn->needs_grad) {
            auto& gq = qn->ensure_grad();
            for (size_t i = 0; i < gq.size(); ++i) gq[i] -= g * std::exp(pn->data[i]);
        }
    });
}

Tensor rowwise_l2(const Tensor& x) {
    require_matrix(x, "rowwise_l2");
    const int rows = x.dim(0), cols = x.dim(1);
    std::vector<double> out(static_cast<size_t>(rows));
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double v = x.data()[static_cast<size_t>(i) * cols + j];
            acc += v * v;
        }
        out[static_cast<size_t>(i)] = std::sqrt(acc);
    }
    auto xn = x.node();
    return make_op({rows, 1}, std::move(out), {xn}, [xn, rows, cols](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (int i = 0; i < rows; ++i) {
            const double r = self.data[static_cast<size_t>(i)];
            if (r == 0.0) continue;  // subgradient 0 at the origin
            const double g = self.grad[static_cast<size_t>(i)] / r;
            for (int j = 0; j < cols; ++j) {
                const size_t idx = static_cast<size_t>(i) * cols + j;
                gx[idx] += g * xn->data[idx];
            }
        }
    });
}

Tensor rowwise_l1(const Tensor& x) {
    require_matrix(x, "rowwise_l1");
    const int rows = x.dim(0), cols = x.dim(1);
    std::vector<double> out(static_cast<size_t>(rows));
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += std::abs(x.data()[static_cast<size_t>(i) * cols + j]);
        out[static_cast<size_t>(i)] = acc;
    }
    auto xn = x.node();
    return make_op({rows, 1}, std::move(out), {xn}, [xn, rows, cols](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (int i = 0; i < rows; ++i) {
            const double g = self.grad[static_cast<size_t>(i)];
            for (int j = 0; j < cols; ++j) {
                const size_t idx = static_cast<size_t>(i) * cols + j;
                const double v = xn->data[idx];
                if (v > 0.0) gx[idx] += g;
                else if (v < 0.0) gx[idx] -= g;
            }
        }
    });
}

Tensor scatter_add_pool(const Tensor& node_feats, const std::vector<int>& batch_vector,
                        int num_graphs) {
    require_matrix(node_feats, "scatter_add_pool");
    const int rows = node_feats.dim(0), cols = node_feats.dim(1);
    if (static_cast<int>(batch_vector.size()) != rows)
        throw ShapeError("scatter_add_pool: batch vector length " +
                         std::to_string(batch_vector.size()) + " for " + std::to_string(rows) +
                         " rows");
    std::vector<double> out(static_cast<size_t>(num_graphs) * cols, 0.0);
    for (int i = 0; i < rows; ++i) {
        const int b = batch_vector[static_cast<size_t>(i)];
        if (b < 0 || b >= num_graphs)
            throw InvalidArgument("scatter_add_pool: batch id " + std::to_string(b) +
                                  " out of range");
        for (int j = 0; j < cols; ++j)
            out[static_cast<size_t>(b) * cols + j] += node_feats.data()[static_cast<size_t>(i) * cols + j];
    }
    auto xn = node_feats.node();
    return make_op({num_graphs, cols}, std::move(out), {xn},
                   [xn, batch_vector, rows, cols](Node& self) {
                       if (!xn->needs_grad) return;
                       auto& gx = xn->ensure_grad();
                       for (int i = 0; i < rows; ++i) {
                           const int b = batch_vector[static_cast<size_t>(i)];
                           for (int j = 0; j < cols; ++j)
                               gx[static_cast<size_t>(i) * cols + j] +=
                                   self.grad[static_cast<size_t>(b) * cols + j];
                       }
                   });
}

Tensor neighbor_sum(const Tensor& x, const std::vector<std::pair<int, int>>& directed_edges) {
    require_matrix(x, "neighbor_sum");
    const int rows = x.dim(0), cols = x.dim(1);
    std::vector<double> out(x.data().size(), 0.0);
    for (const auto& [src, dst] : directed_edges) {
        if (src < 0 || src >= rows || dst < 0 || dst >= rows)
            throw InvalidArgument("neighbor_sum: edge endpoint out of range");
        for (int j = 0; j < cols; ++j)
            out[static_cast<size_t>(dst) * cols + j] += x.data()[static_cast<size_t>(src) * cols + j];
    }
    auto xn = x.node();
    return make_op(x.shape(), std::move(out), {xn}, [xn, directed_edges, cols](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (const auto& [src, dst] : directed_edges)
            for (int j = 0; j < cols; ++j)
                gx[static_cast<size_t>(src) * cols + j] +=
                    self.grad[static_cast<size_t>(dst) * cols + j];
    });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    require_matrix(a, "concat_cols");
    require_matrix(b, "concat_cols");
    if (a.dim(0) != b.dim(0))
        throw ShapeError("concat_cols: row counts differ " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    const int rows = a.dim(0), ca = a.dim(1), cb = b.dim(1);
    std::vector<double> out(static_cast<size_t>(rows) * (ca + cb));
    for (int i = 0; i < rows; ++i) {
        std::copy_n(&a.data()[static_cast<size_t>(i) * ca], ca,
                    &out[static_cast<size_t>(i) * (ca + cb)]);
        std::copy_n(&b.data()[static_cast<size_t>(i) * cb], cb,
                    &out[static_cast<size_t>(i) * (ca + cb) + ca]);
    }
    auto an = a.node(), bn = b.node();
    return make_op({rows, ca + cb}, std::move(out), {an, bn}, [an, bn, rows, ca, cb](Node& self) {
        for (int i = 0; i < rows; ++i) {
            if (an->needs_grad) {
                auto& ga = an->ensure_grad();
                for (int j = 0; j < ca; ++j)
                    ga[static_cast<size_t>(i) * ca + j] +=
                        self.grad[static_cast<size_t>(i) * (ca + cb) + j];
            }
            if (bn->needs_grad) {
                auto& gb = bn->ensure_grad();
                for (int j = 0; j < cb; ++j)
                    gb[static_cast<size_t>(i) * cb + j] +=
                        self.grad[static_cast<size_t>(i) * (ca + cb) + ca + j];
            }
        }
    });
}

Tensor mean(const Tensor& x) {
    const double n = static_cast<double>(x.numel());
    if (n == 0) throw InvalidArgument("mean: empty tensor");
    double acc = 0.0;
    for (double v : x.data()) acc += v;
    auto xn = x.node();
    return make_op({1}, {acc / n}, {xn}, [xn, n](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        const double g = self.grad[0] / n;
        for (double& v : gx) v += g;
    });
}

Tensor sum(const Tensor& x) {
    double acc = 0.0;
    for (double v : x.data()) acc += v;
    auto xn = x.node();
    return make_op({1}, {acc}, {xn}, [xn](Node& self) {
        if (!xn->needs_grad) return;
        auto& gx = xn->ensure_grad();
        for (double& v : gx) v += self.grad[0];
    });
}

Tensor div_by_scalar_tensor(const Tensor& x, const Tensor& s) {
    if (s.numel() != 1) throw ShapeError("div_by_scalar_tensor: divisor must be a scalar");
    const double sv = s.data()[0];
    std::vector<double> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] / sv;
    auto xn = x.node(), sn = s.node();
    return make_op(x.shape(), std::move(out), {xn, sn}, [xn, sn](Node& self) {
        const double sv2 = sn->data[0];
        if (xn->needs_grad) {
            auto& gx = xn->ensure_grad();
            for (size_t i = 0; i < gx.size(); ++i) gx[i] += self.grad[i] / sv2;
        }
        if (sn->needs_grad) {
            auto& gs = sn->ensure_grad();
            double acc = 0.0;
            for (size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i] * xn->data[i];
            gs[0] -= acc / (sv2 * sv2);
        }
    });
}

void backward(const Tensor& scalar_root) {
    if (scalar_root.numel() != 1)
        throw InvalidArgument("backward: root must be a single-element tensor");

    // Reverse topological order over the needs-grad subgraph.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, size_t>> stack;
    Node* root = scalar_root.node().get();
    if (!root->needs_grad) return;
    stack.emplace_back(root, 0);
    visited.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->needs_grad && !visited.count(parent)) {
                visited.insert(parent);
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    // Intermediate grads are scratch space for this sweep; only leaf grads
    // persist and accumulate across calls.
    for (Node* node : order)
        if (node->backward_fn) node->grad.assign(node->data.size(), 0.0);

    root->ensure_grad()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backward_fn) node->backward_fn(*node);
    }
}

}  // namespace topohk
