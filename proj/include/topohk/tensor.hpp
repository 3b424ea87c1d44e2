#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "topohk/rng.hpp"

namespace topohk {

// Dense double-precision tensor participating in a reverse-mode tape.
//
// Tensors are cheap handles onto a shared node; ops build new nodes that
// remember their parents and a backward rule. backward() on a scalar walks
// the recorded graph once in reverse topological order and accumulates
// gradients into every requires-grad ancestor. Gradients accumulate across
// repeated backward calls until zero_grad().
//
// Broadcasting is limited to the one case the model needs: adding a
// row vector (bias) to every row of a matrix.
class Tensor {
public:
    struct Node {
        std::vector<int> shape;
        std::vector<double> data;
        std::vector<double> grad;  // allocated on demand, same length as data
        bool requires_grad = false;
        bool needs_grad = false;  // requires_grad or on a path to one
        std::vector<std::shared_ptr<Node>> parents;
        std::function<void(Node&)> backward_fn;

        int64_t numel() const { return static_cast<int64_t>(data.size()); }
        std::vector<double>& ensure_grad() {
            if (grad.empty()) grad.assign(data.size(), 0.0);
            return grad;
        }
    };

    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, double value, bool requires_grad = false);
    static Tensor from_data(std::vector<int> shape, std::vector<double> data,
                            bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const { return node_->shape; }
    int64_t numel() const { return node_->numel(); }
    int dim(int axis) const { return node_->shape[static_cast<size_t>(axis)]; }

    const std::vector<double>& data() const { return node_->data; }
    std::vector<double>& data() { return node_->data; }
    const std::vector<double>& grad() const { return node_->grad; }
    std::vector<double>& grad() { return node_->ensure_grad(); }
    bool requires_grad() const { return node_->requires_grad; }

    // Value of a single-element tensor.
    double item() const;

    void zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

    std::shared_ptr<Node> node() const { return node_; }

private:
    std::shared_ptr<Node> node_;
};

// --- forward ops (each records its backward rule) ------------------------

// 2-D matrix product: (m,k) x (k,n) -> (m,n).
Tensor matmul(const Tensor& a, const Tensor& b);
// Elementwise sum of equal shapes, or matrix + row vector (bias broadcast).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise, equal shapes
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& x);
Tensor elu(const Tensor& x);          // alpha = 1
Tensor hinge(const Tensor& x);        // max(0, x)
Tensor clamp_min(const Tensor& x, double eps);
// Inverted dropout; identity when train is false. Consumes rng once per
// element when training.
Tensor dropout(const Tensor& x, double rate, bool train, Rng& rng);
// Row-wise log-softmax of a (B, C) tensor.
Tensor log_softmax(const Tensor& x);
// Mean negative log-likelihood of the true labels; with log_softmax this is
// cross-entropy. labels[i] must lie in [0, C).
Tensor nll_from_log_softmax(const Tensor& logp, const std::vector<int>& labels);
// Batch-mean KL(p || q) from row-wise log-probabilities:
// mean_rows sum_c exp(p_log)*(p_log - q_log).
Tensor kl_divergence(const Tensor& p_log, const Tensor& q_log);
Tensor rowwise_l2(const Tensor& x);  // (B, C) -> (B, 1)
Tensor rowwise_l1(const Tensor& x);  // (B, C) -> (B, 1)
// Sum rows of node_feats into per-graph rows: (N, F) -> (num_graphs, F).
Tensor scatter_add_pool(const Tensor& node_feats, const std::vector<int>& batch_vector,
                        int num_graphs);
// out[i] = sum of x[j] over directed edges (j -> i): the GIN neighbor sum.
Tensor neighbor_sum(const Tensor& x, const std::vector<std::pair<int, int>>& directed_edges);
Tensor concat_cols(const Tensor& a, const Tensor& b);  // (B,F1)+(B,F2) -> (B,F1+F2)
Tensor mean(const Tensor& x);  // all elements -> scalar {1}
Tensor sum(const Tensor& x);   // all elements -> scalar {1}
// Elementwise x / s where s is a single-element tensor.
Tensor div_by_scalar_tensor(const Tensor& x, const Tensor& s);

// Reverse-mode sweep from a single-element root.
void backward(const Tensor& scalar_root);

}  // namespace topohk
