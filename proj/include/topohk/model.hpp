#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "topohk/rng.hpp"
#include "topohk/tensor.hpp"

namespace topohk {

// Plain dense layer, weight stored (in, out) so forward is x * W + b.
struct LinearLayer {
    Tensor weight;
    Tensor bias;
};

Tensor linear(const LinearLayer& layer, const Tensor& x);

// GIN convolution: MLP((1 + eps) * x_i + sum_{j in N(i)} x_j) with a
// two-layer MLP (in -> h, ReLU, h -> h). eps is fixed, non-trainable.
struct GinConvLayer {
    LinearLayer l1;
    LinearLayer l2;
    double epsilon = 0.0;
};

Tensor gin_conv(const GinConvLayer& layer, const Tensor& x,
                const std::vector<std::pair<int, int>>& directed_edges);

// Linear layer with spectral normalization: the weight is divided by a
// power-iteration estimate of its top singular value before use. One
// iteration step runs per training forward; u/v persist across steps and
// are refreshed warmup_steps times at construction.
class SnLinear {
public:
    SnLinear() = default;
    SnLinear(int in, int out, Rng& rng, int warmup_steps);

    Tensor forward(const Tensor& x, bool train);

    void power_iteration_step();
    // Current top-singular-value estimate from the persisted u/v pair.
    double sigma_estimate() const;
    // Converged power iteration on the normalized weight, for monitoring;
    // independent of the single-step estimate used in forward.
    double effective_norm_estimate(int iters = 200) const;

    Tensor weight;  // (in, out)
    Tensor bias;    // (out)
    std::vector<double> u;  // (out)
    std::vector<double> v;  // (in)
};

struct ModelConfig {
    int in_dim = 0;
    int hidden = 64;
    int n_cls = 2;
    int topo_dim = 200;  // 2 * res^2
    bool use_topo = true;
    double dropout_rate = 0.5;
    int sn_warmup = 30;
    uint64_t seed = 42;

    bool operator==(const ModelConfig&) const = default;
};

struct LossConfig {
    double l_pi = 1.0;
    double lambda_kld = 0.1;
    double stability_weight = 0.3;
    double eps = 1e-8;  // floor for the clamp>0 divisions
};

// Two GIN convolutions feeding a sum-pool, an optional spectrally
// normalized topological branch, and spectrally normalized fusion and
// classifier heads.
class TopoGinHkModel {
public:
    TopoGinHkModel() = default;
    explicit TopoGinHkModel(const ModelConfig& cfg);

    // x: (N, in_dim) node features; topo: (B, topo_dim) per-graph features
    // (ignored when the topo branch is disabled). rng drives dropout.
    Tensor forward(const Tensor& x, const std::vector<std::pair<int, int>>& directed_edges,
                   const std::vector<int>& batch_vector, int num_graphs, const Tensor& topo,
                   bool train, Rng& rng);

    std::vector<std::pair<std::string, Tensor>> named_parameters();
    std::vector<Tensor> parameters();
    // Non-trainable state (power-iteration vectors), for checkpointing.
    std::vector<std::pair<std::string, std::vector<double>*>> named_buffers();

    // Largest monitored operator norm across SN layers (should stay ~1).
    double max_effective_sn_norm() const;

    const ModelConfig& config() const { return cfg_; }
    GinConvLayer& gin1() { return gin1_; }
    GinConvLayer& gin2() { return gin2_; }
    SnLinear& topo_proj() { return topo_proj_; }
    SnLinear& fusion() { return fusion_; }
    SnLinear& classifier() { return classifier_; }

private:
    ModelConfig cfg_;
    GinConvLayer gin1_, gin2_;
    SnLinear topo_proj_;  // only when use_topo
    SnLinear fusion_;
    SnLinear classifier_;
};

// Hinge-plus-KL stability objective:
//   mean_i max(0, ||l_o,i - l_p,i||_2 - l_pi * max(||topo_i - topo_pert_i||_2, eps))
//   + lambda_kld * (KL(p_o || p_p) + KL(p_p || p_o))
// Differentiable with respect to both logit tensors.
Tensor hk_stability_loss(const Tensor& logits_o, const Tensor& logits_p, const Tensor& topo,
                         const Tensor& topo_pert, const LossConfig& cfg);

// Proxy robustness radius: mean over graphs of
// (p_top1 - p_top2) / (l_pi * max(||topo - topo_pert||_1, eps)).
// A diagnostic, not a formal certificate.
double certify_radius(const Tensor& logits, const Tensor& topo, const Tensor& topo_pert,
                      double l_pi, double eps = 1e-8);

}  // namespace topohk
