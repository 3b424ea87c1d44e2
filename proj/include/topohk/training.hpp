#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "topohk/dataset.hpp"
#include "topohk/model.hpp"

namespace topohk {

struct TrainConfig {
    int epochs = 100;
    uint64_t seed = 42;
    double lr = 1e-3;
    double weight_decay = 0.01;
    int batch_size = 32;
    double grad_clip_norm = 1.0;
    int eval_every = 5;
    double noisy_eval_drop_p = 0.1;
    double train_frac = 0.8;
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double clean_acc = 0.0;
    double noisy_acc = 0.0;
    double cert_radius = 0.0;
    double best_clean_so_far = 0.0;
    double sn_norm_max = 0.0;
};

// One JSON object per eval point; field order is fixed so logs are
// byte-reproducible.
std::string metrics_to_json(const EpochMetrics& m);

struct AdamWParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

// AdamW with decoupled weight decay: the decay shrinks the parameter
// before the bias-corrected Adam delta is applied.
class AdamW {
public:
    AdamW(std::vector<Tensor> params, AdamWParams hp);
    void step();
    void zero_grad();
    int64_t steps_taken() const { return t_; }

private:
    std::vector<Tensor> params_;
    std::vector<std::vector<double>> m_, v_;
    AdamWParams hp_;
    int64_t t_ = 0;
};

// Scales all gradients by max_norm/norm when the global L2 norm exceeds
// max_norm; returns the applied scale (1.0 when untouched).
double clip_grad_norm(const std::vector<Tensor>& params, double max_norm);

// Deterministic mini-batch provider over a fixed subset of a bundle.
class Loader {
public:
    Loader(const DatasetBundle& bundle, std::vector<int> indices, int batch_size);

    // Consecutive batch index groups; shuffled first when a seed is given.
    std::vector<std::vector<int>> batch_orders(std::optional<uint64_t> shuffle_seed) const;
    const DatasetBundle& bundle() const { return *bundle_; }
    const std::vector<int>& indices() const { return indices_; }
    size_t num_graphs() const { return indices_.size(); }

private:
    const DatasetBundle* bundle_;
    std::vector<int> indices_;
    int batch_size_;
};

// One optimization pass: per batch, forward on topo and on topo_pert,
// CE + stability_weight * HK stability loss, backward, clip, step.
// Returns the graph-weighted mean loss. The perturbed forward is skipped
// when stability_weight is zero, which makes the objective exactly the
// plain cross-entropy baseline.
double train_epoch(const Loader& loader, TopoGinHkModel& model, AdamW& opt,
                   const TrainConfig& cfg, const LossConfig& loss_cfg, int epoch,
                   Rng& dropout_rng);

// Loss of a single batch without touching optimizer state; rng is taken by
// value so repeated calls see identical dropout masks.
double batch_loss_value(const Batch& batch, TopoGinHkModel& model, const LossConfig& loss_cfg,
                        Rng dropout_rng);

// Classification accuracy with dropout off; when drop is set, each graph's
// edge list is thinned with drop_edges under a per-graph stream forked off
// seed, so results are reproducible and independent of batch composition.
double eval_acc(const Loader& loader, TopoGinHkModel& model, bool drop, double p, uint64_t seed);

// Mean of per-batch certified-radius proxies; 0 on an empty loader.
double eval_cert(const Loader& loader, TopoGinHkModel& model, double l_pi, double eps = 1e-8);

struct TrainingRun {
    TopoGinHkModel model;
    std::vector<EpochMetrics> eval_points;
    EpochMetrics final_metrics;
    double best_clean = 0.0;
};

// Full training protocol: stratified split, T epochs, periodic
// clean/noisy/cert evaluation with a running best, final evaluation.
// The bundle must already have features attached.
TrainingRun run_training(const DatasetBundle& bundle, const ModelConfig& mcfg,
                         const TrainConfig& tcfg, const LossConfig& lcfg,
                         const std::function<void(const EpochMetrics&)>& sink = {});

// Versioned binary checkpoint: architecture record, caller-supplied config
// echo, then every named parameter and power-iteration buffer.
void save_checkpoint(const std::string& path, TopoGinHkModel& model,
                     const std::string& config_json);
// Rebuilds the model from the stored architecture; throws MismatchError on
// malformed or dimensionally inconsistent content.
TopoGinHkModel load_checkpoint(const std::string& path, std::string* config_json = nullptr);

}  // namespace topohk
