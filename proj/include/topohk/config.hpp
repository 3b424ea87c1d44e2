#pragma once

#include <string>

#include "topohk/dataset.hpp"
#include "topohk/model.hpp"
#include "topohk/training.hpp"

namespace topohk {

// Everything a run needs, addressable by string keys (the CLI flags and the
// config-file lines map onto the same keys). Precedence is handled by the
// caller: defaults, then file, then explicit sets.
struct RunConfig {
    std::string dataset_name;
    std::string data_dir = ".";
    std::string out_path;
    std::string variant = "full";  // baseline | topo | stability | full
    int threads = 1;

    PiParams pi;                   // r0 0.4, r1 1.2, res 10, sigma 0.1
    double perturb_p = 0.05;       // training-time feature perturbation
    FeatureConfig features;        // d_max 10
    LossConfig loss;               // l_pi 1.0, lambda_kld 0.1, weight 0.3
    TrainConfig train;             // epochs 100, lr 1e-3, batch 32, ...
    int model_hidden = 64;
    double model_dropout = 0.5;
    int model_sn_warmup = 30;

    // Set a single key, e.g. "pi.r0" or "train.epochs"; throws
    // InvalidArgument for unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);

    // key=value lines with optional [section] headers and # comments.
    void load_file(const std::string& path);

    // Deterministic echo of every field, defaults included.
    std::string to_json() const;

    // Model/loss wiring for the selected ablation variant:
    //   baseline  - structure branch only, no stability term
    //   topo      - structure + topological branch, no stability term
    //   stability - structure branch only, stability term on
    //   full      - both
    bool variant_uses_topo() const;
    LossConfig effective_loss() const;
    ModelConfig model_config(const DatasetBundle& bundle) const;
};

}  // namespace topohk
