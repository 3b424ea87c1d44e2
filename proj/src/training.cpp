#include "topohk/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "topohk/error.hpp"

namespace topohk {

namespace {

// Stream ids for seed derivation (see Rng::fork).
constexpr uint64_t kStreamDropout = 11;
constexpr uint64_t kStreamShuffleBase = 100000;
constexpr uint64_t kStreamNoisyBase = 200000;
constexpr uint64_t kStreamFinalNoisy = 300000;

}  // namespace

std::string metrics_to_json(const EpochMetrics& m) {
    nlohmann::ordered_json j;
    j["epoch"] = m.epoch;
    j["train_loss"] = m.train_loss;
    j["clean_acc"] = m.clean_acc;
    j["noisy_acc"] = m.noisy_acc;
    j["cert_radius"] = m.cert_radius;
    j["best"] = m.best_clean_so_far;
    j["sn_norm_max"] = m.sn_norm_max;
    return j.dump();
}

AdamW::AdamW(std::vector<Tensor> params, AdamWParams hp) : params_(std::move(params)), hp_(hp) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
        m_[i].assign(params_[i].data().size(), 0.0);
        v_[i].assign(params_[i].data().size(), 0.0);
    }
}

void AdamW::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
        Tensor& p = params_[i];
        if (p.node()->grad.empty()) continue;
        auto& data = p.data();
        const auto& g = p.node()->grad;
        auto& m = m_[i];
        auto& v = v_[i];
        for (size_t k = 0; k < data.size(); ++k) {
            data[k] -= hp_.lr * hp_.weight_decay * data[k];
            m[k] = hp_.beta1 * m[k] + (1.0 - hp_.beta1) * g[k];
            v[k] = hp_.beta2 * v[k] + (1.0 - hp_.beta2) * g[k] * g[k];
            const double m_hat = m[k] / bc1;
            const double v_hat = v[k] / bc2;
            data[k] -= hp_.lr * m_hat / (std::sqrt(v_hat) + hp_.eps);
        }
    }
}

void AdamW::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

double clip_grad_norm(const std::vector<Tensor>& params, double max_norm) {
    double sq = 0.0;
    for (const auto& p : params)
        for (double g : p.node()->grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return 1.0;
    const double scale = max_norm / norm;
    for (const auto& p : params)
        for (double& g : p.node()->grad) g *= scale;
    return scale;
}

Loader::Loader(const DatasetBundle& bundle, std::vector<int> indices, int batch_size)
    : bundle_(&bundle), indices_(std::move(indices)), batch_size_(batch_size) {
    if (batch_size_ < 1) throw InvalidArgument("Loader: batch_size must be >= 1");
}

std::vector<std::vector<int>> Loader::batch_orders(std::optional<uint64_t> shuffle_seed) const {
    std::vector<int> order = indices_;
    if (shuffle_seed) {
        Rng rng(*shuffle_seed);
        rng.shuffle(order);
    }
    std::vector<std::vector<int>> out;
    for (size_t i = 0; i < order.size(); i += static_cast<size_t>(batch_size_)) {
        const size_t end = std::min(order.size(), i + static_cast<size_t>(batch_size_));
        out.emplace_back(order.begin() + static_cast<long>(i), order.begin() + static_cast<long>(end));
    }
    return out;
}

namespace {

Tensor batch_total_loss(const Batch& batch, TopoGinHkModel& model, const LossConfig& loss_cfg,
                        Rng& rng) {
    const int num_graphs = batch.num_graphs();
    Tensor logits_o = model.forward(batch.node_features, batch.edge_index, batch.batch_vector,
                                    num_graphs, batch.topo, /*train=*/true, rng);
    Tensor ce = nll_from_log_softmax(log_softmax(logits_o), batch.labels);
    if (loss_cfg.stability_weight == 0.0) return ce;
    Tensor logits_p = model.forward(batch.node_features, batch.edge_index, batch.batch_vector,
                                    num_graphs, batch.topo_pert, /*train=*/true, rng);
    Tensor stab = hk_stability_loss(logits_o, logits_p, batch.topo, batch.topo_pert, loss_cfg);
    return add(ce, scale(stab, loss_cfg.stability_weight));
}

int argmax_row(const std::vector<double>& data, int row, int cols) {
    int best = 0;
    for (int j = 1; j < cols; ++j)
        if (data[static_cast<size_t>(row) * cols + j] > data[static_cast<size_t>(row) * cols + best])
            best = j;
    return best;
}

}  // namespace

double batch_loss_value(const Batch& batch, TopoGinHkModel& model, const LossConfig& loss_cfg,
                        Rng dropout_rng) {
    // Train-mode forwards advance the power-iteration buffers; snapshot and
    // restore them so this helper is a pure function of (state, seed).
    auto buffers = model.named_buffers();
    std::vector<std::vector<double>> saved;
    saved.reserve(buffers.size());
    for (auto& [name, buf] : buffers) saved.push_back(*buf);
    const double value = batch_total_loss(batch, model, loss_cfg, dropout_rng).item();
    for (size_t i = 0; i < buffers.size(); ++i) *buffers[i].second = std::move(saved[i]);
    return value;
}

double train_epoch(const Loader& loader, TopoGinHkModel& model, AdamW& opt,
                   const TrainConfig& cfg, const LossConfig& loss_cfg, int epoch,
                   Rng& dropout_rng) {
    const Rng base(cfg.seed);
    const auto orders =
        loader.batch_orders(base.fork(kStreamShuffleBase + static_cast<uint64_t>(epoch)).root_seed());
    double total = 0.0;
    size_t total_graphs = 0;
    auto params = model.parameters();
    int batch_idx = 0;
    for (const auto& order : orders) {
        const Batch batch = batch_graphs(loader.bundle(), order);
        opt.zero_grad();
        Tensor loss = batch_total_loss(batch, model, loss_cfg, dropout_rng);
        const double value = loss.item();
        if (!std::isfinite(value))
            throw NumericError("train_epoch: non-finite loss at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_idx));
        backward(loss);
        clip_grad_norm(params, cfg.grad_clip_norm);
        opt.step();
        total += value * batch.num_graphs();
        total_graphs += order.size();
        ++batch_idx;
    }
    return total_graphs == 0 ? 0.0 : total / static_cast<double>(total_graphs);
}

double eval_acc(const Loader& loader, TopoGinHkModel& model, bool drop, double p, uint64_t seed) {
    const auto orders = loader.batch_orders(std::nullopt);
    const Rng base(seed);
    Rng idle(0);
    size_t correct = 0, total = 0;
    for (const auto& order : orders) {
        Batch batch;
        if (drop) {
            std::vector<std::vector<std::pair<int, int>>> thinned(order.size());
            for (size_t s = 0; s < order.size(); ++s) {
                const Graph& g = loader.bundle().graphs[static_cast<size_t>(order[s])];
                thinned[s] =
                    drop_edges(g.edges, p, base.fork(static_cast<uint64_t>(order[s])).root_seed());
            }
            batch = batch_graphs(loader.bundle(), order, thinned);
        } else {
            batch = batch_graphs(loader.bundle(), order);
        }
        const Tensor logits = model.forward(batch.node_features, batch.edge_index,
                                            batch.batch_vector, batch.num_graphs(), batch.topo,
                                            /*train=*/false, idle);
        const int cols = logits.dim(1);
        for (int i = 0; i < batch.num_graphs(); ++i) {
            if (argmax_row(logits.data(), i, cols) == batch.labels[static_cast<size_t>(i)])
                ++correct;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double eval_cert(const Loader& loader, TopoGinHkModel& model, double l_pi, double eps) {
    const auto orders = loader.batch_orders(std::nullopt);
    if (orders.empty()) return 0.0;
    Rng idle(0);
    double acc = 0.0;
    for (const auto& order : orders) {
        const Batch batch = batch_graphs(loader.bundle(), order);
        const Tensor logits = model.forward(batch.node_features, batch.edge_index,
                                            batch.batch_vector, batch.num_graphs(), batch.topo,
                                            /*train=*/false, idle);
        acc += certify_radius(logits, batch.topo, batch.topo_pert, l_pi, eps);
    }
    return acc / static_cast<double>(orders.size());
}

TrainingRun run_training(const DatasetBundle& bundle, const ModelConfig& mcfg,
                         const TrainConfig& tcfg, const LossConfig& lcfg,
                         const std::function<void(const EpochMetrics&)>& sink) {
    if (!bundle.features_attached())
        throw StateError("run_training: attach features before training");
    const auto [train_idx, test_idx] = stratified_split(bundle, tcfg.train_frac, tcfg.seed);
    const Loader train_loader(bundle, train_idx, tcfg.batch_size);
    const Loader test_loader(bundle, test_idx, tcfg.batch_size);

    TrainingRun run;
    run.model = TopoGinHkModel(mcfg);
    AdamW opt(run.model.parameters(),
              AdamWParams{tcfg.lr, 0.9, 0.999, 1e-8, tcfg.weight_decay});
    const Rng base(tcfg.seed);
    Rng dropout_rng = base.fork(kStreamDropout);

    auto evaluate = [&](int epoch, double loss, uint64_t noisy_stream) {
        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = loss;
        m.clean_acc = eval_acc(test_loader, run.model, false, 0.0, 0);
        m.noisy_acc = eval_acc(test_loader, run.model, true, tcfg.noisy_eval_drop_p,
                               base.fork(noisy_stream).root_seed());
        m.cert_radius = eval_cert(test_loader, run.model, lcfg.l_pi, lcfg.eps);
        m.sn_norm_max = run.model.max_effective_sn_norm();
        return m;
    };

    double last_loss = 0.0;
    for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
        last_loss = train_epoch(train_loader, run.model, opt, tcfg, lcfg, epoch, dropout_rng);
        if (epoch % tcfg.eval_every == 0) {
            EpochMetrics m =
                evaluate(epoch, last_loss, kStreamNoisyBase + static_cast<uint64_t>(epoch));
            run.best_clean = std::max(run.best_clean, m.clean_acc);
            m.best_clean_so_far = run.best_clean;
            run.eval_points.push_back(m);
            if (sink) sink(m);
        }
    }
    run.final_metrics = evaluate(tcfg.epochs, last_loss, kStreamFinalNoisy);
    run.final_metrics.best_clean_so_far = run.best_clean;
    return run;
}

namespace {

constexpr char kCkptMagic[8] = {'T', 'H', 'K', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw MismatchError("checkpoint truncated");
    return v;
}

void write_blob(std::ofstream& out, const std::string& name, const std::vector<int>& shape,
                const std::vector<double>& data) {
    write_pod(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<long>(name.size()));
    write_pod(out, static_cast<uint32_t>(shape.size()));
    for (int d : shape) write_pod(out, static_cast<int32_t>(d));
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<long>(data.size() * sizeof(double)));
}

}  // namespace

void save_checkpoint(const std::string& path, TopoGinHkModel& model,
                     const std::string& config_json) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kCkptMagic, sizeof(kCkptMagic));
    write_pod(out, static_cast<uint32_t>(1));
    const ModelConfig& cfg = model.config();
    write_pod(out, static_cast<int32_t>(cfg.in_dim));
    write_pod(out, static_cast<int32_t>(cfg.hidden));
    write_pod(out, static_cast<int32_t>(cfg.n_cls));
    write_pod(out, static_cast<int32_t>(cfg.topo_dim));
    write_pod(out, static_cast<uint8_t>(cfg.use_topo ? 1 : 0));
    write_pod(out, cfg.dropout_rate);
    write_pod(out, static_cast<int32_t>(cfg.sn_warmup));
    write_pod(out, static_cast<uint64_t>(cfg.seed));
    write_pod(out, static_cast<uint32_t>(config_json.size()));
    out.write(config_json.data(), static_cast<long>(config_json.size()));

    const auto params = model.named_parameters();
    const auto buffers = model.named_buffers();
    write_pod(out, static_cast<uint32_t>(params.size() + buffers.size()));
    for (const auto& [name, t] : params) write_blob(out, name, t.shape(), t.data());
    for (const auto& [name, buf] : buffers)
        write_blob(out, name, {static_cast<int>(buf->size())}, *buf);
    if (!out) throw IoError("write failed: " + path);
}

TopoGinHkModel load_checkpoint(const std::string& path, std::string* config_json) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("missing or unreadable file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0)
        throw MismatchError("not a checkpoint file: " + path);
    if (read_pod<uint32_t>(in) != 1) throw MismatchError("unsupported checkpoint version");

    ModelConfig cfg;
    cfg.in_dim = read_pod<int32_t>(in);
    cfg.hidden = read_pod<int32_t>(in);
    cfg.n_cls = read_pod<int32_t>(in);
    cfg.topo_dim = read_pod<int32_t>(in);
    cfg.use_topo = read_pod<uint8_t>(in) != 0;
    cfg.dropout_rate = read_pod<double>(in);
    cfg.sn_warmup = read_pod<int32_t>(in);
    cfg.seed = read_pod<uint64_t>(in);
    const uint32_t json_len = read_pod<uint32_t>(in);
    std::string json_str(json_len, '\0');
    in.read(json_str.data(), static_cast<long>(json_len));
    if (!in) throw MismatchError("checkpoint truncated");
    if (config_json) *config_json = json_str;

    TopoGinHkModel model(cfg);
    auto params = model.named_parameters();
    auto buffers = model.named_buffers();

    const uint32_t n_entries = read_pod<uint32_t>(in);
    if (n_entries != params.size() + buffers.size())
        throw MismatchError("checkpoint entry count does not match architecture");
    for (uint32_t e = 0; e < n_entries; ++e) {
        const uint32_t name_len = read_pod<uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), static_cast<long>(name_len));
        const uint32_t ndims = read_pod<uint32_t>(in);
        std::vector<int> shape(ndims);
        size_t count = 1;
        for (uint32_t d = 0; d < ndims; ++d) {
            shape[d] = read_pod<int32_t>(in);
            count *= static_cast<size_t>(shape[d]);
        }
        std::vector<double> data(count);
        in.read(reinterpret_cast<char*>(data.data()), static_cast<long>(count * sizeof(double)));
        if (!in) throw MismatchError("checkpoint truncated");

        bool placed = false;
        for (auto& [pname, t] : params) {
            if (pname != name) continue;
            if (t.shape() != shape)
                throw MismatchError("checkpoint parameter '" + name + "' has mismatched shape");
            t.data() = std::move(data);
            placed = true;
            break;
        }
        if (!placed) {
            for (auto& [bname, buf] : buffers) {
                if (bname != name) continue;
                if (buf->size() != count)
                    throw MismatchError("checkpoint buffer '" + name + "' has mismatched size");
                *buf = std::move(data);
                placed = true;
                break;
            }
        }
        if (!placed) throw MismatchError("checkpoint entry '" + name + "' not in architecture");
    }
    return model;
}

}  // namespace topohk
