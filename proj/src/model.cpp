#include "topohk/model.hpp"

#include <algorithm>
#include <cmath>

#include "topohk/error.hpp"

namespace topohk {

namespace {

// Uniform in +-1/sqrt(fan_in), seeded.
Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
    int64_t n = 1;
    for (int d : shape) n *= d;
    std::vector<double> data(static_cast<size_t>(n));
    for (double& x : data) x = rng.uniform(-bound, bound);
    return Tensor::from_data(std::move(shape), std::move(data), /*requires_grad=*/true);
}

LinearLayer init_linear(int in, int out, Rng& rng) {
    LinearLayer layer;
    layer.weight = init_uniform({in, out}, in, rng);
    layer.bias = init_uniform({out}, in, rng);
    return layer;
}

double vec_norm(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc);
}

void normalize(std::vector<double>& x) {
    const double n = vec_norm(x);
    if (n > 0.0)
        for (double& v : x) v /= n;
}

// One u/v refinement for a weight stored (in, out); sigma = v^T W u.
void power_step(const std::vector<double>& w, int in, int out, std::vector<double>& u,
                std::vector<double>& v) {
    // v <- normalize(W u)
    for (int i = 0; i < in; ++i) {
        double acc = 0.0;
        for (int j = 0; j < out; ++j) acc += w[static_cast<size_t>(i) * out + j] * u[static_cast<size_t>(j)];
        v[static_cast<size_t>(i)] = acc;
    }
    normalize(v);
    // u <- normalize(W^T v)
    for (int j = 0; j < out; ++j) {
        double acc = 0.0;
        for (int i = 0; i < in; ++i) acc += w[static_cast<size_t>(i) * out + j] * v[static_cast<size_t>(i)];
        u[static_cast<size_t>(j)] = acc;
    }
    normalize(u);
}

double sigma_from(const std::vector<double>& w, int in, int out, const std::vector<double>& u,
                  const std::vector<double>& v) {
    double acc = 0.0;
    for (int i = 0; i < in; ++i) {
        double row = 0.0;
        for (int j = 0; j < out; ++j) row += w[static_cast<size_t>(i) * out + j] * u[static_cast<size_t>(j)];
        acc += v[static_cast<size_t>(i)] * row;
    }
    return acc;
}

}  // namespace

Tensor linear(const LinearLayer& layer, const Tensor& x) {
    return add(matmul(x, layer.weight), layer.bias);
}

Tensor gin_conv(const GinConvLayer& layer, const Tensor& x,
                const std::vector<std::pair<int, int>>& directed_edges) {
    Tensor self = layer.epsilon == 0.0 ? x : scale(x, 1.0 + layer.epsilon);
    Tensor agg = add(self, neighbor_sum(x, directed_edges));
    return linear(layer.l2, relu(linear(layer.l1, agg)));
}

SnLinear::SnLinear(int in, int out, Rng& rng, int warmup_steps) {
    weight = init_uniform({in, out}, in, rng);
    bias = init_uniform({out}, in, rng);
    u.assign(static_cast<size_t>(out), 0.0);
    v.assign(static_cast<size_t>(in), 0.0);
    for (double& x : u) x = rng.uniform(-1.0, 1.0);
    normalize(u);
    for (int step = 0; step < warmup_steps; ++step) power_iteration_step();
}

void SnLinear::power_iteration_step() {
    power_step(weight.data(), weight.dim(0), weight.dim(1), u, v);
}

double SnLinear::sigma_estimate() const {
    return sigma_from(weight.data(), weight.dim(0), weight.dim(1), u, v);
}

double SnLinear::effective_norm_estimate(int iters) const {
    const int in = weight.dim(0), out = weight.dim(1);
    const double sigma = std::max(sigma_estimate(), 1e-12);
    std::vector<double> w_eff(weight.data());
    for (double& x : w_eff) x /= sigma;
    std::vector<double> ue(static_cast<size_t>(out), 1.0 / std::sqrt(static_cast<double>(out)));
    std::vector<double> ve(static_cast<size_t>(in), 0.0);
    for (int step = 0; step < iters; ++step) power_step(w_eff, in, out, ue, ve);
    return sigma_from(w_eff, in, out, ue, ve);
}

Tensor SnLinear::forward(const Tensor& x, bool train) {
    if (train) power_iteration_step();
    const int in = weight.dim(0), out = weight.dim(1);
    // sigma enters the tape through fixed u/v, so gradients flow through
    // W / sigma(W) exactly as in the forward value.
    Tensor vt = Tensor::from_data({1, in}, v);
    Tensor uc = Tensor::from_data({out, 1}, u);
    Tensor sigma = clamp_min(matmul(matmul(vt, weight), uc), 1e-12);
    Tensor w_eff = div_by_scalar_tensor(weight, sigma);
    return add(matmul(x, w_eff), bias);
}

TopoGinHkModel::TopoGinHkModel(const ModelConfig& cfg) : cfg_(cfg) {
    if (cfg.in_dim <= 0 || cfg.hidden <= 0 || cfg.n_cls <= 0)
        throw InvalidArgument("TopoGinHkModel: dims must be positive");
    Rng rng(cfg.seed);
    gin1_.l1 = init_linear(cfg.in_dim, cfg.hidden, rng);
    gin1_.l2 = init_linear(cfg.hidden, cfg.hidden, rng);
    gin2_.l1 = init_linear(cfg.hidden, cfg.hidden, rng);
    gin2_.l2 = init_linear(cfg.hidden, cfg.hidden, rng);
    if (cfg.use_topo) {
        topo_proj_ = SnLinear(cfg.topo_dim, cfg.hidden, rng, cfg.sn_warmup);
        fusion_ = SnLinear(2 * cfg.hidden, cfg.hidden, rng, cfg.sn_warmup);
    } else {
        fusion_ = SnLinear(cfg.hidden, cfg.hidden, rng, cfg.sn_warmup);
    }
    classifier_ = SnLinear(cfg.hidden, cfg.n_cls, rng, cfg.sn_warmup);
}

Tensor TopoGinHkModel::forward(const Tensor& x,
                               const std::vector<std::pair<int, int>>& directed_edges,
                               const std::vector<int>& batch_vector, int num_graphs,
                               const Tensor& topo, bool train, Rng& rng) {
    Tensor h = gin_conv(gin1_, x, directed_edges);
    h = dropout(h, cfg_.dropout_rate, train, rng);
    h = gin_conv(gin2_, h, directed_edges);
    Tensor g = scatter_add_pool(h, batch_vector, num_graphs);
    if (cfg_.use_topo) {
        if (topo.shape().size() != 2 || topo.dim(0) != num_graphs || topo.dim(1) != cfg_.topo_dim)
            throw ShapeError("forward: topo must be (" + std::to_string(num_graphs) + "," +
                             std::to_string(cfg_.topo_dim) + ")");
        Tensor g_topo = topo_proj_.forward(relu(topo), train);
        g = concat_cols(g, g_topo);
    }
    g = fusion_.forward(g, train);
    g = elu(g);
    g = dropout(g, cfg_.dropout_rate, train, rng);
    return classifier_.forward(g, train);
}

std::vector<std::pair<std::string, Tensor>> TopoGinHkModel::named_parameters() {
    std::vector<std::pair<std::string, Tensor>> params;
    auto push_linear = [&](const std::string& name, LinearLayer& l) {
        params.emplace_back(name + ".weight", l.weight);
        params.emplace_back(name + ".bias", l.bias);
    };
    auto push_sn = [&](const std::string& name, SnLinear& l) {
        params.emplace_back(name + ".weight", l.weight);
        params.emplace_back(name + ".bias", l.bias);
    };
    push_linear("gin1.l1", gin1_.l1);
    push_linear("gin1.l2", gin1_.l2);
    push_linear("gin2.l1", gin2_.l1);
    push_linear("gin2.l2", gin2_.l2);
    if (cfg_.use_topo) push_sn("topo_proj", topo_proj_);
    push_sn("fusion", fusion_);
    push_sn("classifier", classifier_);
    return params;
}

std::vector<Tensor> TopoGinHkModel::parameters() {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_parameters()) out.push_back(t);
    return out;
}

std::vector<std::pair<std::string, std::vector<double>*>> TopoGinHkModel::named_buffers() {
    std::vector<std::pair<std::string, std::vector<double>*>> out;
    if (cfg_.use_topo) {
        out.emplace_back("topo_proj.u", &topo_proj_.u);
        out.emplace_back("topo_proj.v", &topo_proj_.v);
    }
    out.emplace_back("fusion.u", &fusion_.u);
    out.emplace_back("fusion.v", &fusion_.v);
    out.emplace_back("classifier.u", &classifier_.u);
    out.emplace_back("classifier.v", &classifier_.v);
    return out;
}

double TopoGinHkModel::max_effective_sn_norm() const {
    double worst = 0.0;
    if (cfg_.use_topo) worst = std::max(worst, topo_proj_.effective_norm_estimate());
    worst = std::max(worst, fusion_.effective_norm_estimate());
    worst = std::max(worst, classifier_.effective_norm_estimate());
    return worst;
}

Tensor hk_stability_loss(const Tensor& logits_o, const Tensor& logits_p, const Tensor& topo,
                         const Tensor& topo_pert, const LossConfig& cfg) {
    if (logits_o.dim(0) != logits_p.dim(0) || logits_o.dim(0) != topo.dim(0) ||
        topo.dim(0) != topo_pert.dim(0))
        throw ShapeError("hk_stability_loss: row counts disagree");

    Tensor dl = rowwise_l2(sub(logits_o, logits_p));
    Tensor dpi = clamp_min(rowwise_l2(sub(topo, topo_pert)), cfg.eps);
    Tensor loss = mean(hinge(sub(dl, scale(dpi, cfg.l_pi))));
    if (cfg.lambda_kld > 0.0) {
        Tensor p_log = log_softmax(logits_o);
        Tensor q_log = log_softmax(logits_p);
        Tensor kl = add(kl_divergence(p_log, q_log), kl_divergence(q_log, p_log));
        loss = add(loss, scale(kl, cfg.lambda_kld));
    }
    return loss;
}

double certify_radius(const Tensor& logits, const Tensor& topo, const Tensor& topo_pert,
                      double l_pi, double eps) {
    const int rows = logits.dim(0), cols = logits.dim(1);
    if (cols < 2) throw InvalidArgument("certify_radius: needs at least 2 classes");
    if (rows < 1) throw InvalidArgument("certify_radius: empty batch");
    if (topo.dim(0) != rows || topo_pert.dim(0) != rows)
        throw ShapeError("certify_radius: row counts disagree");

    const int dim = topo.dim(1);
    double acc = 0.0;
    for (int i = 0; i < rows; ++i) {
        const double* row = &logits.data()[static_cast<size_t>(i) * cols];
        double mx = row[0];
        for (int j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < cols; ++j) z += std::exp(row[j] - mx);
        double top1 = 0.0, top2 = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double p = std::exp(row[j] - mx) / z;
            if (p > top1) {
                top2 = top1;
                top1 = p;
            } else if (p > top2) {
                top2 = p;
            }
        }
        double dpi1 = 0.0;
        for (int j = 0; j < dim; ++j)
            dpi1 += std::abs(topo.data()[static_cast<size_t>(i) * dim + j] -
                             topo_pert.data()[static_cast<size_t>(i) * dim + j]);
        dpi1 = std::max(dpi1, eps);
        acc += (top1 - top2) / (l_pi * dpi1);
    }
    return acc / rows;
}

}  // namespace topohk
