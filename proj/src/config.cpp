#include "topohk/config.hpp"

#include <fstream>

#include <json.hpp>

#include "topohk/error.hpp"

namespace topohk {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("config: bad numeric value '" + value + "' for " + key);
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("config: bad integer value '" + value + "' for " + key);
    }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("config: bad integer value '" + value + "' for " + key);
    }
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "dataset.name") dataset_name = value;
    else if (key == "dataset.dir") data_dir = value;
    else if (key == "out.path") out_path = value;
    else if (key == "variant") {
        if (value != "baseline" && value != "topo" && value != "stability" && value != "full")
            throw InvalidArgument("config: unknown variant '" + value + "'");
        variant = value;
    } else if (key == "threads") threads = static_cast<int>(parse_long(key, value));
    else if (key == "pi.r0") pi.r0 = parse_double(key, value);
    else if (key == "pi.r1") pi.r1 = parse_double(key, value);
    else if (key == "pi.res") pi.res = static_cast<int>(parse_long(key, value));
    else if (key == "pi.sigma") pi.sigma = parse_double(key, value);
    else if (key == "perturb.p") perturb_p = parse_double(key, value);
    else if (key == "features.d_max") features.d_max = static_cast<int>(parse_long(key, value));
    else if (key == "loss.l_pi") loss.l_pi = parse_double(key, value);
    else if (key == "loss.lambda_kld") loss.lambda_kld = parse_double(key, value);
    else if (key == "loss.stability_weight") loss.stability_weight = parse_double(key, value);
    else if (key == "loss.eps") loss.eps = parse_double(key, value);
    else if (key == "train.epochs") train.epochs = static_cast<int>(parse_long(key, value));
    else if (key == "train.seed") train.seed = parse_u64(key, value);
    else if (key == "train.lr") train.lr = parse_double(key, value);
    else if (key == "train.weight_decay") train.weight_decay = parse_double(key, value);
    else if (key == "train.batch_size") train.batch_size = static_cast<int>(parse_long(key, value));
    else if (key == "train.grad_clip") train.grad_clip_norm = parse_double(key, value);
    else if (key == "train.eval_every") train.eval_every = static_cast<int>(parse_long(key, value));
    else if (key == "train.drop_p") train.noisy_eval_drop_p = parse_double(key, value);
    else if (key == "train.train_frac") train.train_frac = parse_double(key, value);
    else if (key == "model.hidden") model_hidden = static_cast<int>(parse_long(key, value));
    else if (key == "model.dropout") model_dropout = parse_double(key, value);
    else if (key == "model.sn_warmup") model_sn_warmup = static_cast<int>(parse_long(key, value));
    else throw InvalidArgument("config: unknown key '" + key + "'");
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing or unreadable config file: " + path);
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        set(key, value);
    }
}

std::string RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["dataset"]["name"] = dataset_name;
    j["dataset"]["dir"] = data_dir;
    j["out"]["path"] = out_path;
    j["variant"] = variant;
    j["threads"] = threads;
    j["pi"]["r0"] = pi.r0;
    j["pi"]["r1"] = pi.r1;
    j["pi"]["res"] = pi.res;
    j["pi"]["sigma"] = pi.sigma;
    j["perturb"]["p"] = perturb_p;
    j["features"]["d_max"] = features.d_max;
    j["loss"]["l_pi"] = loss.l_pi;
    j["loss"]["lambda_kld"] = loss.lambda_kld;
    j["loss"]["stability_weight"] = loss.stability_weight;
    j["loss"]["eps"] = loss.eps;
    j["train"]["epochs"] = train.epochs;
    j["train"]["seed"] = train.seed;
    j["train"]["lr"] = train.lr;
    j["train"]["weight_decay"] = train.weight_decay;
    j["train"]["batch_size"] = train.batch_size;
    j["train"]["grad_clip"] = train.grad_clip_norm;
    j["train"]["eval_every"] = train.eval_every;
    j["train"]["drop_p"] = train.noisy_eval_drop_p;
    j["train"]["train_frac"] = train.train_frac;
    j["model"]["hidden"] = model_hidden;
    j["model"]["dropout"] = model_dropout;
    j["model"]["sn_warmup"] = model_sn_warmup;
    j["effective"]["use_topo"] = variant_uses_topo();
    j["effective"]["stability_weight"] = effective_loss().stability_weight;
    j["effective"]["lambda_kld"] = effective_loss().lambda_kld;
    return j.dump();
}

bool RunConfig::variant_uses_topo() const { return variant == "topo" || variant == "full"; }

LossConfig RunConfig::effective_loss() const {
    LossConfig out = loss;
    if (variant == "baseline" || variant == "topo") {
        out.stability_weight = 0.0;
        out.lambda_kld = 0.0;
    }
    return out;
}

ModelConfig RunConfig::model_config(const DatasetBundle& bundle) const {
    if (!bundle.features_attached())
        throw StateError("model_config: dataset features not attached");
    ModelConfig mc;
    mc.in_dim = bundle.feature_dim;
    mc.hidden = model_hidden;
    mc.n_cls = bundle.num_classes;
    mc.topo_dim = bundle.topo_dim;
    mc.use_topo = variant_uses_topo();
    mc.dropout_rate = model_dropout;
    mc.sn_warmup = model_sn_warmup;
    mc.seed = train.seed;
    return mc;
}

}  // namespace topohk
