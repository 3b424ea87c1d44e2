// topohk command line: feature precomputation, training, evaluation and
// certification over the shared-library C interface.
//
// Exit codes: 0 success, 2 ingestion/I-O or bad input, 3 numeric failure,
// 4 checkpoint/architecture mismatch.

#include <cstdio>
#include <cstdlib>
#include <chrono>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topohk/topohk.h"

namespace {

struct ConfigHandle {
    thk_config* cfg = thk_config_new();
    ~ConfigHandle() { thk_config_free(cfg); }
};

struct DatasetHandle {
    thk_dataset* ds = nullptr;
    ~DatasetHandle() { thk_dataset_free(ds); }
};

struct ModelHandle {
    thk_model* model = nullptr;
    ~ModelHandle() { thk_model_free(model); }
};

int exit_code_for(thk_status status) {
    switch (status) {
        case THK_OK: return 0;
        case THK_ERR_NUMERIC: return 3;
        case THK_ERR_MISMATCH: return 4;
        default: return 2;  // ingestion / I-O / bad input
    }
}

[[noreturn]] void die(thk_status status, const char* where) {
    std::fprintf(stderr, "topohk: %s: %s\n", where, thk_last_error());
    std::exit(exit_code_for(status));
}

void check(thk_status status, const char* where) {
    if (status != THK_OK) die(status, where);
}

// One CLI flag bound to one config key; only flags the user actually passed
// are applied, so precedence is defaults < config file < command line.
struct FlagBinding {
    CLI::Option* option;
    std::string key;
    std::string* value;
};

struct CommonFlags {
    std::string config_file;
    std::vector<std::unique_ptr<std::string>> storage;
    std::vector<FlagBinding> bindings;

    void bind(CLI::App* cmd, const std::string& flag, const std::string& key,
              const std::string& help) {
        storage.push_back(std::make_unique<std::string>());
        auto* holder = storage.back().get();
        auto* opt = cmd->add_option(flag, *holder, help);
        bindings.push_back({opt, key, holder});
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "key=value config file (lowest precedence)");
        bind(cmd, "--dataset", "dataset.name", "TUDataset name, e.g. MUTAG");
        bind(cmd, "--data-dir", "dataset.dir", "directory holding <name>/<name>_*.txt");
        bind(cmd, "--r0", "pi.r0", "filtration window lower bound");
        bind(cmd, "--r1", "pi.r1", "filtration window upper bound");
        bind(cmd, "--res", "pi.res", "persistence image pixels per axis");
        bind(cmd, "--sigma", "pi.sigma", "persistence image bandwidth");
        bind(cmd, "--perturb-p", "perturb.p", "edge flip probability for topo_pert");
        bind(cmd, "--drop-p", "train.drop_p", "edge drop probability for noisy eval");
        bind(cmd, "--d-max", "features.d_max", "degree clip for one-hot fallback features");
        bind(cmd, "--hidden", "model.hidden", "hidden width of every layer");
        bind(cmd, "--l-pi", "loss.l_pi", "Lipschitz constant L_pi");
        bind(cmd, "--lambda-kld", "loss.lambda_kld", "symmetric KL weight");
        bind(cmd, "--stability-weight", "loss.stability_weight", "stability loss weight");
        bind(cmd, "--epochs", "train.epochs", "training epochs");
        bind(cmd, "--seed", "train.seed", "master RNG seed");
        bind(cmd, "--lr", "train.lr", "AdamW learning rate");
        bind(cmd, "--batch-size", "train.batch_size", "graphs per mini-batch");
        bind(cmd, "--variant", "variant", "baseline | topo | stability | full");
        bind(cmd, "--threads", "threads", "per-graph feature computation threads");
        bind(cmd, "--out", "out.path", "output path (cache file or run prefix)");
    }

    void apply(thk_config* cfg) {
        if (const char* env = std::getenv("TOPOHK_DATA_DIR"))
            check(thk_config_set(cfg, "dataset.dir", env), "config");
        if (!config_file.empty()) check(thk_config_load_file(cfg, config_file.c_str()), "config");
        for (const auto& b : bindings)
            if (b.option->count() > 0) check(thk_config_set(cfg, b.key.c_str(), b.value->c_str()), "config");
    }

    // Value of a flag only when the user passed it explicitly.
    const std::string* given(const std::string& key) const {
        for (const auto& b : bindings)
            if (b.key == key && b.option->count() > 0) return b.value;
        return nullptr;
    }
};

nlohmann::ordered_json config_json(const thk_config* cfg) {
    char* echo = nullptr;
    check(thk_config_dump_json(cfg, &echo), "config");
    auto parsed = nlohmann::ordered_json::parse(echo);
    thk_string_free(echo);
    return parsed;
}

// Resolved-config echo: every run is reproducible from this line alone.
void echo_config(const thk_config* cfg) {
    std::printf("%s\n", config_json(cfg).dump().c_str());
}

std::string get_key(const thk_config* cfg, const std::string& a, const std::string& b) {
    const auto j = config_json(cfg);
    const auto& v = b.empty() ? j.at(a) : j.at(a).at(b);
    return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string default_cache_path(const thk_config* cfg) {
    return get_key(cfg, "dataset", "dir") + "/" + get_key(cfg, "dataset", "name") + ".thkfeat";
}

DatasetHandle open_with_features(const thk_config* cfg, const std::string& cache_path,
                                 bool compute, bool save_cache) {
    DatasetHandle ds;
    check(thk_dataset_open(cfg, &ds.ds), "dataset");
    if (!compute && std::ifstream(cache_path).good()) {
        check(thk_dataset_load_feature_cache(ds.ds, cfg, cache_path.c_str()), "feature cache");
        return ds;
    }
    if (!compute) {
        std::fprintf(stderr,
                     "topohk: feature cache '%s' not found; pass --compute-features or run "
                     "`topohk features` first\n",
                     cache_path.c_str());
        std::exit(2);
    }
    check(thk_dataset_attach_features(ds.ds, cfg), "feature computation");
    if (save_cache)
        check(thk_dataset_save_feature_cache(ds.ds, cfg, cache_path.c_str()), "feature cache");
    return ds;
}

void print_metrics_line(void* user, const char* line) {
    std::printf("%s\n", line);
    if (user) *static_cast<std::ofstream*>(user) << line << "\n";
}

int cmd_features(CommonFlags& flags, const std::string& dump_diagrams) {
    ConfigHandle cfg;
    flags.apply(cfg.cfg);
    echo_config(cfg.cfg);
    const std::string out = get_key(cfg.cfg, "out", "path").empty()
                                ? default_cache_path(cfg.cfg)
                                : get_key(cfg.cfg, "out", "path");

    const auto started = std::chrono::steady_clock::now();
    DatasetHandle ds;
    check(thk_dataset_open(cfg.cfg, &ds.ds), "dataset");
    check(thk_dataset_attach_features(ds.ds, cfg.cfg), "feature computation");
    check(thk_dataset_save_feature_cache(ds.ds, cfg.cfg, out.c_str()), "feature cache");
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!dump_diagrams.empty()) {
        char* text = nullptr;
        check(thk_dataset_dump_diagrams(ds.ds, cfg.cfg, &text), "diagram dump");
        std::ofstream dump(dump_diagrams);
        dump << text;
        thk_string_free(text);
    }

    int n = 0, classes = 0, fdim = 0, tdim = 0;
    check(thk_dataset_info(ds.ds, &n, &classes, &fdim, &tdim), "dataset");
    std::printf("features: %d graphs, %d classes, feature_dim=%d, topo_dim=%d -> %s (%.2fs)\n", n,
                classes, fdim, tdim, out.c_str(), seconds);
    return 0;
}

int cmd_train(CommonFlags& flags, const std::string& cache_flag, bool compute_features) {
    ConfigHandle cfg;
    flags.apply(cfg.cfg);
    echo_config(cfg.cfg);
    const std::string cache = cache_flag.empty() ? default_cache_path(cfg.cfg) : cache_flag;
    DatasetHandle ds = open_with_features(cfg.cfg, cache, compute_features, compute_features);

    std::string prefix = get_key(cfg.cfg, "out", "path");
    if (prefix.empty())
        prefix = get_key(cfg.cfg, "dataset", "name") + "_" + get_key(cfg.cfg, "variant", "") +
                 "_s" + get_key(cfg.cfg, "train", "seed");

    std::ofstream metrics(prefix + ".metrics.jsonl");
    if (!metrics) {
        std::fprintf(stderr, "topohk: cannot write %s.metrics.jsonl\n", prefix.c_str());
        return 2;
    }

    ModelHandle model;
    double best = 0.0;
    char* final_json = nullptr;
    check(thk_train(ds.ds, cfg.cfg, print_metrics_line, &metrics, &model.model, &best,
                    &final_json),
          "training");

    nlohmann::ordered_json summary;
    summary["final"] = nlohmann::ordered_json::parse(final_json);
    thk_string_free(final_json);
    summary["best"] = best;
    summary["config"] = config_json(cfg.cfg);
    const std::string summary_line = summary.dump();
    std::printf("%s\n", summary_line.c_str());
    metrics << summary_line << "\n";
    metrics.close();

    check(thk_model_save(model.model, cfg.cfg, (prefix + ".ckpt").c_str()), "checkpoint");
    std::fprintf(stderr, "topohk: wrote %s.ckpt and %s.metrics.jsonl\n", prefix.c_str(),
                 prefix.c_str());
    return 0;
}

int cmd_eval(CommonFlags& flags, const std::string& checkpoint, const std::string& cache_flag,
             bool compute_features, bool certify) {
    ConfigHandle cfg;
    flags.apply(cfg.cfg);
    echo_config(cfg.cfg);
    const std::string cache = cache_flag.empty() ? default_cache_path(cfg.cfg) : cache_flag;
    DatasetHandle ds = open_with_features(cfg.cfg, cache, compute_features, false);

    ModelHandle model;
    check(thk_model_load(checkpoint.c_str(), &model.model), "checkpoint");

    nlohmann::ordered_json report;
    if (certify) {
        double radius = 0.0;
        check(thk_eval_certify(model.model, ds.ds, cfg.cfg, &radius), "certify");
        report["cert_radius"] = radius;
    } else {
        double clean = 0.0;
        check(thk_eval_accuracy(model.model, ds.ds, cfg.cfg, 0, 0.0, 0, &clean), "eval");
        report["clean_acc"] = clean;
        // Noisy accuracy only when --drop-p was given (and nonzero).
        const std::string* drop_flag = flags.given("train.drop_p");
        const double drop_p = drop_flag ? std::stod(*drop_flag) : 0.0;
        if (drop_p > 0.0) {
            const auto seed =
                static_cast<unsigned long long>(std::stoull(get_key(cfg.cfg, "train", "seed")));
            double noisy = 0.0;
            check(thk_eval_accuracy(model.model, ds.ds, cfg.cfg, 1, drop_p, seed, &noisy), "eval");
            report["noisy_acc"] = noisy;
            report["drop_p"] = drop_p;
        }
    }
    std::printf("%s\n", report.dump().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topologically-stabilized graph classification"};
    app.require_subcommand(1);

    CommonFlags features_flags, train_flags, eval_flags, certify_flags;
    std::string dump_diagrams, train_cache, eval_cache, certify_cache;
    std::string eval_checkpoint, certify_checkpoint;
    bool train_compute = false, eval_compute = false, certify_compute = false;

    auto* features = app.add_subcommand("features", "Precompute the topological feature cache");
    features_flags.add_to(features);
    features->add_option("--dump-diagrams", dump_diagrams,
                         "also write raw persistence diagrams to this file");

    auto* train = app.add_subcommand("train", "Train a model and write checkpoint + metrics");
    train_flags.add_to(train);
    train->add_option("--features-cache", train_cache, "feature cache path");
    train->add_flag("--compute-features", train_compute, "compute features when cache is absent");

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
    eval_flags.add_to(eval);
    eval->add_option("--checkpoint", eval_checkpoint, "checkpoint path")->required();
    eval->add_option("--features-cache", eval_cache, "feature cache path");
    eval->add_flag("--compute-features", eval_compute, "compute features when cache is absent");

    auto* certify = app.add_subcommand("certify", "Report the mean certified-radius proxy");
    certify_flags.add_to(certify);
    certify->add_option("--checkpoint", certify_checkpoint, "checkpoint path")->required();
    certify->add_option("--features-cache", certify_cache, "feature cache path");
    certify->add_flag("--compute-features", certify_compute,
                      "compute features when cache is absent");

    CLI11_PARSE(app, argc, argv);

    if (features->parsed()) return cmd_features(features_flags, dump_diagrams);
    if (train->parsed()) return cmd_train(train_flags, train_cache, train_compute);
    if (eval->parsed())
        return cmd_eval(eval_flags, eval_checkpoint, eval_cache, eval_compute, false);
    return cmd_eval(certify_flags, certify_checkpoint, certify_cache, certify_compute, true);
}
