#include "topohk/topohk.h"

#include <cstring>
#include <memory>
#include <string>

#include "topohk/config.hpp"
#include "topohk/dataset.hpp"
#include "topohk/error.hpp"
#include "topohk/persistence.hpp"
#include "topohk/training.hpp"

using topohk::DatasetBundle;
using topohk::RunConfig;
using topohk::TopoGinHkModel;

struct thk_config {
    RunConfig cfg;
};

struct thk_dataset {
    DatasetBundle bundle;
};

struct thk_model {
    TopoGinHkModel model;
};

namespace {

thread_local std::string g_last_error;

thk_status fail(thk_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

thk_status status_for(const std::exception& e) {
    if (dynamic_cast<const topohk::IoError*>(&e)) return THK_ERR_IO;
    if (dynamic_cast<const topohk::FormatError*>(&e)) return THK_ERR_IO;
    if (dynamic_cast<const topohk::NumericError*>(&e)) return THK_ERR_NUMERIC;
    if (dynamic_cast<const topohk::MismatchError*>(&e)) return THK_ERR_MISMATCH;
    return THK_ERR_INVALID;
}

template <typename Fn>
thk_status guarded(Fn&& fn) {
    try {
        fn();
        return THK_OK;
    } catch (const std::exception& e) {
        return fail(status_for(e), e.what());
    } catch (...) {
        return fail(THK_ERR_INVALID, "unknown error");
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

thk_status require(bool ok, const char* what) {
    return ok ? THK_OK : fail(THK_ERR_INVALID, std::string("null argument: ") + what);
}

// Consistency between a loaded model and the dataset it is applied to.
void check_model_fits(const TopoGinHkModel& model, const DatasetBundle& bundle) {
    const auto& mc = model.config();
    if (mc.in_dim != bundle.feature_dim)
        throw topohk::MismatchError("model input dim " + std::to_string(mc.in_dim) +
                                    " != dataset feature dim " +
                                    std::to_string(bundle.feature_dim));
    if (mc.n_cls != bundle.num_classes)
        throw topohk::MismatchError("model class count " + std::to_string(mc.n_cls) +
                                    " != dataset classes " + std::to_string(bundle.num_classes));
    if (mc.use_topo && mc.topo_dim != bundle.topo_dim)
        throw topohk::MismatchError("model topo dim " + std::to_string(mc.topo_dim) +
                                    " != dataset topo dim " + std::to_string(bundle.topo_dim));
}

topohk::Loader test_loader(const DatasetBundle& bundle, const RunConfig& cfg) {
    auto [train_idx, test_idx] =
        topohk::stratified_split(bundle, cfg.train.train_frac, cfg.train.seed);
    (void)train_idx;
    return topohk::Loader(bundle, test_idx, cfg.train.batch_size);
}

}  // namespace

extern "C" {

const char* thk_last_error(void) { return g_last_error.c_str(); }

void thk_string_free(char* s) { delete[] s; }

thk_config* thk_config_new(void) { return new thk_config{}; }

void thk_config_free(thk_config* cfg) { delete cfg; }

thk_status thk_config_set(thk_config* cfg, const char* key, const char* value) {
    if (auto rc = require(cfg && key && value, "thk_config_set")) return rc;
    return guarded([&] { cfg->cfg.set(key, value); });
}

thk_status thk_config_load_file(thk_config* cfg, const char* path) {
    if (auto rc = require(cfg && path, "thk_config_load_file")) return rc;
    return guarded([&] { cfg->cfg.load_file(path); });
}

thk_status thk_config_dump_json(const thk_config* cfg, char** out_json) {
    if (auto rc = require(cfg && out_json, "thk_config_dump_json")) return rc;
    return guarded([&] { *out_json = copy_string(cfg->cfg.to_json()); });
}

thk_status thk_dataset_open(const thk_config* cfg, thk_dataset** out) {
    if (auto rc = require(cfg && out, "thk_dataset_open")) return rc;
    return guarded([&] {
        if (cfg->cfg.dataset_name.empty())
            throw topohk::InvalidArgument("dataset.name is not set");
        auto ds = std::make_unique<thk_dataset>();
        ds->bundle = topohk::parse_tudataset(cfg->cfg.data_dir, cfg->cfg.dataset_name);
        *out = ds.release();
    });
}

void thk_dataset_free(thk_dataset* ds) { delete ds; }

thk_status thk_dataset_attach_features(thk_dataset* ds, const thk_config* cfg) {
    if (auto rc = require(ds && cfg, "thk_dataset_attach_features")) return rc;
    return guarded([&] {
        topohk::attach_hk_features(ds->bundle, cfg->cfg.pi,
                                   {cfg->cfg.perturb_p, cfg->cfg.train.seed}, cfg->cfg.features,
                                   cfg->cfg.threads);
    });
}

thk_status thk_dataset_save_feature_cache(const thk_dataset* ds, const thk_config* cfg,
                                          const char* path) {
    if (auto rc = require(ds && cfg && path, "thk_dataset_save_feature_cache")) return rc;
    return guarded([&] {
        topohk::write_feature_cache(ds->bundle, cfg->cfg.pi,
                                    {cfg->cfg.perturb_p, cfg->cfg.train.seed}, cfg->cfg.features,
                                    path);
    });
}

thk_status thk_dataset_load_feature_cache(thk_dataset* ds, const thk_config* cfg,
                                          const char* path) {
    if (auto rc = require(ds && cfg && path, "thk_dataset_load_feature_cache")) return rc;
    return guarded([&] {
        topohk::load_feature_cache(ds->bundle, cfg->cfg.pi,
                                   {cfg->cfg.perturb_p, cfg->cfg.train.seed}, cfg->cfg.features,
                                   path);
    });
}

thk_status thk_dataset_info(const thk_dataset* ds, int* num_graphs, int* num_classes,
                            int* feature_dim, int* topo_dim) {
    if (auto rc = require(ds != nullptr, "thk_dataset_info")) return rc;
    if (num_graphs) *num_graphs = static_cast<int>(ds->bundle.graphs.size());
    if (num_classes) *num_classes = ds->bundle.num_classes;
    if (feature_dim) *feature_dim = ds->bundle.feature_dim;
    if (topo_dim) *topo_dim = ds->bundle.topo_dim;
    return THK_OK;
}

thk_status thk_dataset_dump_diagrams(const thk_dataset* ds, const thk_config* cfg,
                                     char** out_text) {
    if (auto rc = require(ds && cfg && out_text, "thk_dataset_dump_diagrams")) return rc;
    return guarded([&] {
        std::string text;
        for (size_t i = 0; i < ds->bundle.graphs.size(); ++i) {
            const auto dist = topohk::floyd_warshall(ds->bundle.graphs[i].adjacency());
            const auto complex = topohk::build_rips(dist, cfg->cfg.pi.r1);
            auto [h0, h1] = topohk::compute_persistence(complex);
            text += "graph " + std::to_string(i) + "\n";
            text += topohk::format_diagram(h0);
            text += topohk::format_diagram(h1);
        }
        *out_text = copy_string(text);
    });
}

thk_status thk_train(const thk_dataset* ds, const thk_config* cfg, thk_metrics_fn metrics_cb,
                     void* user, thk_model** out_model, double* out_best_clean,
                     char** out_final_metrics_json) {
    if (auto rc = require(ds && cfg && out_model, "thk_train")) return rc;
    return guarded([&] {
        const RunConfig& run_cfg = cfg->cfg;
        auto sink = [&](const topohk::EpochMetrics& m) {
            if (metrics_cb) metrics_cb(user, topohk::metrics_to_json(m).c_str());
        };
        topohk::TrainingRun run =
            topohk::run_training(ds->bundle, run_cfg.model_config(ds->bundle), run_cfg.train,
                                 run_cfg.effective_loss(), sink);
        if (out_best_clean) *out_best_clean = run.best_clean;
        if (out_final_metrics_json)
            *out_final_metrics_json = copy_string(topohk::metrics_to_json(run.final_metrics));
        *out_model = new thk_model{std::move(run.model)};
    });
}

void thk_model_free(thk_model* model) { delete model; }

thk_status thk_model_save(const thk_model* model, const thk_config* cfg, const char* path) {
    if (auto rc = require(model && cfg && path, "thk_model_save")) return rc;
    return guarded([&] {
        save_checkpoint(path, const_cast<thk_model*>(model)->model, cfg->cfg.to_json());
    });
}

thk_status thk_model_load(const char* path, thk_model** out) {
    if (auto rc = require(path && out, "thk_model_load")) return rc;
    return guarded([&] { *out = new thk_model{topohk::load_checkpoint(path)}; });
}

thk_status thk_eval_accuracy(const thk_model* model, const thk_dataset* ds,
                             const thk_config* cfg, int drop_edges, double drop_p,
                             unsigned long long seed, double* out_acc) {
    if (auto rc = require(model && ds && cfg && out_acc, "thk_eval_accuracy")) return rc;
    return guarded([&] {
        if (!ds->bundle.features_attached())
            throw topohk::StateError("dataset features not attached");
        check_model_fits(model->model, ds->bundle);
        const auto loader = test_loader(ds->bundle, cfg->cfg);
        *out_acc = topohk::eval_acc(loader, const_cast<thk_model*>(model)->model,
                                    drop_edges != 0, drop_p, seed);
    });
}

thk_status thk_eval_certify(const thk_model* model, const thk_dataset* ds,
                            const thk_config* cfg, double* out_radius) {
    if (auto rc = require(model && ds && cfg && out_radius, "thk_eval_certify")) return rc;
    return guarded([&] {
        if (!ds->bundle.features_attached())
            throw topohk::StateError("dataset features not attached");
        check_model_fits(model->model, ds->bundle);
        const auto loader = test_loader(ds->bundle, cfg->cfg);
        *out_radius = topohk::eval_cert(loader, const_cast<thk_model*>(model)->model,
                                        cfg->cfg.loss.l_pi, cfg->cfg.loss.eps);
    });
}

}  // extern "C"
