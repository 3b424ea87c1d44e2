/* C interface to the topohk library: TUDataset ingestion, topological
 * feature extraction, TopoGIN-HK training, evaluation and the certified
 * radius proxy, behind opaque handles.
 *
 * Every function that can fail returns a thk_status; on failure
 * thk_last_error() yields a message for the calling thread. Handles are
 * freed with their matching *_free function; strings returned by the
 * library are released with thk_string_free.
 */
#ifndef TOPOHK_H
#define TOPOHK_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum thk_status {
    THK_OK = 0,
    THK_ERR_INVALID = 1,  /* bad arguments, unknown config key, misuse   */
    THK_ERR_IO = 2,       /* ingestion, parse or file I/O failure        */
    THK_ERR_NUMERIC = 3,  /* NaN/Inf where finite values are required    */
    THK_ERR_MISMATCH = 4  /* checkpoint/architecture disagreement        */
} thk_status;

typedef struct thk_config thk_config;
typedef struct thk_dataset thk_dataset;
typedef struct thk_model thk_model;

/* Message of the most recent failure on this thread ("" if none). The
 * pointer stays valid until the next failing call on the same thread. */
const char* thk_last_error(void);

void thk_string_free(char* s);

/* --- configuration ----------------------------------------------------- */

thk_config* thk_config_new(void);
void thk_config_free(thk_config* cfg);
/* Keys as documented in the README, e.g. "pi.r0", "train.epochs",
 * "dataset.name", "variant". */
thk_status thk_config_set(thk_config* cfg, const char* key, const char* value);
/* key=value / [section] config file. */
thk_status thk_config_load_file(thk_config* cfg, const char* path);
/* JSON echo of the fully resolved configuration (caller frees). */
thk_status thk_config_dump_json(const thk_config* cfg, char** out_json);

/* --- datasets ----------------------------------------------------------- */

/* Parse <dataset.dir>/<dataset.name> in TUDataset text format. */
thk_status thk_dataset_open(const thk_config* cfg, thk_dataset** out);
void thk_dataset_free(thk_dataset* ds);
/* Compute per-graph topo / topo_pert persistence-image features. */
thk_status thk_dataset_attach_features(thk_dataset* ds, const thk_config* cfg);
thk_status thk_dataset_save_feature_cache(const thk_dataset* ds, const thk_config* cfg,
                                          const char* path);
thk_status thk_dataset_load_feature_cache(thk_dataset* ds, const thk_config* cfg,
                                          const char* path);
thk_status thk_dataset_info(const thk_dataset* ds, int* num_graphs, int* num_classes,
                            int* feature_dim, int* topo_dim);
/* Text dump of all persistence diagrams ("graph <i>" headers, then one
 * "dim birth death" line per interval; caller frees). */
thk_status thk_dataset_dump_diagrams(const thk_dataset* ds, const thk_config* cfg,
                                     char** out_text);

/* --- training / evaluation ---------------------------------------------- */

typedef void (*thk_metrics_fn)(void* user, const char* json_line);

/* Train per the configured protocol; emits one JSON metrics line per eval
 * point through the callback (may be NULL). On success returns a model
 * handle and, optionally, the best clean accuracy seen at eval points and
 * a JSON object with the final-epoch metrics (caller frees). */
thk_status thk_train(const thk_dataset* ds, const thk_config* cfg, thk_metrics_fn metrics_cb,
                     void* user, thk_model** out_model, double* out_best_clean,
                     char** out_final_metrics_json);

void thk_model_free(thk_model* model);
thk_status thk_model_save(const thk_model* model, const thk_config* cfg, const char* path);
thk_status thk_model_load(const char* path, thk_model** out);

/* Accuracy on the configured test split. When drop_edges is nonzero each
 * graph loses edges independently with probability drop_p under the given
 * seed. Fails with THK_ERR_MISMATCH if the model does not fit the dataset. */
thk_status thk_eval_accuracy(const thk_model* model, const thk_dataset* ds,
                             const thk_config* cfg, int drop_edges, double drop_p,
                             unsigned long long seed, double* out_acc);

/* Mean certified-radius proxy over the test split. */
thk_status thk_eval_certify(const thk_model* model, const thk_dataset* ds,
                            const thk_config* cfg, double* out_radius);

#ifdef __cplusplus
}
#endif

#endif /* TOPOHK_H */
