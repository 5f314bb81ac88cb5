/* eplab — semi-supervised learning laboratory.
 *
 * C interface over the C++ core: synthetic multi-descriptor histogram
 * datasets, seeded train/unlabeled/test splits with a leakage switch, and a
 * grid runner for the bundled classification methods (linear/chi-square SVM,
 * graph-regularized kernel ridge, ensemble-projection feature maps).
 *
 * All functions return eplab_status; on failure eplab_last_error() holds a
 * message for the calling thread. Handles are opaque and freed with their
 * matching *_free function.
 */
#ifndef EPLAB_H
#define EPLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eplab_status {
    EPLAB_OK = 0,
    EPLAB_ERROR_USAGE = 2,    /* bad arguments, malformed config, domain errors */
    EPLAB_ERROR_IO = 3,       /* file read/write failure */
    EPLAB_ERROR_INTERNAL = 4  /* invariant violation or numerical failure */
} eplab_status;

typedef struct eplab_dataset eplab_dataset;

/* Tool version string, e.g. "0.1.0". */
const char* eplab_version(void);

/* Message from the most recent failing call on this thread ("" if none). */
const char* eplab_last_error(void);

typedef struct eplab_synth_spec {
    int32_t class_count;
    int32_t samples_per_class;
    int32_t group_count;
    const int32_t* group_dims;   /* group_count entries */
    const double* group_noise;   /* group_count entries, or NULL for 0.05 each */
    double manifold_strength;    /* in [0, 1] */
    uint64_t seed;
} eplab_synth_spec;

/* Seeded synthetic dataset; the same spec always yields the same data. */
eplab_status eplab_dataset_synth(const eplab_synth_spec* spec, eplab_dataset** out);

/* Generates and writes the dataset CSV plus a "<path>.manifest" sidecar that
 * echoes the spec and seed. Byte-identical on repeated calls. */
eplab_status eplab_synth_to_csv(const eplab_synth_spec* spec, const char* path);

/* Dataset CSV with header id,label,g<k>_<j>. */
eplab_status eplab_dataset_load_csv(const char* path, eplab_dataset** out);

/* Writes the dataset CSV plus a "<path>.manifest" sidecar. */
eplab_status eplab_dataset_save_csv(const eplab_dataset* data, const char* path);

void eplab_dataset_free(eplab_dataset* data);

int64_t eplab_dataset_samples(const eplab_dataset* data);
int64_t eplab_dataset_classes(const eplab_dataset* data);
int64_t eplab_dataset_groups(const eplab_dataset* data);

/* Writes the id,role split CSV (role in labeled/unlabeled/test) for a seeded
 * stratified split. leak != 0 additionally feeds the test ids to the
 * unlabeled-train role, which is exactly the protocol flaw the lab measures. */
eplab_status eplab_dataset_split_csv(const eplab_dataset* data, int32_t n_labeled_per_class,
                                     double unlabeled_fraction, int32_t leak, uint64_t seed,
                                     const char* path);

/* Runs the experiment grid described by a run config file. Writes runs.csv,
 * aggregate.csv and their manifests under out_dir (NULL or "" uses the
 * config's [output] dir). jobs caps worker threads (<=0 means 1). When
 * summary_out is non-NULL it receives a rendered summary table; release it
 * with eplab_string_free. */
eplab_status eplab_run_config(const char* config_path, const char* out_dir, int32_t jobs,
                              char** summary_out);

/* Writes the tidy plot-data CSV (columns x,series,mean,std) for figure_id in
 * {"fig1","fig2","fig3"} from a per-run results CSV. */
eplab_status eplab_report(const char* results_csv, const char* figure_id,
                          const char* out_dir);

void eplab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* EPLAB_H */
