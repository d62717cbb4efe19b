/*
 * C interface to the SDTI task-identification library.
 *
 * Corpora are opaque handles. Options and results travel as UTF-8 JSON
 * strings; every string returned through an out-parameter is owned by the
 * caller and must be released with sdti_string_free. On failure a function
 * returns a non-zero status and sdti_last_error() describes the cause (the
 * message is thread-local and valid until the next call on that thread).
 */
#ifndef SDTI_SDTI_H
#define SDTI_SDTI_H

#include <stddef.h>

#if defined(_WIN32)
#define SDTI_API __declspec(dllexport)
#elif defined(SDTI_BUILDING_LIBRARY)
#define SDTI_API __attribute__((visibility("default")))
#else
#define SDTI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdti_status {
  SDTI_OK = 0,
  SDTI_ERROR_INVALID_ARGUMENT = 1,
  SDTI_ERROR_IO = 2,
  SDTI_ERROR_PARSE = 3,
  SDTI_ERROR_DIVERGED = 4,
  SDTI_ERROR_BUDGET = 5,
  SDTI_ERROR_RUNTIME = 6
} sdti_status;

typedef struct sdti_corpus sdti_corpus;

/* Receives each ablation record (one JSON object) as soon as it is written. */
typedef void (*sdti_record_callback)(const char* record_json, void* user_data);

SDTI_API const char* sdti_version(void);
SDTI_API const char* sdti_last_error(void);
SDTI_API const char* sdti_status_name(sdti_status status);
SDTI_API void sdti_string_free(char* str);

/* Loads, normalizes and truncates the corpus declared by a manifest file. */
SDTI_API sdti_status sdti_corpus_load_manifest(const char* path, sdti_corpus** out);
/* Same, from manifest text; relative dataset paths resolve against base_dir. */
SDTI_API sdti_status sdti_corpus_from_json(const char* manifest_json, const char* base_dir, sdti_corpus** out);
SDTI_API void sdti_corpus_free(sdti_corpus* corpus);

SDTI_API sdti_status sdti_corpus_info(const sdti_corpus* corpus, size_t* n_datasets, size_t* record_count,
                                      size_t* max_features);
/* Dataset summary, (i, j) -> q combination map and tensor shapes. */
SDTI_API sdti_status sdti_corpus_describe(const sdti_corpus* corpus, char** json_out);

/*
 * Full training/voting workflow. Options: epochs, sdti_epochs, seed, records,
 * threads, concurrent_epochs, element_budget, trace_path (CSV of every
 * recorded cost). Result: predicted, vote_counts, margins, total_epochs,
 * inference_time_seconds, seed, config, metrics, variance_summary.
 */
SDTI_API sdti_status sdti_run(const sdti_corpus* corpus, const char* options_json, char** result_json);

/*
 * Deterministic similarity baseline. Options: method (pearson |
 * mutual_information | cosine), bins, aggregation (mean | max), records,
 * similarity_path (CSV of the N x N score matrix).
 */
SDTI_API sdti_status sdti_baseline(const sdti_corpus* corpus, const char* options_json, char** result_json);

/*
 * Ablation grid. Options: results_path (required), csv_path, base_seed,
 * budget, resume, threads, and optional value filters records / epochs /
 * sdti_epochs (arrays). Summary: executed, skipped_existing, total_records,
 * groups.
 */
SDTI_API sdti_status sdti_ablate(const sdti_corpus* corpus, const char* options_json, sdti_record_callback on_record,
                                 void* user_data, char** summary_json);

/*
 * Report over a results file. Options: sdti_epochs, pooling (final | all),
 * alpha, stratified_path (CSV).
 */
SDTI_API sdti_status sdti_report(const char* results_path, const char* options_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SDTI_SDTI_H */
