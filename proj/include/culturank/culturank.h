/*
 * culturank C API.
 *
 * Region-aware hybrid evidence ranking and logit-based multiple-choice
 * answering. All objects are opaque handles; every call returns a
 * cr_status and, on failure, records a message retrievable with
 * cr_last_error() on the calling thread. Strings returned through `char**`
 * are owned by the caller and released with cr_string_free().
 */
#ifndef CULTURANK_CULTURANK_H
#define CULTURANK_CULTURANK_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CULTURANK_BUILDING)
#    define CR_API __declspec(dllexport)
#  else
#    define CR_API __declspec(dllimport)
#  endif
#else
#  define CR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cr_status {
  CR_OK = 0,

  /* input errors (exit code 1) */
  CR_ERR_MISSING_FILE = 10,
  CR_ERR_MALFORMED_RECORD = 11,
  CR_ERR_DUPLICATE_ID = 12,
  CR_ERR_CHOICE_COUNT = 13,
  CR_ERR_GOLD_INDEX_RANGE = 14,
  CR_ERR_EMPTY_ALIAS_LIST = 15,
  CR_ERR_UNKNOWN_REGION = 16,
  CR_ERR_UNKNOWN_QUESTION = 17,
  CR_ERR_MISSING_GOLD = 18,
  CR_ERR_UNMATCHED_PREDICTION = 19,
  CR_ERR_INVALID_CONFIG = 20,
  CR_ERR_INVALID_TEMPLATE = 21,
  CR_ERR_IO = 22,
  CR_ERR_INVALID_ARGUMENT = 23,

  /* backend errors (exit code 2) */
  CR_ERR_PROVIDER_UNAVAILABLE = 30,
  CR_ERR_SCORER_UNAVAILABLE = 31,
  CR_ERR_DIMENSION_MISMATCH = 32,
  CR_ERR_NON_FINITE_LOGIT = 33,

  /* internal invariant violations (exit code 3) */
  CR_ERR_INTERNAL = 40
} cr_status;

typedef struct cr_pipeline cr_pipeline;

typedef struct cr_index_stats {
  size_t doc_count;
  size_t vocabulary_size;
  double avg_doc_length;
} cr_index_stats;

CR_API const char* cr_version(void);

/* Symbolic name of a status, e.g. "MissingFile". Never NULL. */
CR_API const char* cr_status_name(cr_status status);

/* Process exit code for a status: 0 ok, 1 input, 2 backend, 3 internal. */
CR_API int cr_status_exit_code(cr_status status);

/* Message of the last failed call on this thread; "" when none. */
CR_API const char* cr_last_error(void);

CR_API void cr_string_free(char* s);

/* Creates a pipeline from a JSON configuration document. Inputs are loaded on
 * first use, so a valid configuration can still fail later with
 * CR_ERR_MISSING_FILE. */
CR_API cr_status cr_pipeline_open(const char* config_json, cr_pipeline** out);
CR_API void cr_pipeline_close(cr_pipeline* p);

/* Effective configuration with defaults filled in, as JSON. */
CR_API cr_status cr_pipeline_config_json(cr_pipeline* p, char** out_json);

CR_API cr_status cr_pipeline_index_stats(cr_pipeline* p, cr_index_stats* out);

/* Writes the BM25 index as a versioned JSON snapshot. */
CR_API cr_status cr_pipeline_save_index(cr_pipeline* p, const char* path);

/* Ranked evidence as JSON lines, one bundle per question. A non-NULL
 * question_id restricts the output to that question. */
CR_API cr_status cr_pipeline_rank(cr_pipeline* p, const char* question_id, char** out_jsonl);

/* Answers every question and writes the one-hot predictions CSV. The file is
 * only created when every batch succeeded. */
CR_API cr_status cr_pipeline_answer(cr_pipeline* p, const char* csv_path, size_t* out_count);

/* Exact-match evaluation of a predictions CSV. The report JSON is returned and,
 * when report_path is non-NULL, also written there. */
CR_API cr_status cr_pipeline_evaluate(cr_pipeline* p, const char* predictions_path, const char* report_path,
                                      char** out_report_json);

/* (w_bm25 * bm25_norm + w_sem * sem_norm) * (1 + region_bonus_weight * region_hit) */
CR_API double cr_fuse(double bm25_norm, double sem_norm, int region_hit, double w_bm25, double w_sem,
                      double region_bonus_weight);

/* Argmax over four logits with ties toward the smallest index. */
CR_API cr_status cr_select_answer(const double logits[4], int* out_index);

#ifdef __cplusplus
}
#endif

#endif /* CULTURANK_CULTURANK_H */
