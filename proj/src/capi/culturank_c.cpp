#include "culturank/culturank.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "../core/error.hpp"
#include "../core/pipeline.hpp"

struct cr_pipeline {
  culturank::Pipeline impl;
};

namespace {

thread_local std::string g_last_error;

cr_status to_status(culturank::ErrorCode code) {
  using culturank::ErrorCode;
  switch (code) {
    case ErrorCode::MissingFile: return CR_ERR_MISSING_FILE;
    case ErrorCode::MalformedRecord: return CR_ERR_MALFORMED_RECORD;
    case ErrorCode::DuplicateId: return CR_ERR_DUPLICATE_ID;
    case ErrorCode::ChoiceCountError: return CR_ERR_CHOICE_COUNT;
    case ErrorCode::GoldIndexRange: return CR_ERR_GOLD_INDEX_RANGE;
    case ErrorCode::EmptyAliasList: return CR_ERR_EMPTY_ALIAS_LIST;
    case ErrorCode::UnknownRegion: return CR_ERR_UNKNOWN_REGION;
    case ErrorCode::UnknownQuestion: return CR_ERR_UNKNOWN_QUESTION;
    case ErrorCode::MissingGold: return CR_ERR_MISSING_GOLD;
    case ErrorCode::UnmatchedPrediction: return CR_ERR_UNMATCHED_PREDICTION;
    case ErrorCode::InvalidConfig: return CR_ERR_INVALID_CONFIG;
    case ErrorCode::InvalidTemplate: return CR_ERR_INVALID_TEMPLATE;
    case ErrorCode::IoError: return CR_ERR_IO;
    case ErrorCode::ProviderUnavailable: return CR_ERR_PROVIDER_UNAVAILABLE;
    case ErrorCode::ScorerUnavailable: return CR_ERR_SCORER_UNAVAILABLE;
    case ErrorCode::DimensionMismatch: return CR_ERR_DIMENSION_MISMATCH;
    case ErrorCode::NonFiniteLogit: return CR_ERR_NON_FINITE_LOGIT;
    case ErrorCode::ZeroVector:
    case ErrorCode::OutOfRange:
    case ErrorCode::NegativeScore:
    case ErrorCode::IdMismatch:
    case ErrorCode::Internal: return CR_ERR_INTERNAL;
  }
  return CR_ERR_INTERNAL;
}

cr_status fail(cr_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
cr_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return CR_OK;
  } catch (const culturank::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CR_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* cr_version(void) { return "0.1.0"; }

const char* cr_status_name(cr_status status) {
  switch (status) {
    case CR_OK: return "Ok";
    case CR_ERR_MISSING_FILE: return "MissingFile";
    case CR_ERR_MALFORMED_RECORD: return "MalformedRecord";
    case CR_ERR_DUPLICATE_ID: return "DuplicateId";
    case CR_ERR_CHOICE_COUNT: return "ChoiceCountError";
    case CR_ERR_GOLD_INDEX_RANGE: return "GoldIndexRange";
    case CR_ERR_EMPTY_ALIAS_LIST: return "EmptyAliasList";
    case CR_ERR_UNKNOWN_REGION: return "UnknownRegion";
    case CR_ERR_UNKNOWN_QUESTION: return "UnknownQuestion";
    case CR_ERR_MISSING_GOLD: return "MissingGold";
    case CR_ERR_UNMATCHED_PREDICTION: return "UnmatchedPrediction";
    case CR_ERR_INVALID_CONFIG: return "InvalidConfig";
    case CR_ERR_INVALID_TEMPLATE: return "InvalidTemplate";
    case CR_ERR_IO: return "IoError";
    case CR_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case CR_ERR_PROVIDER_UNAVAILABLE: return "ProviderUnavailable";
    case CR_ERR_SCORER_UNAVAILABLE: return "ScorerUnavailable";
    case CR_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case CR_ERR_NON_FINITE_LOGIT: return "NonFiniteLogit";
    case CR_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

int cr_status_exit_code(cr_status status) {
  if (status == CR_OK) return 0;
  if (status < 30) return 1;
  if (status < 40) return 2;
  return 3;
}

const char* cr_last_error(void) { return g_last_error.c_str(); }

void cr_string_free(char* s) { std::free(s); }

cr_status cr_pipeline_open(const char* config_json, cr_pipeline** out) {
  if (!config_json || !out) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cr_pipeline{culturank::Pipeline(culturank::PipelineConfig::from_json(config_json))}; });
}

void cr_pipeline_close(cr_pipeline* p) { delete p; }

cr_status cr_pipeline_config_json(cr_pipeline* p, char** out_json) {
  if (!p || !out_json) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out_json = dup_string(p->impl.config().to_json()); });
}

cr_status cr_pipeline_index_stats(cr_pipeline* p, cr_index_stats* out) {
  if (!p || !out) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto s = p->impl.index_stats();
    *out = {s.doc_count, s.vocabulary_size, s.avg_doc_length};
  });
}

cr_status cr_pipeline_save_index(cr_pipeline* p, const char* path) {
  if (!p || !path) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { p->impl.index().save(path); });
}

cr_status cr_pipeline_rank(cr_pipeline* p, const char* question_id, char** out_jsonl) {
  if (!p || !out_jsonl) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::optional<std::string> only;
    if (question_id) only = question_id;
    std::string text;
    for (const auto& b : p->impl.rank(only)) {
      text += culturank::bundle_to_json(b);
      text += '\n';
    }
    *out_jsonl = dup_string(text);
  });
}

cr_status cr_pipeline_answer(cr_pipeline* p, const char* csv_path, size_t* out_count) {
  if (!p || !csv_path) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto preds = p->impl.answer_to_file(csv_path);
    if (out_count) *out_count = preds.size();
  });
}

cr_status cr_pipeline_evaluate(cr_pipeline* p, const char* predictions_path, const char* report_path,
                               char** out_report_json) {
  if (!p || !predictions_path) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto json = p->impl.evaluate(predictions_path).to_json();
    if (report_path) culturank::write_file_atomic(report_path, json);
    if (out_report_json) *out_report_json = dup_string(json);
  });
}

double cr_fuse(double bm25_norm, double sem_norm, int region_hit, double w_bm25, double w_sem,
               double region_bonus_weight) {
  culturank::RankerConfig cfg;
  cfg.w_bm25 = w_bm25;
  cfg.w_sem = w_sem;
  cfg.region_bonus_weight = region_bonus_weight;
  return culturank::fuse(bm25_norm, sem_norm, region_hit != 0, cfg);
}

cr_status cr_select_answer(const double logits[4], int* out_index) {
  if (!logits || !out_index) return fail(CR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    culturank::ChoiceLogits cl;
    for (int i = 0; i < 4; ++i) cl.logits[static_cast<std::size_t>(i)] = logits[i];
    *out_index = culturank::select_answer(cl).chosen_index;
  });
}

}  // extern "C"
