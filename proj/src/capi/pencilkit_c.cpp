#include "pencilkit/pencilkit.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/corpus.hpp"
#include "core/problem.hpp"

using pencilkit::CorpusEntry;
using pencilkit::Error;
using pencilkit::ErrorCode;
using pencilkit::Problem;
using pencilkit::RunResult;

struct pk_problem {
  Problem problem;
};

struct pk_report {
  RunResult result;
};

namespace {

thread_local std::string g_last_error;

pk_status fail(pk_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

pk_status map_error(const Error& err) {
  g_last_error = std::string(pencilkit::error_code_name(err.code())) + ": " +
                 err.what();
  switch (err.code()) {
    case ErrorCode::ConfigError: return PK_ERROR_CONFIG;
    case ErrorCode::EvalDomain: return PK_ERROR_EVALUATION;
    case ErrorCode::Internal: return PK_ERROR_INTERNAL;
    default: return PK_ERROR_RUN;
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* pk_version(void) { return "1.0.0"; }

const char* pk_last_error(void) { return g_last_error.c_str(); }

pk_status pk_problem_from_file(const char* path, pk_problem** out) {
  if (!path || !out) return fail(PK_ERROR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto problem = new pk_problem{Problem::load_file(path)};
    *out = problem;
    return PK_OK;
  } catch (const Error& err) {
    return map_error(err);
  } catch (const std::exception& ex) {
    return fail(PK_ERROR_INTERNAL, ex.what());
  }
}

pk_status pk_problem_from_string(const char* text, const char* name,
                                 pk_problem** out) {
  if (!text || !out) return fail(PK_ERROR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto problem = new pk_problem{
        Problem::parse(text, name ? name : "problem")};
    *out = problem;
    return PK_OK;
  } catch (const Error& err) {
    return map_error(err);
  } catch (const std::exception& ex) {
    return fail(PK_ERROR_INTERNAL, ex.what());
  }
}

void pk_problem_free(pk_problem* problem) { delete problem; }

pk_status pk_problem_set_points(pk_problem* problem, int points) {
  if (!problem) return fail(PK_ERROR_NULL_ARGUMENT, "null problem");
  if (points < 1 || points > 100000)
    return fail(PK_ERROR_OUT_OF_RANGE, "points must be in [1, 100000]");
  problem->problem.sampling.points = points;
  return PK_OK;
}

pk_status pk_problem_set_seed(pk_problem* problem, unsigned long long seed) {
  if (!problem) return fail(PK_ERROR_NULL_ARGUMENT, "null problem");
  problem->problem.sampling.seed = seed;
  return PK_OK;
}

pk_status pk_problem_set_tolerance(pk_problem* problem, double tolerance) {
  if (!problem) return fail(PK_ERROR_NULL_ARGUMENT, "null problem");
  if (!(tolerance > 0))
    return fail(PK_ERROR_OUT_OF_RANGE, "tolerance must be positive");
  problem->problem.sampling.tolerance = tolerance;
  return PK_OK;
}

pk_status pk_problem_set_lambdas(pk_problem* problem, const double* values,
                                 int count) {
  if (!problem || !values)
    return fail(PK_ERROR_NULL_ARGUMENT, "null argument");
  if (count < 3)
    return fail(PK_ERROR_OUT_OF_RANGE, "need at least 3 lambda samples");
  problem->problem.sampling.lambdas.assign(values, values + count);
  return PK_OK;
}

pk_status pk_problem_run(const pk_problem* problem, pk_report** out) {
  if (!problem || !out) return fail(PK_ERROR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    auto report = new pk_report{pencilkit::run_problem(problem->problem)};
    *out = report;
    return PK_OK;
  } catch (const Error& err) {
    return map_error(err);
  } catch (const std::exception& ex) {
    return fail(PK_ERROR_INTERNAL, ex.what());
  }
}

void pk_report_free(pk_report* report) { delete report; }

int pk_report_count(const pk_report* report) {
  return report ? static_cast<int>(report->result.reports.size()) : 0;
}

const char* pk_report_check_name(const pk_report* report, int index) {
  if (!report || index < 0 ||
      index >= static_cast<int>(report->result.reports.size()))
    return nullptr;
  return report->result.reports[static_cast<size_t>(index)].check.c_str();
}

const char* pk_report_check_verdict(const pk_report* report, int index) {
  if (!report || index < 0 ||
      index >= static_cast<int>(report->result.reports.size()))
    return nullptr;
  return pencilkit::verdict_name(
      report->result.reports[static_cast<size_t>(index)].verdict);
}

double pk_report_check_residual(const pk_report* report, int index) {
  if (!report || index < 0 ||
      index >= static_cast<int>(report->result.reports.size()))
    return -1.0;
  return report->result.reports[static_cast<size_t>(index)].residual;
}

int pk_report_all_requested_passed(const pk_report* report) {
  if (!report) return 0;
  for (const auto& r : report->result.reports)
    if (report->result.requested.count(r.check) && !r.passed()) return 0;
  return 1;
}

int pk_report_inconsistent(const pk_report* report) {
  if (!report) return 0;
  for (const auto& r : report->result.reports)
    if (r.inconsistent) return 1;
  return 0;
}

int pk_report_exit_code(const pk_report* report) {
  return report ? report->result.exit_code() : 2;
}

pk_status pk_report_json(const pk_report* report, char** out) {
  if (!report || !out) return fail(PK_ERROR_NULL_ARGUMENT, "null argument");
  *out = copy_string(report->result.to_json());
  return *out ? PK_OK : fail(PK_ERROR_INTERNAL, "allocation failed");
}

pk_status pk_report_text(const pk_report* report, char** out) {
  if (!report || !out) return fail(PK_ERROR_NULL_ARGUMENT, "null argument");
  *out = copy_string(report->result.to_text());
  return *out ? PK_OK : fail(PK_ERROR_INTERNAL, "allocation failed");
}

int pk_corpus_count(void) {
  return static_cast<int>(pencilkit::corpus().size());
}

const char* pk_corpus_name(int index) {
  const auto& entries = pencilkit::corpus();
  if (index < 0 || index >= static_cast<int>(entries.size())) return nullptr;
  return entries[static_cast<size_t>(index)].name.c_str();
}

const char* pk_corpus_brief(int index) {
  const auto& entries = pencilkit::corpus();
  if (index < 0 || index >= static_cast<int>(entries.size())) return nullptr;
  return entries[static_cast<size_t>(index)].brief.c_str();
}

const char* pk_corpus_problem(int index) {
  const auto& entries = pencilkit::corpus();
  if (index < 0 || index >= static_cast<int>(entries.size())) return nullptr;
  return entries[static_cast<size_t>(index)].toml.c_str();
}

pk_status pk_corpus_catalog(char** out) {
  if (!out) return fail(PK_ERROR_NULL_ARGUMENT, "null argument");
  *out = copy_string(pencilkit::corpus_catalog_text());
  return *out ? PK_OK : fail(PK_ERROR_INTERNAL, "allocation failed");
}

int pk_corpus_entry_matches(int index, const pk_report* report) {
  const auto& entries = pencilkit::corpus();
  if (!report || index < 0 || index >= static_cast<int>(entries.size()))
    return -1;
  std::string mismatch;
  const bool ok = pencilkit::corpus_entry_matches(
      entries[static_cast<size_t>(index)], report->result, &mismatch);
  if (!ok) g_last_error = mismatch;
  return ok ? 1 : 0;
}

void pk_string_free(char* text) { std::free(text); }

}  // extern "C"
