// Exercises the shared-library surface the way an external client would:
// only through the C header, checking statuses, handles and report strings.
#include "pencilkit/pencilkit.h"

#include <cstdio>
#include <cstring>
#include <string>

static int failures = 0;

#define REQUIRE(cond)                                                       \
  do {                                                                      \
    if (!(cond)) {                                                          \
      std::fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                           \
    }                                                                       \
  } while (0)

static const char* kProblem =
    "checks = [\"almost_compatible\", \"compatible\", \"flat_pencil\"]\n"
    "\n"
    "[chart]\n"
    "coords = [\"x1\", \"x2\"]\n"
    "box = [[1.0, 2.0], [1.0, 2.0]]\n"
    "exclusions = [\"x1 - x2\"]\n"
    "\n"
    "[metrics.g]\n"
    "variance = \"contravariant\"\n"
    "rows = [[\"1\", \"0\"], [\"0\", \"1\"]]\n"
    "\n"
    "[metrics.g_tilde]\n"
    "variance = \"contravariant\"\n"
    "rows = [[\"x1\", \"0\"], [\"0\", \"x2\"]]\n";

static void test_null_arguments() {
  REQUIRE(pk_problem_from_file(nullptr, nullptr) == PK_ERROR_NULL_ARGUMENT);
  pk_problem* problem = nullptr;
  REQUIRE(pk_problem_from_string(kProblem, "pair", &problem) == PK_OK);
  REQUIRE(pk_problem_set_points(nullptr, 10) == PK_ERROR_NULL_ARGUMENT);
  REQUIRE(pk_problem_set_points(problem, -3) == PK_ERROR_OUT_OF_RANGE);
  REQUIRE(pk_problem_set_tolerance(problem, -1.0) == PK_ERROR_OUT_OF_RANGE);
  const double two[] = {1.0, 2.0};
  REQUIRE(pk_problem_set_lambdas(problem, two, 2) == PK_ERROR_OUT_OF_RANGE);
  pk_problem_free(problem);
}

static void test_config_errors() {
  pk_problem* problem = nullptr;
  REQUIRE(pk_problem_from_string("checks = [\"compatible\"]\n", "broken",
                                 &problem) == PK_OK);
  pk_report* report = nullptr;
  REQUIRE(pk_problem_run(problem, &report) == PK_ERROR_CONFIG);
  REQUIRE(report == nullptr);
  REQUIRE(std::strlen(pk_last_error()) > 0);
  pk_problem_free(problem);

  pk_problem* bad = nullptr;
  REQUIRE(pk_problem_from_string("checks = [\"nope\"]\n", "bad", &bad) ==
          PK_ERROR_CONFIG);
  REQUIRE(bad == nullptr);
}

static void test_run_and_report() {
  pk_problem* problem = nullptr;
  REQUIRE(pk_problem_from_string(kProblem, "pair", &problem) == PK_OK);
  REQUIRE(pk_problem_set_points(problem, 64) == PK_OK);
  REQUIRE(pk_problem_set_seed(problem, 42) == PK_OK);
  pk_report* report = nullptr;
  REQUIRE(pk_problem_run(problem, &report) == PK_OK);
  REQUIRE(report != nullptr);

  REQUIRE(pk_report_count(report) == 3);
  bool saw_compatible = false;
  for (int i = 0; i < pk_report_count(report); ++i) {
    const char* name = pk_report_check_name(report, i);
    const char* verdict = pk_report_check_verdict(report, i);
    REQUIRE(name != nullptr);
    REQUIRE(verdict != nullptr);
    REQUIRE(std::string(verdict) == "pass");
    REQUIRE(pk_report_check_residual(report, i) >= 0.0);
    if (std::string(name) == "compatible") saw_compatible = true;
  }
  REQUIRE(saw_compatible);
  REQUIRE(pk_report_all_requested_passed(report) == 1);
  REQUIRE(pk_report_inconsistent(report) == 0);
  REQUIRE(pk_report_exit_code(report) == 0);
  REQUIRE(pk_report_check_name(report, 99) == nullptr);

  char* json = nullptr;
  REQUIRE(pk_report_json(report, &json) == PK_OK);
  REQUIRE(json != nullptr);
  REQUIRE(std::string(json).find("\"checks\"") != std::string::npos);
  char* text = nullptr;
  REQUIRE(pk_report_text(report, &text) == PK_OK);
  REQUIRE(std::string(text).find("almost_compatible") != std::string::npos);

  // a second run is byte-identical on the JSON surface
  pk_report* again = nullptr;
  REQUIRE(pk_problem_run(problem, &again) == PK_OK);
  char* json2 = nullptr;
  REQUIRE(pk_report_json(again, &json2) == PK_OK);
  REQUIRE(std::string(json) == std::string(json2));

  pk_string_free(json);
  pk_string_free(json2);
  pk_string_free(text);
  pk_report_free(report);
  pk_report_free(again);
  pk_problem_free(problem);
}

static void test_corpus_surface() {
  REQUIRE(pk_corpus_count() >= 8);
  REQUIRE(pk_corpus_name(-1) == nullptr);
  REQUIRE(pk_corpus_name(pk_corpus_count()) == nullptr);
  char* catalog = nullptr;
  REQUIRE(pk_corpus_catalog(&catalog) == PK_OK);
  REQUIRE(std::string(catalog).find("p1-frobenius") != std::string::npos);
  pk_string_free(catalog);

  // run the first corpus entry and compare against its expectations
  pk_problem* problem = nullptr;
  REQUIRE(pk_problem_from_string(pk_corpus_problem(0), pk_corpus_name(0),
                                 &problem) == PK_OK);
  pk_report* report = nullptr;
  REQUIRE(pk_problem_run(problem, &report) == PK_OK);
  REQUIRE(pk_corpus_entry_matches(0, report) == 1);
  REQUIRE(pk_corpus_entry_matches(-1, report) == -1);
  pk_report_free(report);
  pk_problem_free(problem);
}

int main() {
  REQUIRE(std::string(pk_version()) == "1.0.0");
  test_null_arguments();
  test_config_errors();
  test_run_and_report();
  test_corpus_surface();
  if (failures == 0) std::puts("test_capi: all assertions passed");
  return failures == 0 ? 0 : 1;
}
