// Command line front end; talks to the core exclusively through the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pencilkit/pencilkit.h"

namespace {

struct SamplingFlags {
  int points = -1;
  unsigned long long seed = 0;
  bool seed_set = false;
  double tolerance = -1.0;
  std::vector<double> lambdas;
};

void add_sampling_flags(CLI::App* cmd, SamplingFlags& flags) {
  cmd->add_option("--points", flags.points, "number of sample points");
  cmd->add_option("--seed", flags.seed, "sampling seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--tol", flags.tolerance, "normalized residual tolerance");
  cmd->add_option("--lambda", flags.lambdas,
                  "pencil parameter samples (comma separated)")
      ->delimiter(',');
}

int apply_flags(pk_problem* problem, const SamplingFlags& flags) {
  if (flags.points > 0 &&
      pk_problem_set_points(problem, flags.points) != PK_OK)
    return 2;
  if (flags.seed_set && pk_problem_set_seed(problem, flags.seed) != PK_OK)
    return 2;
  if (flags.tolerance > 0 &&
      pk_problem_set_tolerance(problem, flags.tolerance) != PK_OK)
    return 2;
  if (!flags.lambdas.empty() &&
      pk_problem_set_lambdas(problem, flags.lambdas.data(),
                             static_cast<int>(flags.lambdas.size())) != PK_OK)
    return 2;
  return 0;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) return false;
  out << content;
  return out.good();
}

int run_subcommand(const std::string& file, const SamplingFlags& flags,
                   const std::string& json_path) {
  pk_problem* problem = nullptr;
  if (pk_problem_from_file(file.c_str(), &problem) != PK_OK) {
    std::cerr << "error: " << pk_last_error() << "\n";
    return 2;
  }
  if (apply_flags(problem, flags) != 0) {
    std::cerr << "error: " << pk_last_error() << "\n";
    pk_problem_free(problem);
    return 2;
  }
  pk_report* report = nullptr;
  const pk_status status = pk_problem_run(problem, &report);
  pk_problem_free(problem);
  if (status != PK_OK) {
    std::cerr << "error: " << pk_last_error() << "\n";
    return status == PK_ERROR_CONFIG ? 2 : 2;
  }
  char* text = nullptr;
  if (pk_report_text(report, &text) == PK_OK) {
    std::cout << text;
    pk_string_free(text);
  }
  int code = pk_report_exit_code(report);
  if (!json_path.empty()) {
    char* json = nullptr;
    if (pk_report_json(report, &json) == PK_OK) {
      if (!write_file(json_path, json)) {
        std::cerr << "error: cannot write " << json_path << "\n";
        code = 2;
      }
      pk_string_free(json);
    }
  }
  pk_report_free(report);
  return code;
}

int corpus_subcommand(bool run, const SamplingFlags& flags,
                      const std::string& json_path) {
  if (!run) {
    char* catalog = nullptr;
    if (pk_corpus_catalog(&catalog) != PK_OK) {
      std::cerr << "error: " << pk_last_error() << "\n";
      return 2;
    }
    std::cout << catalog;
    pk_string_free(catalog);
    return 0;
  }

  int worst = 0;
  std::string combined_json = "[\n";
  const int count = pk_corpus_count();
  for (int i = 0; i < count; ++i) {
    pk_problem* problem = nullptr;
    if (pk_problem_from_string(pk_corpus_problem(i), pk_corpus_name(i),
                               &problem) != PK_OK) {
      std::cerr << "error: " << pk_last_error() << "\n";
      return 2;
    }
    if (apply_flags(problem, flags) != 0) {
      pk_problem_free(problem);
      std::cerr << "error: " << pk_last_error() << "\n";
      return 2;
    }
    pk_report* report = nullptr;
    const pk_status status = pk_problem_run(problem, &report);
    pk_problem_free(problem);
    if (status != PK_OK) {
      std::cerr << "error (" << pk_corpus_name(i) << "): " << pk_last_error()
                << "\n";
      return 2;
    }
    const int matches = pk_corpus_entry_matches(i, report);
    if (matches == 1) {
      std::cout << "[OK]   " << pk_corpus_name(i) << "\n";
    } else {
      std::cout << "[DIFF] " << pk_corpus_name(i) << ": " << pk_last_error()
                << "\n";
      worst = std::max(worst, pk_report_inconsistent(report) ? 3 : 1);
    }
    char* json = nullptr;
    if (pk_report_json(report, &json) == PK_OK) {
      combined_json += json;
      combined_json += (i + 1 < count) ? ",\n" : "\n";
      pk_string_free(json);
    }
    pk_report_free(report);
  }
  combined_json += "]\n";
  if (!json_path.empty() && !write_file(json_path, combined_json)) {
    std::cerr << "error: cannot write " << json_path << "\n";
    return 2;
  }
  std::cout << (worst == 0 ? "all corpus entries match their expectations\n"
                           : "corpus mismatches found\n");
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification toolkit for metric pairs on coordinate charts"};
  app.require_subcommand(1);

  std::string file;
  std::string json_path;
  SamplingFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run the checks of a problem file");
  run_cmd->add_option("file", file, "problem file (TOML)")->required();
  add_sampling_flags(run_cmd, run_flags);
  run_cmd->add_option("--json", json_path, "write the JSON report here");

  bool corpus_run = false;
  std::string corpus_json;
  SamplingFlags corpus_flags;
  CLI::App* corpus_cmd =
      app.add_subcommand("corpus", "list or run the bundled examples");
  corpus_cmd->add_flag("--run", corpus_run,
                       "run every bundled entry and compare with its "
                       "expected verdicts");
  add_sampling_flags(corpus_cmd, corpus_flags);
  corpus_cmd->add_option("--json", corpus_json,
                         "write the combined JSON report here");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return run_subcommand(file, run_flags, json_path);
  if (corpus_cmd->parsed())
    return corpus_subcommand(corpus_run, corpus_flags, corpus_json);
  return 2;
}
