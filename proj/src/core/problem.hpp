#pragma once

#include <optional>
#include <set>

#include "core/hamiltonian.hpp"
#include "core/submanifold.hpp"
#include "core/toml.hpp"

namespace pencilkit {

struct SamplingConfig {
  std::uint64_t seed = 42;
  int points = 100;
  double tolerance = 1e-8;
  std::vector<double> lambdas = kDefaultLambdas;
};

struct FManBlock {
  ExprT3 structure;  // symmetrized c^k_ij
  std::optional<Expr> wdvv;
  VectorFieldExpr euler;
  std::optional<VectorFieldExpr> unity;
  double k_scale = 1.0;
  double d_scale = 0.0;
};

struct QHBlock {
  std::optional<double> degree_d;
  std::optional<double> degree_dd;
  std::optional<Expr> potential;
};

// A parsed, validated problem file.
struct Problem {
  std::string name = "problem";
  std::optional<Chart> chart;
  std::optional<MetricField> metric_g;   // as given in the file
  std::optional<MetricField> metric_gt;  // as given in the file
  std::optional<FManBlock> fman;
  std::optional<QHBlock> qh;
  std::optional<Embedding> embedding;
  SamplingConfig sampling;
  std::vector<std::string> checks;

  static Problem parse(const std::string& text, const std::string& name);
  static Problem load_file(const std::string& path);
};

struct RunResult {
  std::vector<CheckReport> reports;
  std::set<std::string> requested;
  SamplingConfig sampling;
  std::string name;

  // 0 = all requested checks pass, 1 = a requested check failed,
  // 3 = equivalent sub-verdicts disagreed (library defect).
  int exit_code() const;
  std::string to_json() const;
  std::string to_text() const;
};

// Executes the requested checks plus their dependencies in a fixed order.
// Throws Error(ConfigError) for unresolvable requests (exit code 2 at the
// CLI surface).
RunResult run_problem(const Problem& problem);

const std::vector<std::string>& known_checks();

}  // namespace pencilkit
