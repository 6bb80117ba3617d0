#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "core/chart.hpp"

namespace pencilkit {

enum class Verdict { Pass, Fail, PreconditionFailed, Skipped };

const char* verdict_name(Verdict v);

struct Witness {
  Point point;
  std::string detail;
};

struct SubVerdict {
  std::string name;
  Verdict verdict = Verdict::Pass;
  double residual = 0.0;
};

// Result of one named check: the worst normalized residual seen, the point
// that produced it, any equivalence sub-verdicts, and timing.  A fail always
// carries a witness.
struct CheckReport {
  std::string check;
  Verdict verdict = Verdict::Pass;
  double residual = 0.0;
  std::vector<Witness> witnesses;
  std::vector<SubVerdict> sub_verdicts;
  std::vector<std::string> notes;
  std::vector<double> lambdas_used;
  std::int64_t millis = 0;
  // Set when sub-verdicts that are equivalent by construction disagree;
  // signals a defect in the library, not in the input.
  bool inconsistent = false;

  bool passed() const { return verdict == Verdict::Pass; }
};

// Accumulates max |difference| / (1 + max |term|) with its witness, which
// keeps verdicts scale-free across metrics with exponential factors.
class ResidualTracker {
 public:
  void add(double difference, double scale, const Point& p,
           std::string detail = {}) {
    const double normalized = std::fabs(difference) / (1.0 + std::fabs(scale));
    sample_count_++;
    if (!has_ || normalized > max_) {
      has_ = true;
      max_ = normalized;
      worst_ = Witness{p, std::move(detail)};
    }
  }

  // For gap-style checks where the raw value is already meaningful.
  void add_raw(double value, const Point& p, std::string detail = {}) {
    sample_count_++;
    if (!has_ || value > max_) {
      has_ = true;
      max_ = value;
      worst_ = Witness{p, std::move(detail)};
    }
  }

  bool has_samples() const { return has_; }
  double max() const { return has_ ? max_ : 0.0; }
  const Witness& worst() const { return worst_; }
  long samples() const { return sample_count_; }

  SubVerdict sub(std::string name, double tol) const {
    return SubVerdict{std::move(name),
                      max() <= tol ? Verdict::Pass : Verdict::Fail, max()};
  }

 private:
  bool has_ = false;
  double max_ = 0.0;
  Witness worst_;
  long sample_count_ = 0;
};

// Assembles a pass/fail report from sub-verdicts: fails if any sub fails,
// records the worst residual.
CheckReport combine_subs(std::string check, std::vector<SubVerdict> subs,
                         std::vector<Witness> witnesses);

}  // namespace pencilkit
