#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "core/expr.hpp"

namespace pencilkit {

using Point = std::vector<double>;

// A coordinate chart with a sampling box.  Points where an exclusion
// expression is closer to zero than 1e-9 are rejected from sampling, as are
// points failing any caller-supplied admission predicate (typically metric
// determinant floors).
struct Chart {
  std::vector<std::string> coords;
  std::vector<std::array<double, 2>> box;
  std::vector<Expr> exclusions;

  int dim() const { return static_cast<int>(coords.size()); }
  int coord_index(const std::string& name) const;
  Expr var(int i) const;

  // Throws ConfigError on empty/duplicate names or an empty box.
  void validate() const;
};

// Deterministic uniform sampler; identical across platforms for a fixed
// seed (the raw engine output is mapped to [0,1) without distribution
// adapters).
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 gen_;
};

using AdmissionPredicate = std::function<bool(const Point&)>;

constexpr double kExclusionFloor = 1e-9;

// Rejection sampling from the chart box.  Throws ConfigError when the
// admission rate is too low to produce the requested count.
std::vector<Point> sample_points(const Chart& chart, int count,
                                 std::uint64_t seed,
                                 const std::vector<AdmissionPredicate>& admit = {});

// Derives a per-check generator seed from the run seed and the check name,
// so adding checks does not reshuffle the draws of existing ones.
std::uint64_t derive_seed(std::uint64_t base, const std::string& tag);

}  // namespace pencilkit
