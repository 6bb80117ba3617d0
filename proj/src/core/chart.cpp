#include "core/chart.hpp"

#include <cmath>
#include <set>

namespace pencilkit {

int Chart::coord_index(const std::string& name) const {
  for (size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == name) return static_cast<int>(i);
  return -1;
}

Expr Chart::var(int i) const {
  if (i < 0 || i >= dim())
    throw Error(ErrorCode::Internal, "coordinate index out of range");
  return Expr::variable(coords[static_cast<size_t>(i)], i);
}

void Chart::validate() const {
  if (coords.empty())
    throw Error(ErrorCode::ConfigError, "chart needs at least one coordinate");
  if (box.size() != coords.size())
    throw Error(ErrorCode::ConfigError,
                "chart box must have one interval per coordinate");
  std::set<std::string> seen;
  for (const auto& name : coords) {
    if (name.empty())
      throw Error(ErrorCode::ConfigError, "empty coordinate name");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::ConfigError, "duplicate coordinate name " + name);
  }
  for (const auto& interval : box) {
    if (!(interval[0] < interval[1]))
      throw Error(ErrorCode::ConfigError, "chart box interval is empty");
  }
}

std::vector<Point> sample_points(const Chart& chart, int count,
                                 std::uint64_t seed,
                                 const std::vector<AdmissionPredicate>& admit) {
  chart.validate();
  SampleRng rng(seed);
  std::vector<Point> points;
  points.reserve(static_cast<size_t>(count));
  const long max_attempts = 1000L * std::max(count, 1);
  long attempts = 0;
  while (static_cast<int>(points.size()) < count) {
    if (++attempts > max_attempts)
      throw Error(ErrorCode::ConfigError,
                  "sampling failed: admission rate too low on this chart");
    Point p(static_cast<size_t>(chart.dim()));
    for (int i = 0; i < chart.dim(); ++i)
      p[static_cast<size_t>(i)] =
          rng.uniform(chart.box[static_cast<size_t>(i)][0],
                      chart.box[static_cast<size_t>(i)][1]);
    bool ok = true;
    for (const auto& excl : chart.exclusions) {
      double v;
      try {
        v = excl.evaluate(p);
      } catch (const Error&) {
        ok = false;
        break;
      }
      if (std::fabs(v) < kExclusionFloor) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const auto& pred : admit) {
      if (!pred(p)) {
        ok = false;
        break;
      }
    }
    if (ok) points.push_back(std::move(p));
  }
  return points;
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& tag) {
  // FNV-1a over the tag, mixed with the base seed.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h ^ (base * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
}

}  // namespace pencilkit
