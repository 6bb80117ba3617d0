#include "core/corpus.hpp"

#include <sstream>

namespace pencilkit {

namespace {

std::vector<CorpusEntry> make_corpus() {
  std::vector<CorpusEntry> entries;

  entries.push_back(CorpusEntry{
      "constant-pair-2d",
      "constant-coefficient pair: flat pencil, local bi-Hamiltonian pair",
      R"toml(checks = ["almost_compatible", "compatible", "prop_au", "flat_pencil",
          "semisimple", "circ_invariance", "right_symmetry", "circ_curvature",
          "dn_pencil"]

[chart]
coords = ["x1", "x2"]
box = [[0.0, 1.0], [0.0, 1.0]]

[metrics.g]
variance = "contravariant"
rows = [["2", "1"], ["1", "3"]]

[metrics.g_tilde]
variance = "contravariant"
rows = [["1", "0"], ["0", "2"]]
)toml",
      {{"almost_compatible", "pass"},
       {"compatible", "pass"},
       {"prop_au", "pass"},
       {"flat_pencil", "pass"},
       {"semisimple", "pass"},
       {"circ_invariance", "pass"},
       {"right_symmetry", "pass"},
       {"circ_curvature", "pass"},
       {"dn_pencil", "pass"}}});

  entries.push_back(CorpusEntry{
      "semisimple-diag-2d",
      "pointwise-diagonal pair with separated eigenvalues: almost "
      "compatibility upgrades to compatibility",
      R"toml(checks = ["semisimple", "almost_compatible", "compatible", "prop_au",
          "flat_pencil", "circ_invariance", "right_symmetry",
          "circ_curvature", "dn_pencil"]

[chart]
coords = ["x1", "x2"]
box = [[1.0, 2.0], [1.0, 2.0]]
exclusions = ["x1 - x2"]

[metrics.g]
variance = "contravariant"
rows = [["1", "0"], ["0", "1"]]

[metrics.g_tilde]
variance = "contravariant"
rows = [["x1", "0"], ["0", "x2"]]
)toml",
      {{"semisimple", "pass"},
       {"almost_compatible", "pass"},
       {"compatible", "pass"},
       {"prop_au", "pass"},
       {"flat_pencil", "pass"},
       {"circ_invariance", "pass"},
       {"right_symmetry", "pass"},
       {"circ_curvature", "pass"},
       {"dn_pencil", "pass"}}});

  entries.push_back(CorpusEntry{
      "crossed-diag-2d",
      "diagonal pair with crossed coordinate dependence: the Nijenhuis "
      "obstruction fires",
      R"toml(checks = ["almost_compatible", "semisimple"]

[chart]
coords = ["x1", "x2"]
box = [[1.0, 2.0], [1.0, 2.0]]
exclusions = ["x1 - x2"]

[metrics.g]
variance = "contravariant"
rows = [["1", "0"], ["0", "1"]]

[metrics.g_tilde]
variance = "contravariant"
rows = [["x2", "0"], ["0", "x1"]]
)toml",
      {{"almost_compatible", "fail"}, {"semisimple", "pass"}}});

  entries.push_back(CorpusEntry{
      "sphere-euclid-2d",
      "round metric against a flat one: fails almost compatibility and the "
      "pencil is curved",
      R"toml(checks = ["almost_compatible", "flat_pencil"]

[chart]
coords = ["x1", "x2"]
box = [[0.9, 1.2], [0.2, 1.0]]

[metrics.g]
variance = "covariant"
rows = [["1", "0"], ["0", "sin(x1)^2"]]

[metrics.g_tilde]
variance = "covariant"
rows = [["1", "0"], ["0", "1"]]
)toml",
      {{"almost_compatible", "fail"}, {"flat_pencil", "fail"}}});

  entries.push_back(CorpusEntry{
      "sphere-dn",
      "single curved metric: admissible operator data, nonlocal tail "
      "required",
      R"toml(checks = ["dn_operator"]

[chart]
coords = ["x1", "x2"]
box = [[0.9, 1.2], [0.2, 1.0]]

[metrics.g]
variance = "covariant"
rows = [["1", "0"], ["0", "sin(x1)^2"]]
)toml",
      {{"dn_operator", "pass"}}});

  entries.push_back(CorpusEntry{
      "conformal-2d",
      "conformally related flat metrics: almost compatible yet not "
      "compatible; right symmetry fails in step",
      R"toml(checks = ["almost_compatible", "compatible", "prop_au",
          "circ_invariance", "right_symmetry", "circ_curvature", "semisimple"]

[chart]
coords = ["x1", "x2"]
box = [[0.5, 1.5], [0.5, 1.5]]

[metrics.g]
variance = "contravariant"
rows = [["1", "0"], ["0", "1"]]

[metrics.g_tilde]
variance = "contravariant"
rows = [["exp(x1*x2)", "0"], ["0", "exp(x1*x2)"]]
)toml",
      {{"almost_compatible", "pass"},
       {"compatible", "fail"},
       {"prop_au", "pass"},
       {"circ_invariance", "pass"},
       {"right_symmetry", "fail"},
       {"circ_curvature", "pass"},
       {"semisimple", "fail"}}});

  entries.push_back(CorpusEntry{
      "p1-frobenius",
      "two-dimensional Frobenius structure with an exponential product: "
      "flat pencil, but T is singular so the reconstruction direction is "
      "unavailable",
      R"toml(checks = ["algebra", "invariant_metric", "euler_scaling",
          "t_operator", "weak_f_condition", "f_condition", "build_pencil",
          "almost_compatible", "compatible", "flat_pencil", "semisimple",
          "nijenhuis_euler", "ec_identity", "curvature_relation",
          "killing_identity", "weak_qh", "qh", "roundtrip", "dn_pencil"]

[chart]
coords = ["t1", "t2"]
box = [[0.1, 0.5], [0.1, 0.4]]

[metrics.g_tilde]
variance = "covariant"
rows = [["0", "1"], ["1", "0"]]

[fman]
euler = ["t1", "2"]
unity = ["1", "0"]
k = 1.0
D = 1.0

[[fman.structure]]
i = 1
j = 1
k = 1
value = "1"

[[fman.structure]]
i = 1
j = 2
k = 2
value = "1"

[[fman.structure]]
i = 2
j = 2
k = 1
value = "exp(t2)"

[qh]
f = "t2"
)toml",
      {{"algebra", "pass"},
       {"invariant_metric", "pass"},
       {"euler_scaling", "pass"},
       {"t_operator", "fail"},
       {"weak_f_condition", "pass"},
       {"f_condition", "pass"},
       {"build_pencil", "pass"},
       {"almost_compatible", "pass"},
       {"compatible", "pass"},
       {"flat_pencil", "pass"},
       {"semisimple", "pass"},
       {"nijenhuis_euler", "pass"},
       {"ec_identity", "pass"},
       {"curvature_relation", "pass"},
       {"killing_identity", "pass"},
       {"weak_qh", "fail"},
       {"qh", "fail"},
       {"roundtrip", "precondition-failed"},
       {"dn_pencil", "pass"}}});

  entries.push_back(CorpusEntry{
      "p1-perturbed",
      "constant shift of one structure function: Euler scaling breaks and "
      "the derived pencil turns curved while total symmetry survives",
      R"toml(checks = ["algebra", "invariant_metric", "euler_scaling",
          "weak_f_condition", "f_condition", "flat_pencil",
          "curvature_relation"]

[chart]
coords = ["t1", "t2"]
box = [[0.1, 0.5], [0.1, 0.4]]

[metrics.g_tilde]
variance = "covariant"
rows = [["0", "1"], ["1", "0"]]

[fman]
euler = ["t1", "2"]
unity = ["1", "0"]
k = 1.0
D = 1.0

[[fman.structure]]
i = 1
j = 1
k = 1
value = "1"

[[fman.structure]]
i = 1
j = 2
k = 2
value = "1"

[[fman.structure]]
i = 2
j = 2
k = 1
value = "exp(t2) + 0.1"
)toml",
      {{"algebra", "pass"},
       {"invariant_metric", "pass"},
       {"euler_scaling", "fail"},
       {"weak_f_condition", "pass"},
       {"f_condition", "pass"},
       {"flat_pencil", "fail"},
       {"curvature_relation", "precondition-failed"}}});

  entries.push_back(CorpusEntry{
      "wdvv-quartic-2d",
      "quartic potential structure: regular T, full quasi-homogeneity and a "
      "clean round trip",
      R"toml(checks = ["algebra", "invariant_metric", "euler_scaling",
          "t_operator", "weak_f_condition", "f_condition", "build_pencil",
          "almost_compatible", "compatible", "flat_pencil", "semisimple",
          "nijenhuis_euler", "ec_identity", "curvature_relation",
          "killing_identity", "weak_qh", "qh", "roundtrip", "dn_pencil"]

[chart]
coords = ["t1", "t2"]
box = [[1.0, 2.0], [0.5, 1.5]]

[metrics.g_tilde]
variance = "covariant"
rows = [["0", "1"], ["1", "0"]]

[fman]
wdvv = "0.5*t1^2*t2 + t2^4/72"
euler = ["t1", "2*t2/3"]
unity = ["1", "0"]
k = 1.0
D = 1.6666666666666667

[qh]
f = "t2"
d = 0.3333333333333333
D = 1.6666666666666667
)toml",
      {{"algebra", "pass"},
       {"invariant_metric", "pass"},
       {"euler_scaling", "pass"},
       {"t_operator", "pass"},
       {"weak_f_condition", "pass"},
       {"f_condition", "pass"},
       {"build_pencil", "pass"},
       {"almost_compatible", "pass"},
       {"compatible", "pass"},
       {"flat_pencil", "pass"},
       {"semisimple", "pass"},
       {"nijenhuis_euler", "pass"},
       {"ec_identity", "pass"},
       {"curvature_relation", "pass"},
       {"killing_identity", "pass"},
       {"weak_qh", "pass"},
       {"qh", "pass"},
       {"roundtrip", "pass"},
       {"dn_pencil", "pass"}}});

  entries.push_back(CorpusEntry{
      "semisimple-fman-3d",
      "three idempotent directions with the Euclidean pairing: everything "
      "passes including the round trip",
      R"toml(checks = ["algebra", "invariant_metric", "euler_scaling",
          "t_operator", "weak_f_condition", "f_condition", "build_pencil",
          "almost_compatible", "compatible", "flat_pencil", "semisimple",
          "nijenhuis_euler", "ec_identity", "curvature_relation", "weak_qh",
          "roundtrip", "dn_pencil"]

[chart]
coords = ["x1", "x2", "x3"]
box = [[1.0, 2.0], [2.5, 3.5], [4.0, 5.0]]

[metrics.g_tilde]
variance = "covariant"
rows = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]

[fman]
euler = ["x1", "x2", "x3"]
unity = ["1", "1", "1"]
k = 1.0
D = 2.0

[[fman.structure]]
i = 1
j = 1
k = 1
value = "1"

[[fman.structure]]
i = 2
j = 2
k = 2
value = "1"

[[fman.structure]]
i = 3
j = 3
k = 3
value = "1"
)toml",
      {{"algebra", "pass"},
       {"invariant_metric", "pass"},
       {"euler_scaling", "pass"},
       {"t_operator", "pass"},
       {"weak_f_condition", "pass"},
       {"f_condition", "pass"},
       {"build_pencil", "pass"},
       {"almost_compatible", "pass"},
       {"compatible", "pass"},
       {"flat_pencil", "pass"},
       {"semisimple", "pass"},
       {"nijenhuis_euler", "pass"},
       {"ec_identity", "pass"},
       {"curvature_relation", "pass"},
       {"weak_qh", "pass"},
       {"roundtrip", "pass"},
       {"dn_pencil", "pass"}}});

  entries.push_back(CorpusEntry{
      "noneg-diag-2d",
      "idempotent product with a non-potential diagonal metric: the weak "
      "symmetry condition fails and the connection-difference identity "
      "fails with it",
      R"toml(checks = ["algebra", "invariant_metric", "euler_scaling",
          "t_operator", "weak_f_condition", "f_condition", "build_pencil",
          "almost_compatible", "compatible", "ec_identity",
          "curvature_relation", "nijenhuis_euler"]

[chart]
coords = ["x1", "x2"]
box = [[1.0, 2.0], [1.0, 2.0]]

[metrics.g_tilde]
variance = "covariant"
rows = [["x1*x2", "0"], ["0", "x2^2"]]

[fman]
euler = ["x1", "x2"]
unity = ["1", "1"]
k = 1.0
D = 4.0

[[fman.structure]]
i = 1
j = 1
k = 1
value = "1"

[[fman.structure]]
i = 2
j = 2
k = 2
value = "1"
)toml",
      {{"algebra", "pass"},
       {"invariant_metric", "pass"},
       {"euler_scaling", "pass"},
       {"t_operator", "pass"},
       {"weak_f_condition", "fail"},
       {"f_condition", "fail"},
       {"build_pencil", "pass"},
       {"almost_compatible", "pass"},
       {"compatible", "pass"},
       {"ec_identity", "fail"},
       {"curvature_relation", "precondition-failed"},
       {"nijenhuis_euler", "precondition-failed"}}});

  entries.push_back(CorpusEntry{
      "identity-emb-2d",
      "identity embedding: trivially distinguished, induced pair equals the "
      "ambient pair",
      R"toml(checks = ["distinguished", "induced_compatibility"]

[chart]
coords = ["x1", "x2"]
box = [[1.0, 2.0], [1.0, 2.0]]
exclusions = ["x1 - x2"]

[metrics.g]
variance = "contravariant"
rows = [["1", "0"], ["0", "1"]]

[metrics.g_tilde]
variance = "contravariant"
rows = [["x1", "0"], ["0", "x2"]]

[embedding]
params = ["u1", "u2"]
box = [[1.0, 2.0], [1.0, 2.0]]
exclusions = ["u1 - u2"]
components = ["u1", "u2"]
)toml",
      {{"distinguished", "pass"}, {"induced_compatibility", "pass"}}});

  entries.push_back(CorpusEntry{
      "semisimple-plane-3d",
      "coordinate plane inside the diagonal pair: distinguished, induced "
      "pair is again diagonal and compatible",
      R"toml(checks = ["distinguished", "induced_compatibility"]

[chart]
coords = ["x1", "x2", "x3"]
box = [[1.0, 2.0], [2.5, 3.5], [4.0, 5.0]]

[metrics.g]
variance = "contravariant"
rows = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]

[metrics.g_tilde]
variance = "contravariant"
rows = [["x1", "0", "0"], ["0", "x2", "0"], ["0", "0", "x3"]]

[embedding]
params = ["u1", "u2"]
box = [[1.0, 2.0], [2.5, 3.5]]
components = ["u1", "u2", "4.5"]
)toml",
      {{"distinguished", "pass"}, {"induced_compatibility", "pass"}}});

  entries.push_back(CorpusEntry{
      "fman-sub-3d",
      "diagonal surface inside the idempotent structure: product and Euler "
      "closure hold and the induced pair is compatible",
      R"toml(checks = ["fman_submanifold"]

[chart]
coords = ["x1", "x2", "x3"]
box = [[1.0, 2.0], [2.5, 3.5], [4.0, 5.0]]

[metrics.g_tilde]
variance = "covariant"
rows = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]

[fman]
euler = ["x1", "x2", "x3"]
unity = ["1", "1", "1"]
k = 1.0
D = 2.0

[[fman.structure]]
i = 1
j = 1
k = 1
value = "1"

[[fman.structure]]
i = 2
j = 2
k = 2
value = "1"

[[fman.structure]]
i = 3
j = 3
k = 3
value = "1"

[embedding]
params = ["u1", "u2"]
box = [[1.0, 2.0], [4.0, 5.0]]
components = ["u1", "u1", "u2"]
)toml",
      {{"fman_submanifold", "pass"}}});

  entries.push_back(CorpusEntry{
      "fman-sub-broken",
      "shifted diagonal surface: the product still closes but the Euler "
      "direction leaves the tangent spaces, caught with a witness",
      R"toml(checks = ["fman_submanifold"]

[chart]
coords = ["x1", "x2", "x3"]
box = [[1.0, 2.0], [2.5, 3.5], [4.0, 5.0]]

[metrics.g_tilde]
variance = "covariant"
rows = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]

[fman]
euler = ["x1", "x2", "x3"]
unity = ["1", "1", "1"]
k = 1.0
D = 2.0

[[fman.structure]]
i = 1
j = 1
k = 1
value = "1"

[[fman.structure]]
i = 2
j = 2
k = 2
value = "1"

[[fman.structure]]
i = 3
j = 3
k = 3
value = "1"

[embedding]
params = ["u1", "u2"]
box = [[1.0, 2.0], [4.0, 5.0]]
components = ["u1 + 0.7", "u1", "u2"]
)toml",
      {{"fman_submanifold", "fail"}}});

  return entries;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = make_corpus();
  return entries;
}

std::string corpus_catalog_text() {
  std::ostringstream out;
  out << "bundled corpus (" << corpus().size() << " entries)\n\n";
  for (const auto& entry : corpus()) {
    out << entry.name << "\n  " << entry.brief << "\n  expected: ";
    bool first = true;
    for (const auto& [check, verdict] : entry.expected) {
      if (!first) out << ", ";
      first = false;
      out << check << "=" << verdict;
    }
    out << "\n\n";
  }
  return out.str();
}

bool corpus_entry_matches(const CorpusEntry& entry, const RunResult& result,
                          std::string* mismatch) {
  for (const auto& [check, verdict] : entry.expected) {
    bool found = false;
    for (const auto& report : result.reports) {
      if (report.check != check) continue;
      found = true;
      if (verdict_name(report.verdict) != verdict) {
        if (mismatch)
          *mismatch = check + ": expected " + verdict + ", got " +
                      verdict_name(report.verdict);
        return false;
      }
    }
    if (!found) {
      if (mismatch) *mismatch = check + ": missing from the report";
      return false;
    }
  }
  for (const auto& report : result.reports) {
    if (report.inconsistent) {
      if (mismatch) *mismatch = report.check + ": inconsistent sub-verdicts";
      return false;
    }
  }
  return true;
}

}  // namespace pencilkit
