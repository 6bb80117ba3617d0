#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/problem.hpp"

namespace pencilkit {

// A bundled problem file with its expected verdicts.  Entries double as
// end-to-end fixtures: `pencilkit corpus --run` compares actual verdicts
// against the expectations.
struct CorpusEntry {
  std::string name;
  std::string brief;      // what the entry exercises
  std::string toml;       // complete problem file
  std::map<std::string, std::string> expected;  // check -> verdict
};

const std::vector<CorpusEntry>& corpus();

std::string corpus_catalog_text();

// True when every expected check appears in the result with the expected
// verdict.
bool corpus_entry_matches(const CorpusEntry& entry, const RunResult& result,
                          std::string* mismatch = nullptr);

}  // namespace pencilkit
