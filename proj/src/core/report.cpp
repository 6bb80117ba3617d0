#include "core/report.hpp"

namespace pencilkit {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::PreconditionFailed: return "precondition-failed";
    case Verdict::Skipped: return "skipped";
  }
  return "unknown";
}

CheckReport combine_subs(std::string check, std::vector<SubVerdict> subs,
                         std::vector<Witness> witnesses) {
  CheckReport report;
  report.check = std::move(check);
  report.sub_verdicts = std::move(subs);
  report.witnesses = std::move(witnesses);
  for (const auto& s : report.sub_verdicts) {
    report.residual = std::max(report.residual, s.residual);
    if (s.verdict == Verdict::Fail) report.verdict = Verdict::Fail;
  }
  return report;
}

}  // namespace pencilkit
