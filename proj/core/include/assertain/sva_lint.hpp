#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace assertain {

enum class RuleStatus { Pass, Fail, NotApplicable };

const char* rule_status_name(RuleStatus s);

struct RuleResult {
  std::string rule_id;  // R1..R6, A1
  RuleStatus status = RuleStatus::Pass;
  std::string detail;
};

// Mandatory rules R1-R6:
//   R1 implication form with a non-constant antecedent
//   R2 named property or labeled assert
//   R3 disable iff reset clause
//   R4 clock signal not reused in the property body
//   R5 consequent is not constant-true
//   R6 only whitelisted $ built-ins
// Advisory A1: edge-anchored sequence start ($rose/$fell).
struct LintReport {
  std::string sva_text;
  std::vector<RuleResult> results;
  std::set<std::string> referenced_identifiers;  // minus keywords/builtins/locals
  std::set<std::string> local_declarations;      // property names, local logic/genvar
  bool passed_all_mandatory = false;
  bool unparseable = false;

  const RuleResult* find(std::string_view rule_id) const;
};

LintReport lint(std::string_view sva_text,
                std::optional<std::string> clock_hint = {},
                std::optional<std::string> reset_hint = {});

// Stable tag strings derived from a report: "next-cycle", "multi-cycle",
// "edge-anchored", "advisory:<id>".
std::vector<std::string> derive_tags(const LintReport& report);

}  // namespace assertain
