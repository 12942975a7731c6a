#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "assertain/knowledge_base.hpp"
#include "assertain/llm_gateway.hpp"
#include "assertain/rtl_context.hpp"

namespace assertain {

struct WeaknessProvenance {
  std::string category_row;            // table row that contributed the id
  std::vector<std::string> threat_rows;
};

struct TargetWeaknessSet {
  DesignCategory category;
  std::vector<ThreatClass> threats;
  std::set<int> c_struct;
  std::set<int> c_threat;
  std::set<int> c_target;  // ascending id: drives generation order
  std::map<int, WeaknessProvenance> provenance;
};

std::string build_classification_prompt(const DesignContext& ctx,
                                        const KnowledgeBase& kb);

// One gateway call; the first non-empty reply line is resolved through
// closest-match category lookup. Throws ClassificationUnresolvableError
// when the reply resolves to nothing within the edit bound.
const DesignCategory& classify_design(const DesignContext& ctx,
                                      const KnowledgeBase& kb,
                                      LlmGateway& gateway);

// Resolves each name (duplicates collapse); any unresolvable name fails
// the whole call.
std::vector<ThreatClass> resolve_threats(const std::vector<std::string>& names,
                                         const KnowledgeBase& kb);

std::set<int> map_threats(const std::vector<std::string>& names,
                          const KnowledgeBase& kb);

// c_target = c_struct ∩ c_threat; emptiness is reported by the caller,
// not here.
TargetWeaknessSet intersect(const DesignCategory& category,
                            const std::vector<ThreatClass>& threats);

}  // namespace assertain
