#include "assertain/semantic_alignment.hpp"

#include <algorithm>
#include <sstream>

#include "assertain/errors.hpp"

namespace assertain {

std::string build_classification_prompt(const DesignContext& ctx,
                                        const KnowledgeBase& kb) {
  std::ostringstream out;
  out << "You are an expert hardware security engineer.\n"
      << "Classify the RTL design below into exactly one of these hardware "
         "design categories. Answer with the category name on a single "
         "line and nothing else.\n\nCategories:\n";
  for (const auto& c : kb.categories()) out << "- " << c.name << "\n";
  out << "\nInfer the top-level module and hierarchy from the source.\n";
  if (ctx.top_module_hint) {
    out << "Top-level module hint: " << *ctx.top_module_hint << "\n";
  }
  out << "\nRTL design source:\n" << ctx.source_text << "\n";
  return out.str();
}

namespace {

std::string first_non_empty_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  return {};
}

}  // namespace

const DesignCategory& classify_design(const DesignContext& ctx,
                                      const KnowledgeBase& kb,
                                      LlmGateway& gateway) {
  GatewayRequest req;
  req.stage = Stage::Classify;
  req.prompt = build_classification_prompt(ctx, kb);
  req.seed = derive_seed(gateway.config().seed_base, Stage::Classify, 0, 1);
  GatewayReply reply = gateway.complete(req);

  const std::string answer = first_non_empty_line(reply.text);
  try {
    return kb.lookup_category(answer);
  } catch (const NoSuchCategoryError& e) {
    throw ClassificationUnresolvableError(
        "classification reply does not resolve to a design category: " +
            std::string(e.what()),
        reply.text);
  }
}

std::vector<ThreatClass> resolve_threats(const std::vector<std::string>& names,
                                         const KnowledgeBase& kb) {
  if (names.empty()) throw StageError("at least one threat name is required");
  std::vector<ThreatClass> out;
  std::vector<std::string> seen;
  for (const auto& name : names) {
    const ThreatClass& t = kb.lookup_threat(name);  // throws NoSuchThreatError
    if (std::find(seen.begin(), seen.end(), t.name) != seen.end()) continue;
    seen.push_back(t.name);
    out.push_back(t);
  }
  return out;
}

std::set<int> map_threats(const std::vector<std::string>& names,
                          const KnowledgeBase& kb) {
  std::set<int> ids;
  for (const auto& t : resolve_threats(names, kb)) {
    ids.insert(t.cwe_ids.begin(), t.cwe_ids.end());
  }
  return ids;
}

TargetWeaknessSet intersect(const DesignCategory& category,
                            const std::vector<ThreatClass>& threats) {
  TargetWeaknessSet target;
  target.category = category;
  target.threats = threats;
  target.c_struct.insert(category.cwe_ids.begin(), category.cwe_ids.end());
  for (const auto& t : threats) {
    target.c_threat.insert(t.cwe_ids.begin(), t.cwe_ids.end());
  }
  std::set_intersection(target.c_struct.begin(), target.c_struct.end(),
                        target.c_threat.begin(), target.c_threat.end(),
                        std::inserter(target.c_target, target.c_target.end()));
  for (int id : target.c_target) {
    WeaknessProvenance prov;
    prov.category_row = category.name;
    for (const auto& t : threats) {
      if (std::find(t.cwe_ids.begin(), t.cwe_ids.end(), id) != t.cwe_ids.end()) {
        prov.threat_rows.push_back(t.name);
      }
    }
    target.provenance.emplace(id, std::move(prov));
  }
  return target;
}

}  // namespace assertain
