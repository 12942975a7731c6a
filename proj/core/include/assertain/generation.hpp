#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "assertain/knowledge_base.hpp"
#include "assertain/llm_gateway.hpp"
#include "assertain/rtl_context.hpp"
#include "assertain/semantic_alignment.hpp"

namespace assertain {

// The layered generation prompt. design_context is byte-equal to the
// design source; the rulebook is a fixed versioned asset.
struct PromptSpec {
  std::string role_context;
  std::string vulnerability_context;
  std::string design_context;
  std::string rulebook;
  std::string table_schema_instruction;
  std::string functional_pass_instruction;

  std::string render() const;
};

// The literal table header generation replies must use.
extern const char kReplyTableHeader[];

struct PropertyTriplet {
  int cwe_id = 0;  // 0 = functional
  std::string cwe_title;
  std::string scenario;
  std::string nl_property;
  std::string sva;
  std::vector<std::string> tags;
  int source_weakness = 0;  // CWE id that seeded the prompt
  int iteration_index = 0;  // 1..N
  std::string design_id;
};

enum class DropReason { NonNumericCwe, EmptyCell };

const char* drop_reason_name(DropReason r);

struct DropRecord {
  DropReason reason;
  std::string row_text;
};

struct ParseOutcome {
  bool table_found = false;
  std::vector<PropertyTriplet> triplets;
  std::vector<DropRecord> drops;
  std::vector<std::string> diagnostics;
};

struct RawPropertySet {
  std::vector<PropertyTriplet> triplets;
  std::vector<DropRecord> dropped;
  std::map<int, int> per_weakness_counts;
  int failed_calls = 0;
  std::vector<std::string> diagnostics;
};

// entry.id must be positive: functional rows are requested inside every
// prompt, never seeded as a weakness.
PromptSpec build_hybrid_prompt(const DesignContext& ctx, const CweEntry& entry);

// Locates the first markdown table with the required header and turns
// its numeric rows into triplets; everything else is dropped with a
// reason. table_found=false means the reply had no such table.
ParseOutcome parse_reply_table(std::string_view reply, const KnowledgeBase& kb,
                               int seed_weakness, int iteration,
                               std::string_view design_id);

// n gateway calls per weakness, ascending-id order, deduplicated.
RawPropertySet generate_for_target(const DesignContext& ctx,
                                   const TargetWeaknessSet& target, int n,
                                   const KnowledgeBase& kb,
                                   LlmGateway& gateway);

// Key = (normalized scenario, normalized sva); first occurrence wins.
RawPropertySet dedup(RawPropertySet set);

std::string dedup_key(const PropertyTriplet& t);

std::filesystem::path stage_jsonl(const RawPropertySet& set,
                                  const std::filesystem::path& workspace);

std::vector<PropertyTriplet> load_jsonl(const std::filesystem::path& file);

}  // namespace assertain
