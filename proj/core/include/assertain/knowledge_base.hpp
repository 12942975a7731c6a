#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace assertain {

struct CweEntry {
  int id = 0;
  std::string title;
  std::string definition;
  std::vector<std::string> consequences;
  std::vector<std::string> examples;
};

struct DesignCategory {
  std::string name;
  std::vector<int> cwe_ids;
};

struct ThreatClass {
  std::string name;
  std::vector<int> cwe_ids;
};

// Lowercase, trim, collapse runs of whitespace to single spaces.
std::string normalize_label(std::string_view raw);

std::size_t edit_distance(std::string_view a, std::string_view b);

// Static knowledge base: weakness metadata plus the design-category and
// threat-class mapping tables. Immutable after load.
class KnowledgeBase {
 public:
  // Loads from the data vendored into the binary at build time.
  static KnowledgeBase load();

  // Loads from explicit JSONL text (used by tests and tools).
  static KnowledgeBase load_from_text(std::string_view entries_jsonl,
                                      std::string_view categories_jsonl,
                                      std::string_view threats_jsonl);

  const CweEntry* find_entry(int id) const;

  // Exact normalized match preferred, then closest edit-distance match
  // within ceil(max_len/3); throws NoSuchCategoryError / NoSuchThreatError
  // naming the nearest candidate.
  const DesignCategory& lookup_category(std::string_view name_raw) const;
  const ThreatClass& lookup_threat(std::string_view name_raw) const;

  const std::vector<DesignCategory>& categories() const { return categories_; }
  const std::vector<ThreatClass>& threats() const { return threats_; }
  const std::string& provenance() const { return provenance_; }

 private:
  std::map<int, CweEntry> entries_;
  std::vector<DesignCategory> categories_;
  std::vector<ThreatClass> threats_;
  std::string provenance_;
};

}  // namespace assertain
