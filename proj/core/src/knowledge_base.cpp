#include "assertain/knowledge_base.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "assertain/embedded_data.hpp"
#include "assertain/errors.hpp"

namespace assertain {

namespace {

using nlohmann::json;

std::vector<json> parse_jsonl(std::string_view text, const char* what) {
  std::vector<json> records;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw KnowledgeBaseError(std::string("corrupt ") + what + " record at line " +
                               std::to_string(lineno));
    }
    records.push_back(std::move(j));
  }
  return records;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key)) {
    for (const auto& item : j.at(key)) out.push_back(item.get<std::string>());
  }
  return out;
}

// Closest-match resolution shared by category and threat lookup. Returns
// the winning index or npos; `nearest` always names the closest row.
template <typename Row>
std::size_t closest_match(std::string_view raw, const std::vector<Row>& rows,
                          std::string* nearest) {
  const std::string norm = normalize_label(raw);
  std::size_t best = std::string::npos;
  std::size_t best_dist = std::string::npos;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string cand = normalize_label(rows[i].name);
    if (cand == norm) {
      *nearest = rows[i].name;
      return i;
    }
    std::size_t d = edit_distance(norm, cand);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  if (best == std::string::npos) {
    nearest->clear();
    return std::string::npos;
  }
  *nearest = rows[best].name;
  const std::size_t longest =
      std::max(norm.size(), normalize_label(rows[best].name).size());
  const std::size_t bound = (longest + 2) / 3;  // ceil(len/3)
  return best_dist <= bound ? best : std::string::npos;
}

}  // namespace

std::string normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

KnowledgeBase KnowledgeBase::load() {
  return load_from_text(data::cwe_entries_jsonl, data::design_categories_jsonl,
                        data::threat_classes_jsonl);
}

KnowledgeBase KnowledgeBase::load_from_text(std::string_view entries_jsonl,
                                            std::string_view categories_jsonl,
                                            std::string_view threats_jsonl) {
  KnowledgeBase kb;

  for (const auto& j : parse_jsonl(entries_jsonl, "CWE entry")) {
    if (j.contains("provenance")) {
      kb.provenance_ = j.at("provenance").dump();
      continue;
    }
    CweEntry e;
    e.id = j.at("id").get<int>();
    e.title = j.at("title").get<std::string>();
    e.definition = j.value("definition", std::string{});
    e.consequences = string_list(j, "consequences");
    e.examples = string_list(j, "examples");
    if (e.id <= 0) throw KnowledgeBaseError("CWE id must be positive");
    if (e.title.empty()) throw KnowledgeBaseError("CWE title must be non-empty");
    const int id = e.id;
    if (!kb.entries_.emplace(id, std::move(e)).second) {
      throw KnowledgeBaseError("duplicate CWE id " + std::to_string(id));
    }
  }

  for (const auto& j : parse_jsonl(categories_jsonl, "design category")) {
    DesignCategory c;
    c.name = j.at("name").get<std::string>();
    c.cwe_ids = j.at("cwe_ids").get<std::vector<int>>();
    kb.categories_.push_back(std::move(c));
  }
  for (const auto& j : parse_jsonl(threats_jsonl, "threat class")) {
    ThreatClass t;
    t.name = j.at("name").get<std::string>();
    t.cwe_ids = j.at("cwe_ids").get<std::vector<int>>();
    kb.threats_.push_back(std::move(t));
  }

  if (kb.categories_.size() != 13) {
    throw KnowledgeBaseError("expected 13 design categories, got " +
                             std::to_string(kb.categories_.size()));
  }
  if (kb.threats_.size() != 8) {
    throw KnowledgeBaseError("expected 8 threat classes, got " +
                             std::to_string(kb.threats_.size()));
  }

  // Every mapped id must resolve to an entry (titles are required for
  // augmentation downstream).
  auto check_ids = [&kb](const std::string& row, const std::vector<int>& ids) {
    if (ids.empty()) throw KnowledgeBaseError("empty id list in row " + row);
    for (int id : ids) {
      if (!kb.entries_.contains(id)) {
        throw KnowledgeBaseError("row '" + row + "' references unknown CWE " +
                                 std::to_string(id));
      }
    }
  };
  for (const auto& c : kb.categories_) check_ids(c.name, c.cwe_ids);
  for (const auto& t : kb.threats_) check_ids(t.name, t.cwe_ids);

  return kb;
}

const CweEntry* KnowledgeBase::find_entry(int id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

const DesignCategory& KnowledgeBase::lookup_category(
    std::string_view name_raw) const {
  std::string nearest;
  std::size_t idx = closest_match(name_raw, categories_, &nearest);
  if (idx == std::string::npos) {
    throw NoSuchCategoryError("no design category matches '" +
                                  std::string(name_raw) + "' (nearest: '" +
                                  nearest + "')",
                              nearest);
  }
  return categories_[idx];
}

const ThreatClass& KnowledgeBase::lookup_threat(std::string_view name_raw) const {
  std::string nearest;
  std::size_t idx = closest_match(name_raw, threats_, &nearest);
  if (idx == std::string::npos) {
    throw NoSuchThreatError("no threat class matches '" + std::string(name_raw) +
                                "' (nearest: '" + nearest + "')",
                            nearest);
  }
  return threats_[idx];
}

}  // namespace assertain
