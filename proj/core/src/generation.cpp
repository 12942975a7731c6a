#include "assertain/generation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "assertain/embedded_data.hpp"
#include "assertain/errors.hpp"

namespace assertain {

const char kReplyTableHeader[] =
    "CWE ID | Security Scenario | NL Security Properties | SVAs";

namespace {

std::string trim(std::string_view s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

std::string normalize_ws_lower(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending = true;
      continue;
    }
    if (pending) {
      out += ' ';
      pending = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// Splits a markdown table line on unescaped pipes; outer empties from
// leading/trailing pipes are removed, `\|` unescapes.
std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
      cur += '|';
      ++i;
    } else if (line[i] == '|') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += line[i];
    }
  }
  cells.push_back(cur);
  if (!cells.empty() && trim(cells.front()).empty()) cells.erase(cells.begin());
  if (!cells.empty() && trim(cells.back()).empty()) cells.pop_back();
  for (auto& c : cells) c = trim(c);
  return cells;
}

bool is_separator_row(const std::vector<std::string>& cells) {
  if (cells.empty()) return false;
  for (const auto& c : cells) {
    if (c.find_first_not_of("-: ") != std::string::npos) return false;
  }
  return true;
}

bool header_matches(const std::vector<std::string>& cells) {
  static const std::vector<std::string> expected = {
      "cwe id", "security scenario", "nl security properties", "svas"};
  if (cells.size() != expected.size()) return false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (normalize_ws_lower(cells[i]) != expected[i]) return false;
  }
  return true;
}

bool is_nonneg_integer(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Strips a surrounding code fence or backticks from an SVA cell.
std::string clean_sva_cell(std::string cell) {
  std::string s = trim(cell);
  if (s.starts_with("```")) {
    std::size_t nl = s.find_first_of("\n ", 3);
    std::size_t open_end = 3;
    // optional language tag directly after the fence
    std::size_t tag_end = 3;
    while (tag_end < s.size() && (std::isalnum(static_cast<unsigned char>(s[tag_end]))))
      ++tag_end;
    open_end = tag_end;
    (void)nl;
    std::size_t close = s.rfind("```");
    if (close != std::string::npos && close >= open_end) {
      s = trim(s.substr(open_end, close - open_end));
    }
  } else if (s.size() >= 2 && s.front() == '`' && s.back() == '`') {
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

std::string title_for(int cwe_id, const KnowledgeBase& kb,
                      std::vector<std::string>* diagnostics) {
  if (cwe_id == 0) return "Functional";
  if (const CweEntry* e = kb.find_entry(cwe_id)) return e->title;
  if (diagnostics) {
    diagnostics->push_back("row kept with placeholder title: CWE-" +
                           std::to_string(cwe_id) + " is not in the knowledge base");
  }
  return "CWE-" + std::to_string(cwe_id);
}

}  // namespace

std::string PromptSpec::render() const {
  std::ostringstream out;
  out << role_context << "\n\n"
      << vulnerability_context << "\n\n"
      << rulebook << "\n\n"
      << table_schema_instruction << "\n\n"
      << functional_pass_instruction << "\n\n"
      << "RTL design source (verbatim):\n"
      << design_context;
  return out.str();
}

const char* drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::NonNumericCwe: return "NonNumericCwe";
    case DropReason::EmptyCell: return "EmptyCell";
  }
  return "?";
}

PromptSpec build_hybrid_prompt(const DesignContext& ctx, const CweEntry& entry) {
  if (entry.id <= 0) {
    throw StageError(
        "functional rows are requested inside every prompt, never seeded "
        "as a weakness");
  }
  PromptSpec spec;
  spec.role_context =
      "You are an expert hardware security engineer generating "
      "security-centric SystemVerilog Assertions for formal property "
      "verification. Infer the top-level module and hierarchy from the "
      "RTL; generate properties for internal logic and for interface "
      "protocols between connected modules. Produce multiple scenarios "
      "and properties for the weakness to maximize coverage.";

  {
    std::ostringstream v;
    v << "Target weakness: CWE-" << entry.id << " (" << entry.title << ")\n"
      << "Definition: " << entry.definition << "\n";
    if (!entry.consequences.empty()) {
      v << "Common consequences:\n";
      for (const auto& c : entry.consequences) v << "- " << c << "\n";
    }
    if (!entry.examples.empty()) {
      v << "Demonstrative examples:\n";
      for (const auto& e : entry.examples) v << "- " << e << "\n";
    }
    spec.vulnerability_context = v.str();
  }

  spec.design_context = ctx.source_text;
  spec.rulebook = data::rulebook_txt;

  spec.table_schema_instruction = std::string(
      "Reply with one strict markdown table and nothing else. The header "
      "row must be exactly:\n") + kReplyTableHeader +
      "\nOne property per row. Escape literal pipes inside cells as \\|. "
      "Rows whose CWE ID cell is not a number are discarded.";

  spec.functional_pass_instruction =
      "Additionally perform a functional property analysis: examine every "
      "module line by line (always blocks, FSMs, combinational "
      "assignments, handshakes, counters, FIFOs) and infer the intended "
      "behavior. Cover all provided modules and their key interactions; "
      "capture temporal sequencing, coincidence, gating, error handling, "
      "integrity, and liveness behaviors. Encode these functional rows "
      "with CWE ID = 0, using the same SVA rules.";

  return spec;
}

ParseOutcome parse_reply_table(std::string_view reply, const KnowledgeBase& kb,
                               int seed_weakness, int iteration,
                               std::string_view design_id) {
  ParseOutcome outcome;

  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(reply)};
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }

  // find the first table whose header matches the schema
  std::size_t row_index = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find('|') == std::string::npos) continue;
    if (header_matches(split_row(lines[i]))) {
      outcome.table_found = true;
      row_index = i + 1;
      break;
    }
  }
  if (!outcome.table_found) {
    outcome.diagnostics.push_back("no markdown table with the required header");
    return outcome;
  }

  for (std::size_t i = row_index; i < lines.size(); ++i) {
    if (lines[i].find('|') == std::string::npos) break;  // table ended
    std::vector<std::string> cells = split_row(lines[i]);
    if (is_separator_row(cells)) continue;

    while (cells.size() < 4) cells.emplace_back();
    const std::string& id_cell = cells[0];
    if (!is_nonneg_integer(id_cell)) {
      outcome.drops.push_back({DropReason::NonNumericCwe, lines[i]});
      continue;
    }
    PropertyTriplet t;
    t.cwe_id = std::stoi(id_cell);
    t.scenario = cells[1];
    t.nl_property = cells[2];
    t.sva = clean_sva_cell(cells[3]);
    if (t.scenario.empty() || t.nl_property.empty() || t.sva.empty()) {
      outcome.drops.push_back({DropReason::EmptyCell, lines[i]});
      continue;
    }
    t.cwe_title = title_for(t.cwe_id, kb, &outcome.diagnostics);
    t.source_weakness = seed_weakness;
    t.iteration_index = iteration;
    t.design_id = std::string(design_id);
    outcome.triplets.push_back(std::move(t));
  }
  return outcome;
}

RawPropertySet generate_for_target(const DesignContext& ctx,
                                   const TargetWeaknessSet& target, int n,
                                   const KnowledgeBase& kb, LlmGateway& gateway) {
  if (n < 1) throw StageError("iteration count must be >= 1");
  if (target.c_target.empty()) throw StageError("empty target weakness set");

  RawPropertySet raw;
  int successful_calls = 0;
  int attempted_calls = 0;

  for (int weakness : target.c_target) {  // std::set: ascending id order
    const CweEntry* entry = kb.find_entry(weakness);
    if (entry == nullptr) {
      raw.diagnostics.push_back("skipping unknown weakness CWE-" +
                                std::to_string(weakness));
      continue;
    }
    const PromptSpec prompt = build_hybrid_prompt(ctx, *entry);
    const std::string prompt_text = prompt.render();
    for (int iteration = 1; iteration <= n; ++iteration) {
      ++attempted_calls;
      GatewayRequest req;
      req.stage = Stage::Generate;
      req.prompt = prompt_text;
      req.seed =
          derive_seed(gateway.config().seed_base, Stage::Generate, weakness, iteration);
      GatewayReply reply;
      try {
        reply = gateway.complete(req);
      } catch (const GatewayError& e) {
        ++raw.failed_calls;
        raw.diagnostics.push_back("call failed (CWE-" + std::to_string(weakness) +
                                  ", iteration " + std::to_string(iteration) +
                                  "): " + e.what());
        continue;
      }
      ++successful_calls;
      ParseOutcome parsed =
          parse_reply_table(reply.text, kb, weakness, iteration, ctx.design_id);
      if (!parsed.table_found) {
        raw.diagnostics.push_back("no table in reply (CWE-" +
                                  std::to_string(weakness) + ", iteration " +
                                  std::to_string(iteration) + ")");
      }
      raw.per_weakness_counts[weakness] += static_cast<int>(parsed.triplets.size());
      for (auto& t : parsed.triplets) raw.triplets.push_back(std::move(t));
      for (auto& d : parsed.drops) raw.dropped.push_back(std::move(d));
      for (auto& d : parsed.diagnostics) raw.diagnostics.push_back(std::move(d));
    }
  }

  if (successful_calls == 0 && attempted_calls > 0) {
    throw StageError("all generation calls failed");
  }
  return dedup(std::move(raw));
}

std::string dedup_key(const PropertyTriplet& t) {
  return normalize_ws_lower(t.scenario) + "\x1f" + normalize_ws_lower(t.sva);
}

RawPropertySet dedup(RawPropertySet set) {
  std::vector<PropertyTriplet> kept;
  kept.reserve(set.triplets.size());
  std::set<std::string> seen;
  for (auto& t : set.triplets) {
    if (seen.insert(dedup_key(t)).second) kept.push_back(std::move(t));
  }
  set.triplets = std::move(kept);
  return set;
}

std::filesystem::path stage_jsonl(const RawPropertySet& set,
                                  const std::filesystem::path& workspace) {
  const std::filesystem::path file = workspace / "raw_properties.jsonl";
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw WorkspaceError("cannot write staging file: " + file.string());
  }
  for (const auto& t : set.triplets) {
    nlohmann::ordered_json j;
    j["cwe_id"] = t.cwe_id;
    j["cwe_title"] = t.cwe_title;
    j["scenario"] = t.scenario;
    j["nl_property"] = t.nl_property;
    j["sva"] = t.sva;
    j["tags"] = t.tags;
    j["source_weakness"] = t.source_weakness;
    j["iteration_index"] = t.iteration_index;
    j["design_id"] = t.design_id;
    out << j.dump() << "\n";
  }
  out.flush();
  if (!out) throw WorkspaceError("write failure on " + file.string());
  return file;
}

std::vector<PropertyTriplet> load_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw WorkspaceError("cannot read staging file: " + file.string());
  std::vector<PropertyTriplet> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    PropertyTriplet t;
    t.cwe_id = j.at("cwe_id").get<int>();
    t.cwe_title = j.at("cwe_title").get<std::string>();
    t.scenario = j.at("scenario").get<std::string>();
    t.nl_property = j.at("nl_property").get<std::string>();
    t.sva = j.at("sva").get<std::string>();
    t.tags = j.at("tags").get<std::vector<std::string>>();
    t.source_weakness = j.at("source_weakness").get<int>();
    t.iteration_index = j.at("iteration_index").get<int>();
    t.design_id = j.at("design_id").get<std::string>();
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace assertain
