#include "assertain/refinement.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <set>
#include <sstream>

#include "assertain/errors.hpp"
#include "assertain/sv_text.hpp"

namespace assertain {

namespace {

using sv::Token;
using Kind = sv::Token::Kind;

bool is_punct(const Token& t, std::string_view p) {
  return t.kind == Kind::Punct && t.text == p;
}

bool ident_is(const Token& t, std::string_view w) {
  return t.kind == Kind::Identifier && t.text == w;
}

std::vector<std::string> macro_uses(std::string_view sva_text) {
  std::vector<std::string> out;
  const std::string stripped = sv::strip_comments_and_strings(sva_text);
  for (const auto& t : sv::tokenize(stripped)) {
    if (t.kind == Kind::Directive && !is_standard_directive(t.text) &&
        std::find(out.begin(), out.end(), t.text) == out.end()) {
      out.push_back(t.text);
    }
  }
  return out;
}

std::string property_name_of(const LintReport& report) {
  const std::string stripped = sv::strip_comments_and_strings(report.sva_text);
  const auto toks = sv::tokenize(stripped);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (ident_is(toks[i], "property") && toks[i + 1].kind == Kind::Identifier &&
        !sv::is_keyword(toks[i + 1].text)) {
      if (i > 0 && (ident_is(toks[i - 1], "assert") || ident_is(toks[i - 1], "assume") ||
                    ident_is(toks[i - 1], "cover")))
        continue;
      return toks[i + 1].text;
    }
  }
  return {};
}

std::string comment_block(std::string_view label, std::string_view text) {
  std::ostringstream out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    out << "  // " << (first ? std::string(label) + ": " : std::string("  ")) << line
        << "\n";
    first = false;
  }
  return out.str();
}

std::string indent_block(std::string_view text, const char* pad) {
  std::ostringstream out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    out << (line.empty() ? "" : pad) << line << "\n";
  }
  return out.str();
}

int numeric_range_width(const std::string& range) {
  // "[msb:lsb]" with integer bounds; -1 when symbolic
  int msb = 0, lsb = 0;
  if (std::sscanf(range.c_str(), "[ %d : %d ]", &msb, &lsb) == 2 ||
      std::sscanf(range.c_str(), "[%d:%d]", &msb, &lsb) == 2) {
    return std::abs(msb - lsb) + 1;
  }
  return -1;
}

std::string timestamp_line(const RenderOptions& options) {
  if (options.deterministic_timestamps) return "(deterministic)";
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// One renderable assertion: the property/assert text plus the label and
// $error guarantee.
std::string render_assertion(const AcceptedProperty& item, int index) {
  const std::string& sva = item.triplet.sva;
  const std::string name = property_name_of(item.report);
  std::ostringstream out;

  const bool has_assert = sva.find("assert") != std::string::npos;
  const bool has_endproperty = sva.find("endproperty") != std::string::npos;
  const std::string label =
      "a_" + std::to_string(index) + (name.empty() ? "" : "_" + name);

  if (has_endproperty && !has_assert) {
    out << indent_block(sva, "  ");
    const std::string ref = name.empty() ? "/* unnamed */" : name;
    out << "  " << label << ": assert property (" << ref << ") else $error(\""
        << (name.empty() ? label : name) << " failed\");\n";
    return out.str();
  }
  if (has_assert) {
    std::string text = sva;
    if (text.find("$error") == std::string::npos) {
      const std::size_t semi = text.rfind(';');
      const std::string msg =
          " else $error(\"" + (name.empty() ? label : name) + " failed\");";
      if (semi != std::string::npos) {
        text = text.substr(0, semi) + msg + text.substr(semi + 1);
      } else {
        text += msg;
      }
    }
    out << indent_block(text, "  ");
    return out.str();
  }
  // bare property expression
  out << "  " << label << ": assert property (" << sva << ") else $error(\"" << label
      << " failed\");\n";
  return out.str();
}

struct FencedBlock {
  std::string label;
  std::string body;
};

std::vector<FencedBlock> fenced_blocks(const std::string& text) {
  std::vector<FencedBlock> blocks;
  std::istringstream in(text);
  std::string line;
  bool open = false;
  FencedBlock cur;
  std::ostringstream body;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.rfind("```", 0) == 0) {
      if (!open) {
        open = true;
        cur.label = trimmed.substr(3);
        cur.label.erase(0, cur.label.find_first_not_of(" \t"));
        const std::size_t end = cur.label.find_last_not_of(" \t\r");
        cur.label = end == std::string::npos ? "" : cur.label.substr(0, end + 1);
        body.str("");
      } else {
        open = false;
        cur.body = body.str();
        blocks.push_back(cur);
      }
      continue;
    }
    if (open) body << line << "\n";
  }
  return blocks;
}

// Assertion units inside a polished block: property..endproperty spans
// plus standalone assert statements.
std::vector<std::string> assertion_units(const std::string& block) {
  std::vector<std::string> units;
  const std::string stripped = sv::strip_comments_and_strings(block);
  const auto toks = sv::tokenize(stripped);
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // token ranges

  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (ident_is(toks[i], "property") && i + 1 < toks.size() &&
        toks[i + 1].kind == Kind::Identifier && !sv::is_keyword(toks[i + 1].text)) {
      if (i > 0 && (ident_is(toks[i - 1], "assert") || ident_is(toks[i - 1], "assume") ||
                    ident_is(toks[i - 1], "cover")))
        continue;
      std::size_t j = i;
      while (j < toks.size() && !ident_is(toks[j], "endproperty")) ++j;
      if (j < toks.size()) {
        spans.emplace_back(i, j);
        units.push_back(block.substr(
            toks[i].pos, toks[j].pos + std::string("endproperty").size() - toks[i].pos));
        i = j;
      }
    }
  }
  auto inside_span = [&](std::size_t i) {
    return std::any_of(spans.begin(), spans.end(),
                       [i](auto s) { return i >= s.first && i <= s.second; });
  };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!ident_is(toks[i], "assert") || inside_span(i)) continue;
    // `assert property (name);` referencing a named property is covered
    // by that property's own unit
    if (i + 2 < toks.size() && ident_is(toks[i + 1], "property") &&
        is_punct(toks[i + 2], "(")) {
      // peek: single identifier inside -> instantiation of a named property
      std::size_t close = i + 3;
      int depth = 1;
      std::size_t inner_tokens = 0;
      bool only_ident = true;
      for (; close < toks.size() && depth > 0; ++close) {
        if (is_punct(toks[close], "(")) ++depth;
        else if (is_punct(toks[close], ")")) { --depth; if (depth == 0) break; }
        else {
          ++inner_tokens;
          if (toks[close].kind != Kind::Identifier) only_ident = false;
        }
      }
      if (inner_tokens == 1 && only_ident) {
        i = close;
        continue;
      }
    }
    std::size_t begin = i;
    // include a preceding label
    if (i >= 2 && is_punct(toks[i - 1], ":") && toks[i - 2].kind == Kind::Identifier)
      begin = i - 2;
    std::size_t j = i;
    while (j < toks.size() && !is_punct(toks[j], ";")) ++j;
    const std::size_t end_pos = j < toks.size() ? toks[j].pos + 1 : block.size();
    units.push_back(block.substr(toks[begin].pos, end_pos - toks[begin].pos));
    i = j;
  }
  return units;
}

}  // namespace

bool is_standard_directive(std::string_view name) {
  static const std::set<std::string, std::less<>> kDirectives = {
      "define",  "undef",     "ifdef",      "ifndef",      "elsif",
      "else",    "endif",     "include",    "timescale",   "default_nettype",
      "celldefine", "endcelldefine", "resetall", "line", "pragma",
      "begin_keywords", "end_keywords"};
  return kDirectives.contains(name);
}

const char* rejection_kind_name(RejectionReason::Kind k) {
  switch (k) {
    case RejectionReason::Kind::MissingIdentifier: return "MissingIdentifier";
    case RejectionReason::Kind::UndefinedMacro: return "UndefinedMacro";
    case RejectionReason::Kind::LintMandatoryFail: return "LintMandatoryFail";
  }
  return "?";
}

std::string RejectionReason::describe() const {
  std::string out = rejection_kind_name(kind);
  out += "{";
  for (std::size_t i = 0; i < details.size(); ++i) {
    if (i > 0) out += ", ";
    out += details[i];
  }
  out += "}";
  return out;
}

FilterResult verify_and_filter(const RawPropertySet& set, const DesignContext& ctx,
                               const FilterOptions& options) {
  FilterResult result;
  for (const auto& triplet : set.triplets) {
    LintReport report = lint(triplet.sva, options.clock_hint, options.reset_hint);

    if (report.unparseable) {
      result.rejected.push_back(
          {triplet,
           {RejectionReason::Kind::LintMandatoryFail, {"unparseable"}}});
      continue;
    }

    // Semantic consistency: every referenced identifier must exist in
    // the design (property-local declarations already excluded).
    std::vector<std::string> referenced(report.referenced_identifiers.begin(),
                                        report.referenced_identifiers.end());
    GroundingVerdict verdict = contains_all(ctx.identifiers, referenced);
    if (!verdict.ok) {
      result.rejected.push_back(
          {triplet, {RejectionReason::Kind::MissingIdentifier, verdict.missing}});
      continue;
    }

    // Macro uses must resolve in the design or the directive whitelist.
    std::vector<std::string> undefined;
    for (const auto& m : macro_uses(triplet.sva)) {
      if (!ctx.identifiers.macro_names.contains(m)) undefined.push_back(m);
    }
    if (!undefined.empty()) {
      result.rejected.push_back(
          {triplet, {RejectionReason::Kind::UndefinedMacro, undefined}});
      continue;
    }

    if (!report.passed_all_mandatory && !options.lint_advisory_only) {
      std::vector<std::string> failed;
      for (const auto& r : report.results) {
        if (r.rule_id[0] == 'R' && r.status == RuleStatus::Fail)
          failed.push_back(r.rule_id);
      }
      result.rejected.push_back(
          {triplet, {RejectionReason::Kind::LintMandatoryFail, failed}});
      continue;
    }

    AcceptedProperty accepted{triplet, std::move(report)};
    for (const auto& tag : derive_tags(accepted.report)) {
      auto& tags = accepted.triplet.tags;
      if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags.push_back(tag);
    }
    result.accepted.push_back(std::move(accepted));
  }
  return result;
}

std::string render_sva_file(const std::vector<AcceptedProperty>& accepted,
                            const DesignContext& ctx, const RenderOptions& options) {
  std::ostringstream out;
  out << "// -------------------------------------------------------------------\n"
      << "// " << options.tool_name << " generated assertion suite\n"
      << "// design_id: " << ctx.design_id << "\n"
      << "// generated: " << timestamp_line(options) << "\n"
      << "// -------------------------------------------------------------------\n"
      << "`timescale 1ns / 1ps\n\n";

  if (accepted.empty()) {
    out << "// WARNING: no assertions survived refinement; header-only file.\n";
    return out.str();
  }

  // classify every referenced name
  std::set<std::string> inputs, needed_typedefs, needed_macros, needed_params;
  for (const auto& item : accepted) {
    for (const auto& name : item.report.referenced_identifiers) {
      if (auto it = ctx.enum_owner.find(name); it != ctx.enum_owner.end()) {
        needed_typedefs.insert(it->second);
        continue;
      }
      if (auto it = ctx.field_owner.find(name); it != ctx.field_owner.end()) {
        needed_typedefs.insert(it->second);
        continue;
      }
      if (ctx.identifiers.typedef_names.contains(name)) {
        needed_typedefs.insert(name);
        continue;
      }
      if (ctx.identifiers.parameters.contains(name)) {
        needed_params.insert(name);
        continue;
      }
      inputs.insert(name);
    }
    for (const auto& m : macro_uses(item.triplet.sva)) needed_macros.insert(m);
  }
  // a declared signal of replicated typedef type keeps its type
  for (const auto& name : inputs) {
    if (auto it = ctx.declared_types.find(name); it != ctx.declared_types.end()) {
      if (ctx.typedef_texts.contains(it->second)) needed_typedefs.insert(it->second);
    }
  }

  for (const auto& m : needed_macros) {
    auto it = ctx.macro_bodies.find(m);
    out << "`define " << m;
    if (it != ctx.macro_bodies.end() && !it->second.empty()) out << " " << it->second;
    out << "\n";
  }
  if (!needed_macros.empty()) out << "\n";

  // typedefs first: wrapper ports may use them
  for (const auto& td : needed_typedefs) {
    auto it = ctx.typedef_texts.find(td);
    if (it == ctx.typedef_texts.end()) continue;
    out << it->second << "\n\n";
  }

  out << "module " << options.tool_name << "_assertions (\n";
  std::size_t count = 0;
  for (const auto& name : inputs) {
    ++count;
    std::string decl = "  input ";
    std::string comment;
    auto type_it = ctx.declared_types.find(name);
    auto range_it = ctx.declared_ranges.find(name);
    if (type_it != ctx.declared_types.end() &&
        ctx.typedef_texts.contains(type_it->second)) {
      decl += type_it->second + " " + name;
    } else if (range_it != ctx.declared_ranges.end()) {
      if (numeric_range_width(range_it->second) < 0) {
        comment = "  // symbolic width, taken verbatim from the design";
      }
      decl += "logic " + range_it->second + " " + name;
    } else {
      decl += "logic " + name;
      comment = "  // width unknown, defaulted to 1 bit";
    }
    out << decl << (count == inputs.size() ? "" : ",") << comment << "\n";
  }
  out << ");\n\n";

  for (const auto& p : needed_params) {
    out << "  localparam int " << p << " = 0;  // design parameter, placeholder value\n";
  }
  if (!needed_params.empty()) out << "\n";

  // security sections (ascending CWE), then functional
  std::vector<int> section_ids;
  for (const auto& item : accepted) {
    if (item.triplet.cwe_id > 0 &&
        std::find(section_ids.begin(), section_ids.end(), item.triplet.cwe_id) ==
            section_ids.end())
      section_ids.push_back(item.triplet.cwe_id);
  }
  std::sort(section_ids.begin(), section_ids.end());
  const bool has_functional =
      std::any_of(accepted.begin(), accepted.end(),
                  [](const auto& a) { return a.triplet.cwe_id == 0; });
  if (has_functional) section_ids.push_back(0);

  int index = 0;
  for (int section : section_ids) {
    out << "  // =================================================================\n";
    if (section == 0) {
      out << "  // Functional properties\n";
    } else {
      std::string title;
      for (const auto& item : accepted) {
        if (item.triplet.cwe_id == section) {
          title = item.triplet.cwe_title;
          break;
        }
      }
      out << "  // CWE-" << section << ": " << title << "\n";
    }
    out << "  // =================================================================\n\n";
    for (const auto& item : accepted) {
      if (item.triplet.cwe_id != section) continue;
      ++index;
      out << comment_block("Scenario", item.triplet.scenario);
      out << comment_block("Property", item.triplet.nl_property);
      out << render_assertion(item, index);
      out << "\n";
    }
  }
  out << "endmodule\n";
  return out.str();
}

std::vector<std::string> audit_grounding(std::string_view sva_file_text,
                                         const DesignContext& ctx) {
  DesignContext own = analyze_source(std::string(sva_file_text));
  const std::string stripped = sv::strip_comments_and_strings(sva_file_text);
  const auto toks = sv::tokenize(stripped);

  std::set<std::string> declared(own.identifiers.flat().begin(),
                                 own.identifiers.flat().end());
  declared.insert(own.module_names.begin(), own.module_names.end());
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (ident_is(toks[i], "property") && toks[i + 1].kind == Kind::Identifier &&
        !sv::is_keyword(toks[i + 1].text))
      declared.insert(toks[i + 1].text);
    if (toks[i].kind == Kind::Identifier && is_punct(toks[i + 1], ":"))
      declared.insert(toks[i].text);
  }

  std::vector<std::string> missing;
  std::set<std::string> seen;
  for (const auto& t : toks) {
    if (t.kind != Kind::Identifier || sv::is_keyword(t.text)) continue;
    if (declared.contains(t.text) || ctx.identifiers.contains(t.text)) continue;
    if (seen.insert(t.text).second) missing.push_back(t.text);
  }
  return missing;
}

PolishOutcome llm_polish(const std::vector<AcceptedProperty>& accepted,
                         const DesignContext& ctx, LlmGateway& gateway,
                         bool intricate, const RenderOptions& render_options,
                         const FilterOptions& filter_options) {
  auto fallback = [&](std::string reason) {
    return PolishOutcome{render_sva_file(accepted, ctx, render_options), true,
                         std::move(reason)};
  };

  std::ostringstream prompt;
  prompt << "You are an expert hardware security engineer. Refine the "
            "validated SystemVerilog assertions below into one clean, "
            "compilable .sva module with a timescale directive, a wrapper "
            "module declaring the referenced design signals, any needed "
            "typedefs or macros, section annotations, and a meaningful "
            "$error message per assertion. Use only identifiers that exist "
            "in the RTL source. Reply with exactly one fenced code block "
            "labeled systemverilog and nothing else.\n";
  if (intricate) {
    prompt << "Produce an intricate property suite: 14-20 properties, at "
              "least six with multi-cycle or cross-module dependencies, "
              "grouped into sections, optionally with cover property "
              "blocks for legal sequences.\n";
  }
  prompt << "\nValidated assertions:\n";
  for (const auto& item : accepted) {
    prompt << "- CWE " << item.triplet.cwe_id << " | " << item.triplet.scenario
           << " | " << item.triplet.nl_property << "\n"
           << item.triplet.sva << "\n";
  }
  prompt << "\nRTL design source (verbatim):\n" << ctx.source_text;

  GatewayRequest req;
  req.stage = Stage::Refine;
  req.prompt = prompt.str();
  req.seed = derive_seed(gateway.config().seed_base, Stage::Refine, 0, 1);

  GatewayReply reply;
  try {
    reply = gateway.complete(req);
  } catch (const GatewayError& e) {
    return fallback(std::string("refine call failed: ") + e.what());
  }

  std::vector<FencedBlock> blocks = fenced_blocks(reply.text);
  std::size_t sv_blocks = 0;
  std::string block_text;
  for (const auto& b : blocks) {
    if (b.label == "systemverilog") {
      ++sv_blocks;
      block_text = b.body;
    }
  }
  if (sv_blocks != 1) {
    return fallback("expected exactly one systemverilog fenced block, got " +
                    std::to_string(sv_blocks));
  }

  const std::vector<std::string> units = assertion_units(block_text);
  if (units.empty()) {
    return fallback("polished block contains no assertions");
  }

  DesignContext block_decl = analyze_source(block_text);
  auto block_declared = [&](const std::string& name) {
    if (block_decl.identifiers.contains(name)) return true;
    return std::find(block_decl.module_names.begin(), block_decl.module_names.end(),
                     name) != block_decl.module_names.end();
  };

  for (const auto& unit : units) {
    LintReport report = lint(unit, filter_options.clock_hint, filter_options.reset_hint);
    if (report.unparseable || !report.passed_all_mandatory) {
      std::string rules;
      for (const auto& r : report.results) {
        if (r.rule_id[0] == 'R' && r.status == RuleStatus::Fail) {
          if (!rules.empty()) rules += ",";
          rules += r.rule_id;
        }
      }
      return fallback("polished assertion fails mandatory lint (" + rules + ")");
    }
    for (const auto& name : report.referenced_identifiers) {
      if (!ctx.identifiers.contains(name) && !block_declared(name)) {
        return fallback("polished assertion references unknown identifier '" +
                        name + "'");
      }
    }
    for (const auto& m : macro_uses(unit)) {
      if (!ctx.identifiers.macro_names.contains(m) &&
          !block_decl.identifiers.macro_names.contains(m)) {
        return fallback("polished assertion uses undefined macro `" + m + "`");
      }
    }
  }

  // written verbatim as a standalone .sva file
  return {block_text, false, ""};
}

}  // namespace assertain
