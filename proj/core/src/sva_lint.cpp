#include "assertain/sva_lint.hpp"

#include <algorithm>

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

bool is_implication(const Token& t) {
  return t.kind == Kind::Punct && (t.text == "|->" || t.text == "|=>");
}

// A token range plus the relative paren depth of each token.
struct Slice {
  std::vector<Token> toks;
};

bool is_const_true(const std::vector<Token>& toks) {
  // unwrap fully parenthesized expressions
  std::size_t b = 0, e = toks.size();
  auto wrapped = [&]() {
    if (e - b < 2 || !is_punct(toks[b], "(") || !is_punct(toks[e - 1], ")"))
      return false;
    int depth = 0;
    for (std::size_t i = b; i < e; ++i) {
      if (is_punct(toks[i], "(")) ++depth;
      if (is_punct(toks[i], ")")) {
        --depth;
        if (depth == 0 && i != e - 1) return false;
      }
    }
    return depth == 0;
  };
  while (wrapped()) {
    ++b;
    --e;
  }
  if (e - b != 1) return false;
  const Token& t = toks[b];
  return t.kind == Kind::Number &&
         (t.text == "1" || t.text == "'1" || t.text == "1'b1" || t.text == "1'h1" ||
          t.text == "1'd1");
}

std::size_t find_matching_paren(const std::vector<Token>& toks, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < toks.size(); ++i) {
    if (is_punct(toks[i], "(")) ++depth;
    if (is_punct(toks[i], ")")) {
      --depth;
      if (depth == 0) return i;
    }
  }
  return toks.size();
}

bool local_decl_keyword(std::string_view w) {
  return w == "logic" || w == "bit" || w == "int" || w == "genvar" ||
         w == "var" || w == "reg";
}

}  // namespace

const char* rule_status_name(RuleStatus s) {
  switch (s) {
    case RuleStatus::Pass: return "pass";
    case RuleStatus::Fail: return "fail";
    case RuleStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

const RuleResult* LintReport::find(std::string_view rule_id) const {
  for (const auto& r : results) {
    if (r.rule_id == rule_id) return &r;
  }
  return nullptr;
}

LintReport lint(std::string_view sva_text, std::optional<std::string> clock_hint,
                std::optional<std::string> reset_hint) {
  LintReport report;
  report.sva_text = std::string(sva_text);

  const std::string stripped = sv::strip_comments_and_strings(sva_text);
  const std::vector<Token> toks = sv::tokenize(stripped);

  // tokenizer sanity: parens must balance
  {
    int depth = 0;
    bool broken = false;
    for (const auto& t : toks) {
      if (is_punct(t, "(")) ++depth;
      if (is_punct(t, ")")) {
        if (--depth < 0) broken = true;
      }
    }
    if (depth != 0 || broken) {
      report.unparseable = true;
      for (const char* id : {"R1", "R2", "R3", "R4", "R5", "R6"}) {
        report.results.push_back(
            {id, RuleStatus::Fail, "unparseable: unbalanced parentheses"});
      }
      report.results.push_back({"A1", RuleStatus::NotApplicable, ""});
      report.passed_all_mandatory = false;
      return report;
    }
  }

  // --- structural discovery ---

  std::string property_name;
  std::string assert_label;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (ident_is(toks[i], "property") && toks[i + 1].kind == Kind::Identifier &&
        !sv::is_keyword(toks[i + 1].text) && property_name.empty()) {
      // `assert property (name)` instantiates, it does not declare
      if (i > 0 && (ident_is(toks[i - 1], "assert") || ident_is(toks[i - 1], "cover") ||
                    ident_is(toks[i - 1], "assume")))
        continue;
      property_name = toks[i + 1].text;
    }
    if (toks[i].kind == Kind::Identifier && !sv::is_keyword(toks[i].text) &&
        is_punct(toks[i + 1], ":") && i + 2 < toks.size() &&
        ident_is(toks[i + 2], "assert")) {
      assert_label = toks[i].text;
    }
  }
  if (!property_name.empty()) report.local_declarations.insert(property_name);
  if (!assert_label.empty()) report.local_declarations.insert(assert_label);

  // property-local variable declarations count as defined
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i].kind == Kind::Identifier && local_decl_keyword(toks[i].text)) {
      std::size_t j = i + 1;
      while (j < toks.size() && is_punct(toks[j], "[")) {
        int d = 0;
        while (j < toks.size()) {
          if (is_punct(toks[j], "[")) ++d;
          if (is_punct(toks[j], "]")) --d;
          ++j;
          if (d == 0) break;
        }
      }
      while (j < toks.size() && toks[j].kind == Kind::Identifier &&
             !sv::is_keyword(toks[j].text)) {
        report.local_declarations.insert(toks[j].text);
        ++j;
        if (j < toks.size() && is_punct(toks[j], ",")) ++j;
        else break;
      }
    }
  }

  // clocking events: @( posedge|negedge sig )
  std::vector<std::pair<std::size_t, std::size_t>> event_spans;  // [open..close]
  std::vector<std::string> clock_signals;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (is_punct(toks[i], "@") && is_punct(toks[i + 1], "(")) {
      std::size_t close = find_matching_paren(toks, i + 1);
      event_spans.emplace_back(i, close);
      for (std::size_t j = i + 2; j < close; ++j) {
        if ((ident_is(toks[j], "posedge") || ident_is(toks[j], "negedge")) &&
            j + 1 < close && toks[j + 1].kind == Kind::Identifier) {
          clock_signals.push_back(toks[j + 1].text);
        }
      }
    }
  }

  // disable iff ( ... )
  bool has_disable_iff = false;
  std::vector<Token> disable_cond;
  std::pair<std::size_t, std::size_t> disable_span{0, 0};
  for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
    if (ident_is(toks[i], "disable") && ident_is(toks[i + 1], "iff") &&
        is_punct(toks[i + 2], "(")) {
      std::size_t close = find_matching_paren(toks, i + 2);
      has_disable_iff = true;
      disable_span = {i, close};
      for (std::size_t j = i + 3; j < close; ++j) disable_cond.push_back(toks[j]);
      break;
    }
  }

  auto in_event = [&](std::size_t i) {
    for (auto [b, e] : event_spans) {
      if (i >= b && i <= e) return true;
    }
    return false;
  };
  auto in_disable = [&](std::size_t i) {
    return has_disable_iff && i >= disable_span.first && i <= disable_span.second;
  };

  // --- property expression body ---

  std::size_t body_begin = 0, body_end = toks.size();
  int base_depth_adjust = 0;
  if (!property_name.empty()) {
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (ident_is(toks[i], "property") && toks[i + 1].kind == Kind::Identifier &&
          toks[i + 1].text == property_name) {
        body_begin = i + 2;
        while (body_begin < toks.size() && !is_punct(toks[body_begin], ";"))
          ++body_begin;  // skip port list / declaration semicolon
        ++body_begin;
        break;
      }
    }
    for (std::size_t i = body_begin; i < toks.size(); ++i) {
      if (ident_is(toks[i], "endproperty")) {
        body_end = i;
        break;
      }
    }
  } else {
    // assert property ( <expr> );
    for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
      if (ident_is(toks[i], "assert") && ident_is(toks[i + 1], "property") &&
          is_punct(toks[i + 2], "(")) {
        body_begin = i + 3;
        body_end = find_matching_paren(toks, i + 2);
        base_depth_adjust = 1;
        break;
      }
    }
  }
  (void)base_depth_adjust;

  // first implication at the body's own nesting level
  std::size_t impl_index = toks.size();
  {
    int depth = 0;
    for (std::size_t i = body_begin; i < body_end; ++i) {
      if (is_punct(toks[i], "(")) ++depth;
      if (is_punct(toks[i], ")")) --depth;
      if (depth == 0 && is_implication(toks[i])) {
        impl_index = i;
        break;
      }
    }
  }

  std::vector<Token> antecedent, consequent;
  bool next_cycle_op = false;
  if (impl_index < toks.size()) {
    next_cycle_op = toks[impl_index].text == "|=>";
    for (std::size_t i = body_begin; i < impl_index; ++i) {
      if (in_event(i) || in_disable(i)) continue;
      if (is_punct(toks[i], "@")) continue;
      antecedent.push_back(toks[i]);
    }
    for (std::size_t i = impl_index + 1; i < body_end; ++i) {
      if (is_punct(toks[i], ";")) break;
      consequent.push_back(toks[i]);
    }
  }
  (void)next_cycle_op;

  // --- rules ---

  auto add_result = [&](const char* id, RuleStatus st, std::string detail) {
    report.results.push_back({id, st, std::move(detail)});
  };

  // R1 implication form with meaningful antecedent
  if (impl_index == toks.size()) {
    add_result("R1", RuleStatus::Fail, "no |-> or |=> implication operator");
  } else if (antecedent.empty()) {
    add_result("R1", RuleStatus::Fail, "empty antecedent");
  } else if (is_const_true(antecedent)) {
    add_result("R1", RuleStatus::Fail, "antecedent is the constant literal 1");
  } else {
    add_result("R1", RuleStatus::Pass, "");
  }

  // R2 named property or labeled assert
  if (!property_name.empty()) {
    add_result("R2", RuleStatus::Pass, "property " + property_name);
  } else if (!assert_label.empty()) {
    add_result("R2", RuleStatus::Pass, "label " + assert_label);
  } else {
    add_result("R2", RuleStatus::Fail, "no named property or labeled assert");
  }

  // R3 reset disable clause
  if (!has_disable_iff) {
    add_result("R3", RuleStatus::Fail, "no disable iff reset clause");
  } else if (disable_cond.empty()) {
    add_result("R3", RuleStatus::Fail, "disable iff has an empty condition");
  } else if (reset_hint) {
    bool references_reset = std::any_of(
        disable_cond.begin(), disable_cond.end(), [&](const Token& t) {
          return t.kind == Kind::Identifier && t.text == *reset_hint;
        });
    add_result("R3", references_reset ? RuleStatus::Pass : RuleStatus::Fail,
               references_reset ? "" : "disable iff does not reference " + *reset_hint);
  } else {
    // rst_n is the default convention; any declared reset is accepted
    add_result("R3", RuleStatus::Pass, "");
  }

  // R4 clocking hygiene
  {
    std::vector<std::string> clocks = clock_signals;
    if (clocks.empty() && clock_hint) clocks.push_back(*clock_hint);
    if (clocks.empty()) {
      add_result("R4", RuleStatus::NotApplicable, "no clocking event");
    } else {
      std::string reused;
      for (std::size_t i = body_begin; i < body_end && reused.empty(); ++i) {
        if (in_event(i) || toks[i].kind != Kind::Identifier) continue;
        for (const auto& clk : clocks) {
          if (toks[i].text == clk) {
            reused = clk;
            break;
          }
        }
      }
      if (reused.empty()) {
        add_result("R4", RuleStatus::Pass, "");
      } else {
        add_result("R4", RuleStatus::Fail,
                   "clock signal '" + reused + "' reused in property body");
      }
    }
  }

  // R5 non-vacuous consequent
  if (impl_index == toks.size()) {
    add_result("R5", RuleStatus::NotApplicable, "no implication");
  } else if (consequent.empty()) {
    add_result("R5", RuleStatus::Fail, "empty consequent");
  } else if (is_const_true(consequent)) {
    add_result("R5", RuleStatus::Fail, "consequent is trivially true");
  } else {
    add_result("R5", RuleStatus::Pass, "");
  }

  // R6 built-in whitelist
  {
    std::string offender;
    for (const auto& t : toks) {
      if (t.kind == Kind::SystemCall && !sv::is_assertion_builtin(t.text)) {
        offender = t.text;
        break;
      }
    }
    if (offender.empty()) {
      add_result("R6", RuleStatus::Pass, "");
    } else {
      add_result("R6", RuleStatus::Fail, "non-whitelisted built-in " + offender);
    }
  }

  // A1 advisory: sequences should be edge-anchored
  {
    bool has_sequence = std::any_of(antecedent.begin(), antecedent.end(),
                                    [](const Token& t) { return is_punct(t, "##"); });
    bool has_edge = std::any_of(antecedent.begin(), antecedent.end(), [](const Token& t) {
      return t.kind == Kind::SystemCall && (t.text == "$rose" || t.text == "$fell");
    });
    if (!has_sequence) {
      add_result("A1", RuleStatus::NotApplicable, "");
    } else if (has_edge) {
      add_result("A1", RuleStatus::Pass, "");
    } else {
      add_result("A1", RuleStatus::Fail,
                 "multi-cycle antecedent without a $rose/$fell anchor");
    }
  }

  // referenced identifiers
  for (const auto& t : toks) {
    if (t.kind != Kind::Identifier) continue;
    if (sv::is_keyword(t.text)) continue;
    if (report.local_declarations.contains(t.text)) continue;
    report.referenced_identifiers.insert(t.text);
  }

  report.passed_all_mandatory =
      std::none_of(report.results.begin(), report.results.end(), [](const RuleResult& r) {
        return r.rule_id[0] == 'R' && r.status == RuleStatus::Fail;
      });
  return report;
}

std::vector<std::string> derive_tags(const LintReport& report) {
  std::vector<std::string> tags;
  const std::string stripped = sv::strip_comments_and_strings(report.sva_text);
  const std::vector<Token> toks = sv::tokenize(stripped);
  auto any = [&](auto pred) { return std::any_of(toks.begin(), toks.end(), pred); };

  if (any([](const Token& t) { return is_punct(t, "|=>"); }))
    tags.push_back("next-cycle");
  if (any([](const Token& t) {
        return is_punct(t, "##") ||
               (t.kind == Kind::SystemCall && t.text == "$past");
      }))
    tags.push_back("multi-cycle");
  if (any([](const Token& t) {
        return t.kind == Kind::SystemCall && (t.text == "$rose" || t.text == "$fell");
      }))
    tags.push_back("edge-anchored");
  for (const auto& r : report.results) {
    if (r.rule_id[0] == 'A' && r.status == RuleStatus::Fail)
      tags.push_back("advisory:" + r.rule_id);
  }
  return tags;
}

}  // namespace assertain
