#include "assertain/rtl_context.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "assertain/errors.hpp"
#include "assertain/sv_text.hpp"

namespace assertain {

namespace {

using sv::Token;
using Kind = sv::Token::Kind;

bool is_direction(std::string_view t) {
  return t == "input" || t == "output" || t == "inout";
}

bool is_net_or_var_keyword(std::string_view t) {
  return t == "wire" || t == "reg" || t == "logic" || t == "bit" ||
         t == "byte" || t == "int" || t == "integer" || t == "longint" ||
         t == "shortint" || t == "time" || t == "real" || t == "genvar" ||
         t == "tri" || t == "tri0" || t == "tri1" || t == "wand" || t == "wor";
}

bool is_type_modifier(std::string_view t) {
  return t == "signed" || t == "unsigned" || t == "packed" || t == "var" ||
         t == "automatic" || t == "static" || t == "const";
}

// Token-scanner over one stripped source text. Best-effort: anything it
// cannot make sense of is skipped and tallied.
class Scanner {
 public:
  Scanner(const std::string& stripped, DesignContext& out)
      : text_(stripped), toks_(sv::tokenize(stripped)), out_(out) {}

  void run() {
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == Kind::Identifier && (t.text == "module" || t.text == "macromodule")) {
        scan_module();
      } else if (t.kind == Kind::Directive) {
        scan_directive();
      } else {
        advance();
      }
    }
  }

 private:
  bool at_end() const { return i_ >= toks_.size(); }
  const Token& peek(std::size_t off = 0) const { return toks_[i_ + off]; }
  bool has(std::size_t off) const { return i_ + off < toks_.size(); }
  void advance() { ++i_; }
  bool is_punct(const Token& t, std::string_view p) const {
    return t.kind == Kind::Punct && t.text == p;
  }
  bool ident_is(const Token& t, std::string_view w) const {
    return t.kind == Kind::Identifier && t.text == w;
  }

  void add(std::set<std::string>& set, const std::string& name) {
    if (sv::is_simple_identifier(name) && !sv::is_keyword(name)) set.insert(name);
  }

  // Skips a balanced (...) [...] or {...} group starting at the current
  // opener. Returns source span of the group.
  std::pair<std::size_t, std::size_t> skip_group() {
    const std::string open = peek().text;
    const std::string close = open == "(" ? ")" : open == "[" ? "]" : "}";
    std::size_t begin = peek().pos;
    int depth = 0;
    std::size_t end = begin;
    while (!at_end()) {
      if (is_punct(peek(), open)) ++depth;
      if (is_punct(peek(), close)) {
        --depth;
        if (depth == 0) {
          end = peek().pos + close.size();
          advance();
          break;
        }
      }
      advance();
    }
    if (depth != 0) ++out_.diagnostics.skipped_regions;
    return {begin, end};
  }

  // Skips to the next `,` or `;` (or `)` in port lists) at the current
  // nesting level, balancing groups on the way.
  void skip_to_separator(bool in_parens) {
    while (!at_end()) {
      const Token& t = peek();
      if (is_punct(t, "(") || is_punct(t, "[") || is_punct(t, "{")) {
        skip_group();
        continue;
      }
      if (is_punct(t, ",") || is_punct(t, ";")) return;
      if (in_parens && is_punct(t, ")")) return;
      advance();
    }
  }

  void note_escaped() {
    ++out_.diagnostics.escaped_identifiers;
    advance();
  }

  // `define NAME body-to-end-of-line (with \ continuation)
  void scan_directive() {
    const Token& d = peek();
    if (d.text != "define") {
      advance();
      return;
    }
    advance();
    if (at_end() || peek().kind != Kind::Identifier) return;
    std::string name = peek().text;
    std::size_t body_from = peek().pos + name.size();
    advance();
    std::size_t eol = text_.find('\n', body_from);
    while (eol != std::string::npos) {
      std::size_t p = text_.find_last_not_of(" \t\r", eol - 1);
      if (p == std::string::npos || text_[p] != '\\') break;
      eol = text_.find('\n', eol + 1);
    }
    std::string body = text_.substr(
        body_from, eol == std::string::npos ? std::string::npos : eol - body_from);
    const std::size_t a = body.find_first_not_of(" \t\r\n");
    const std::size_t b = body.find_last_not_of(" \t\r\n\\");
    body = a == std::string::npos ? "" : body.substr(a, b - a + 1);
    add(out_.identifiers.macro_names, name);
    out_.macro_bodies[name] = body;
    // advance past the define body
    while (!at_end() && peek().pos < (eol == std::string::npos ? text_.size() : eol))
      advance();
  }

  void scan_module() {
    advance();  // module
    if (at_end() || peek().kind != Kind::Identifier) return;
    out_.module_names.push_back(peek().text);
    advance();

    if (!at_end() && is_punct(peek(), "#")) {
      advance();
      if (!at_end() && is_punct(peek(), "(")) scan_parameter_port_list();
    }
    if (!at_end() && is_punct(peek(), "(")) scan_port_list();
    // header terminator
    while (!at_end() && !is_punct(peek(), ";")) advance();
    if (!at_end()) advance();
    scan_body();
  }

  void scan_parameter_port_list() {
    advance();  // (
    int depth = 1;
    while (!at_end() && depth > 0) {
      const Token& t = peek();
      if (is_punct(t, "(")) ++depth;
      if (is_punct(t, ")")) --depth;
      if (depth == 0) {
        advance();
        break;
      }
      if (t.kind == Kind::Identifier && has(1) && is_punct(peek(1), "=")) {
        add(out_.identifiers.parameters, t.text);
      }
      advance();
    }
  }

  void scan_port_list() {
    advance();  // (
    std::string direction;
    std::string last_range;
    std::vector<std::string> pending;  // idents since last separator
    auto flush = [&]() {
      if (pending.empty()) return;
      const std::string name = pending.back();
      add(out_.identifiers.ports, name);
      if (!last_range.empty()) out_.declared_ranges.emplace(name, last_range);
      if (pending.size() >= 2) out_.declared_types.emplace(name, pending.front());
      pending.clear();
    };
    while (!at_end()) {
      const Token& t = peek();
      if (is_punct(t, ")")) {
        flush();
        advance();
        return;
      }
      if (is_punct(t, "(") || is_punct(t, "{")) {
        skip_group();
        continue;
      }
      if (is_punct(t, "[")) {
        auto [b, e] = skip_group();
        if (pending.empty()) last_range = text_.substr(b, e - b);
        continue;
      }
      if (t.kind == Kind::EscapedIdent) {
        note_escaped();
        continue;
      }
      if (t.kind == Kind::Identifier && is_direction(t.text)) {
        flush();
        direction = t.text;
        last_range.clear();
        advance();
        continue;
      }
      if (t.kind == Kind::Identifier &&
          (is_net_or_var_keyword(t.text) || is_type_modifier(t.text))) {
        advance();
        continue;
      }
      if (is_punct(t, ",")) {
        flush();
        advance();
        continue;
      }
      if (is_punct(t, "=")) {
        // default value on a port: the name is already pending
        flush();
        skip_to_separator(/*in_parens=*/true);
        continue;
      }
      if (t.kind == Kind::Identifier && !sv::is_keyword(t.text)) {
        pending.push_back(t.text);
        advance();
        continue;
      }
      advance();
    }
  }

  void scan_body() {
    bool stmt_start = true;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == Kind::Identifier) {
        const std::string& w = t.text;
        if (w == "endmodule") {
          advance();
          return;
        }
        if (is_direction(w)) {
          scan_declaration(out_.identifiers.ports);
          stmt_start = true;
          continue;
        }
        if (is_net_or_var_keyword(w)) {
          advance();  // keep scanning from the type tail
          scan_declaration_tail(out_.identifiers.nets_and_regs);
          stmt_start = true;
          continue;
        }
        if (w == "parameter" || w == "localparam") {
          scan_parameters();
          stmt_start = true;
          continue;
        }
        if (w == "typedef") {
          scan_typedef();
          stmt_start = true;
          continue;
        }
        if (w == "assign" || w == "defparam") {
          skip_statement();
          stmt_start = true;
          continue;
        }
        if (sv::is_keyword(w)) {
          stmt_start = w == "begin" || w == "end" || w == "generate" ||
                       w == "endgenerate" || w == "else";
          advance();
          continue;
        }
        if (stmt_start && try_instantiation_or_typed_decl()) {
          stmt_start = true;
          continue;
        }
        stmt_start = false;
        advance();
        continue;
      }
      if (t.kind == Kind::Directive) {
        scan_directive();
        stmt_start = true;
        continue;
      }
      if (t.kind == Kind::EscapedIdent) {
        note_escaped();
        stmt_start = false;
        continue;
      }
      stmt_start = is_punct(t, ";");
      advance();
    }
  }

  void skip_statement() {
    while (!at_end() && !is_punct(peek(), ";")) {
      if (is_punct(peek(), "(") || is_punct(peek(), "[") || is_punct(peek(), "{")) {
        skip_group();
        continue;
      }
      advance();
    }
    if (!at_end()) advance();
  }

  // direction/net declaration starting at its keyword; names land in `set`.
  void scan_declaration(std::set<std::string>& set) {
    advance();  // direction keyword
    scan_declaration_tail(set);
  }

  // Parses `<type tokens> name [range] [= expr] {, name ...};` with the
  // leading keyword already consumed.
  void scan_declaration_tail(std::set<std::string>& set) {
    std::string last_range;
    std::vector<std::string> pending;
    auto flush = [&]() {
      if (pending.empty()) return;
      const std::string name = pending.back();
      add(set, name);
      if (!last_range.empty()) out_.declared_ranges.emplace(name, last_range);
      if (pending.size() >= 2) out_.declared_types.emplace(name, pending.front());
      pending.clear();
    };
    while (!at_end()) {
      const Token& t = peek();
      if (is_punct(t, ";")) {
        flush();
        advance();
        return;
      }
      if (is_punct(t, ",")) {
        flush();
        advance();
        continue;
      }
      if (is_punct(t, "=")) {
        flush();
        skip_to_separator(/*in_parens=*/false);
        continue;
      }
      if (is_punct(t, "[")) {
        auto [b, e] = skip_group();
        if (pending.empty()) last_range = text_.substr(b, e - b);
        continue;
      }
      if (is_punct(t, "(") || is_punct(t, "{")) {
        skip_group();
        continue;
      }
      if (t.kind == Kind::EscapedIdent) {
        note_escaped();
        continue;
      }
      if (t.kind == Kind::Identifier) {
        if (is_net_or_var_keyword(t.text) || is_type_modifier(t.text) ||
            is_direction(t.text)) {
          advance();
          continue;
        }
        if (sv::is_keyword(t.text)) {  // lost track, bail out
          ++out_.diagnostics.skipped_regions;
          flush();
          skip_statement();
          return;
        }
        pending.push_back(t.text);
        advance();
        continue;
      }
      advance();
    }
  }

  void scan_parameters() {
    advance();  // parameter|localparam
    while (!at_end()) {
      const Token& t = peek();
      if (is_punct(t, ";")) {
        advance();
        return;
      }
      if (is_punct(t, "(") || is_punct(t, "[") || is_punct(t, "{")) {
        skip_group();
        continue;
      }
      if (t.kind == Kind::Identifier && has(1) && is_punct(peek(1), "=")) {
        add(out_.identifiers.parameters, t.text);
        advance();
        advance();
        skip_to_separator(/*in_parens=*/false);
        continue;
      }
      advance();
    }
  }

  void scan_typedef() {
    const std::size_t span_begin = peek().pos;
    advance();  // typedef
    std::vector<std::string> labels;
    std::vector<std::string> fields;
    bool is_enum = false, is_struct = false;

    if (!at_end() && ident_is(peek(), "enum")) {
      is_enum = true;
      advance();
      while (!at_end() && !is_punct(peek(), "{") && !is_punct(peek(), ";")) {
        if (is_punct(peek(), "[")) {
          skip_group();
          continue;
        }
        advance();
      }
      if (!at_end() && is_punct(peek(), "{")) scan_enum_body(labels);
    } else if (!at_end() &&
               (ident_is(peek(), "struct") || ident_is(peek(), "union"))) {
      is_struct = true;
      advance();
      while (!at_end() && !is_punct(peek(), "{") && !is_punct(peek(), ";")) {
        if (is_punct(peek(), "[")) {
          skip_group();
          continue;
        }
        advance();
      }
      if (!at_end() && is_punct(peek(), "{")) scan_struct_body(fields);
    }

    // name is the last identifier before the terminating semicolon
    std::string name;
    std::size_t span_end = span_begin;
    while (!at_end()) {
      const Token& t = peek();
      if (is_punct(t, ";")) {
        span_end = t.pos + 1;
        advance();
        break;
      }
      if (is_punct(t, "[")) {
        skip_group();
        continue;
      }
      if (t.kind == Kind::Identifier && !sv::is_keyword(t.text)) name = t.text;
      advance();
    }
    if (name.empty()) {
      ++out_.diagnostics.skipped_regions;
      return;
    }
    add(out_.identifiers.typedef_names, name);
    out_.typedef_texts[name] = text_.substr(span_begin, span_end - span_begin);
    for (const auto& l : labels) {
      add(out_.identifiers.enum_labels, l);
      out_.enum_owner[l] = name;
    }
    for (const auto& f : fields) {
      add(out_.identifiers.struct_fields, f);
      out_.field_owner[f] = name;
    }
    (void)is_enum;
    (void)is_struct;
  }

  void scan_enum_body(std::vector<std::string>& labels) {
    advance();  // {
    bool expect_label = true;
    while (!at_end()) {
      const Token& t = peek();
      if (is_punct(t, "}")) {
        advance();
        return;
      }
      if (expect_label && t.kind == Kind::Identifier && !sv::is_keyword(t.text)) {
        labels.push_back(t.text);
        expect_label = false;
        advance();
        continue;
      }
      if (is_punct(t, ",")) {
        expect_label = true;
        advance();
        continue;
      }
      if (is_punct(t, "[") || is_punct(t, "(") || is_punct(t, "{")) {
        skip_group();
        continue;
      }
      advance();
    }
  }

  void scan_struct_body(std::vector<std::string>& fields) {
    advance();  // {
    while (!at_end()) {
      if (is_punct(peek(), "}")) {
        advance();
        return;
      }
      // one member up to ';'
      bool leading_keyword = false;
      bool first = true;
      std::vector<std::string> idents;
      while (!at_end() && !is_punct(peek(), ";") && !is_punct(peek(), "}")) {
        const Token& t = peek();
        if (is_punct(t, "[") || is_punct(t, "(") || is_punct(t, "{")) {
          skip_group();
          continue;
        }
        if (t.kind == Kind::Identifier) {
          if (sv::is_keyword(t.text) || is_type_modifier(t.text)) {
            if (first) leading_keyword = true;
          } else {
            idents.push_back(t.text);
          }
          first = false;
        }
        advance();
      }
      if (!at_end() && is_punct(peek(), ";")) advance();
      if (idents.empty()) continue;
      std::size_t skip = (!leading_keyword && idents.size() >= 2) ? 1 : 0;
      for (std::size_t k = skip; k < idents.size(); ++k) fields.push_back(idents[k]);
    }
  }

  // At statement level: `Type name;` / `Type name0, name1;` or
  // `Mod #(..) inst ( .port(expr), ... );`
  bool try_instantiation_or_typed_decl() {
    const std::size_t save = i_;
    const std::string head = peek().text;
    advance();

    std::string range;
    if (!at_end() && is_punct(peek(), "#")) {
      advance();
      if (!at_end() && is_punct(peek(), "(")) skip_group();
    }
    if (!at_end() && is_punct(peek(), "[")) {
      auto [b, e] = skip_group();
      range = text_.substr(b, e - b);
    }
    if (at_end() || peek().kind != Kind::Identifier ||
        sv::is_keyword(peek().text)) {
      i_ = save;
      advance();
      return false;
    }
    const std::string second = peek().text;
    advance();

    if (!at_end() && is_punct(peek(), "(")) {
      // instantiation: collect named-connection formals at depth 1
      add(out_.identifiers.instance_names, second);
      int depth = 0;
      while (!at_end()) {
        const Token& t = peek();
        if (is_punct(t, "(")) ++depth;
        if (is_punct(t, ")")) {
          --depth;
          if (depth == 0) {
            advance();
            break;
          }
        }
        if (depth == 1 && is_punct(t, ".") && has(1) &&
            peek(1).kind == Kind::Identifier) {
          add(out_.identifiers.submodule_port_names, peek(1).text);
          advance();
        }
        advance();
      }
      if (!at_end() && is_punct(peek(), ";")) advance();
      return true;
    }

    if (!at_end() && (is_punct(peek(), ",") || is_punct(peek(), ";") ||
                      is_punct(peek(), "=") || is_punct(peek(), "["))) {
      // typed declaration
      auto record = [&](const std::string& name) {
        add(out_.identifiers.nets_and_regs, name);
        out_.declared_types.emplace(name, head);
        if (!range.empty()) out_.declared_ranges.emplace(name, range);
      };
      record(second);
      while (!at_end() && !is_punct(peek(), ";")) {
        const Token& t = peek();
        if (is_punct(t, "[") || is_punct(t, "(") || is_punct(t, "{")) {
          skip_group();
          continue;
        }
        if (is_punct(t, "=")) {
          skip_to_separator(/*in_parens=*/false);
          continue;
        }
        if (t.kind == Kind::Identifier && !sv::is_keyword(t.text)) record(t.text);
        advance();
      }
      if (!at_end()) advance();
      return true;
    }

    i_ = save;
    advance();
    return false;
  }

  const std::string& text_;
  std::vector<Token> toks_;
  DesignContext& out_;
  std::size_t i_ = 0;
};

}  // namespace

bool IdentifierUniverse::contains(std::string_view name) const {
  return flat_.contains(std::string(name));
}

void IdentifierUniverse::finalize() {
  flat_.clear();
  for (const auto* set :
       {&ports, &nets_and_regs, &parameters, &typedef_names, &enum_labels,
        &struct_fields, &instance_names, &submodule_port_names, &macro_names}) {
    flat_.insert(set->begin(), set->end());
  }
}

std::string content_hash(std::string_view text) {
  // FNV-1a, 64-bit: stable across platforms and runs.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DesignContext analyze_source(std::string source_text) {
  DesignContext ctx;
  ctx.design_id = content_hash(source_text);
  ctx.source_text = std::move(source_text);
  const std::string stripped = sv::strip_comments_and_strings(ctx.source_text);
  Scanner(stripped, ctx).run();
  ctx.identifiers.finalize();
  return ctx;
}

IdentifierUniverse extract_identifiers(std::string_view source_text) {
  return analyze_source(std::string(source_text)).identifiers;
}

DesignContext load_design(const std::filesystem::path& path,
                          std::optional<std::string> top_module_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DesignLoadError(DesignLoadError::Kind::MissingFile,
                          "cannot open design file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (text.find('\0') != std::string::npos) {
    throw DesignLoadError(DesignLoadError::Kind::DecodeFailure,
                          "design file is not text: " + path.string());
  }
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw DesignLoadError(DesignLoadError::Kind::EmptyDesign,
                          "design file is empty: " + path.string());
  }
  DesignContext ctx = analyze_source(std::move(text));
  if (ctx.module_names.empty()) {
    throw DesignLoadError(DesignLoadError::Kind::NoModules,
                          "no module declarations found in " + path.string());
  }
  ctx.top_module_hint = std::move(top_module_hint);
  return ctx;
}

GroundingVerdict contains_all(const IdentifierUniverse& universe,
                              const std::vector<std::string>& names) {
  GroundingVerdict verdict;
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (!universe.contains(name) && seen.insert(name).second) {
      verdict.missing.push_back(name);
    }
  }
  verdict.ok = verdict.missing.empty();
  return verdict;
}

}  // namespace assertain
