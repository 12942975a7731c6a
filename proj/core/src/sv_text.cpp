#include "assertain/sv_text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <unordered_set>

namespace assertain::sv {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool digit_char(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || c == '_';
}

bool based_digit(char c) {
  return std::isxdigit(static_cast<unsigned char>(c)) || c == '_' ||
         c == 'x' || c == 'X' || c == 'z' || c == 'Z' || c == '?';
}

}  // namespace

std::string strip_comments_and_strings(std::string_view src) {
  std::string out;
  out.reserve(src.size());
  enum class State { Code, Line, Block, Str };
  State state = State::Code;
  for (std::size_t i = 0; i < src.size(); ++i) {
    char c = src[i];
    char next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (state) {
      case State::Code:
        if (c == '/' && next == '/') {
          state = State::Line;
          out += "  ";
          ++i;
        } else if (c == '/' && next == '*') {
          state = State::Block;
          out += "  ";
          ++i;
        } else if (c == '"') {
          state = State::Str;
          out += ' ';
        } else {
          out += c;
        }
        break;
      case State::Line:
        if (c == '\n') {
          state = State::Code;
          out += '\n';
        } else {
          out += ' ';
        }
        break;
      case State::Block:
        if (c == '*' && next == '/') {
          state = State::Code;
          out += "  ";
          ++i;
        } else {
          out += c == '\n' ? '\n' : ' ';
        }
        break;
      case State::Str:
        if (c == '\\' && next != '\0') {
          out += "  ";
          ++i;
        } else if (c == '"') {
          state = State::Code;
          out += ' ';
        } else {
          out += c == '\n' ? '\n' : ' ';
        }
        break;
    }
  }
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = s.size();

  auto push = [&](Token::Kind kind, std::size_t begin, std::size_t end) {
    tokens.push_back({kind, std::string(s.substr(begin, end - begin)), begin});
  };

  static const std::array<std::string_view, 14> multi = {
      "|->", "|=>", "###", "##", "===", "!==", "==", "!=", "<=", ">=",
      "&&",  "||",  "::", "+:"};

  while (i < n) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (ident_start(c)) {
      std::size_t b = i;
      while (i < n && ident_char(s[i])) ++i;
      // absorb an immediately following based literal? no: identifiers end here
      push(Token::Kind::Identifier, b, i);
      continue;
    }
    if (c == '$' && i + 1 < n && ident_start(s[i + 1])) {
      std::size_t b = i++;
      while (i < n && ident_char(s[i])) ++i;
      push(Token::Kind::SystemCall, b, i);
      continue;
    }
    if (c == '`' && i + 1 < n && ident_start(s[i + 1])) {
      std::size_t b = ++i;
      while (i < n && ident_char(s[i])) ++i;
      push(Token::Kind::Directive, b, i);
      continue;
    }
    if (c == '\\') {
      // escaped identifier: runs to whitespace
      std::size_t b = ++i;
      while (i < n && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      push(Token::Kind::EscapedIdent, b, i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t b = i;
      while (i < n && digit_char(s[i])) ++i;
      if (i < n && s[i] == '\'') {
        std::size_t save = i;
        ++i;
        if (i < n && (s[i] == 's' || s[i] == 'S')) ++i;
        if (i < n && std::strchr("bodhBODH", s[i]) != nullptr) {
          ++i;
          while (i < n && based_digit(s[i])) ++i;
        } else {
          i = save;  // apostrophe belongs to something else
        }
      } else if (i < n && ident_start(s[i])) {
        // time literals: 1ns, 10ps, 1step
        std::size_t e = i;
        while (e < n && ident_char(s[e])) ++e;
        const std::string_view suffix = s.substr(i, e - i);
        for (std::string_view unit : {"s", "ms", "us", "ns", "ps", "fs", "step"}) {
          if (suffix == unit) {
            i = e;
            break;
          }
        }
      }
      push(Token::Kind::Number, b, i);
      continue;
    }
    if (c == '\'') {
      // unsized literals '0 '1 'x 'z or based 'h1f
      std::size_t b = i++;
      if (i < n && (s[i] == 's' || s[i] == 'S')) ++i;
      if (i < n && std::strchr("bodhBODH", s[i]) != nullptr) {
        ++i;
        while (i < n && based_digit(s[i])) ++i;
        push(Token::Kind::Number, b, i);
        continue;
      }
      if (i < n && (s[i] == '0' || s[i] == '1' || s[i] == 'x' || s[i] == 'X' ||
                    s[i] == 'z' || s[i] == 'Z')) {
        ++i;
        push(Token::Kind::Number, b, i);
        continue;
      }
      push(Token::Kind::Punct, b, i);
      continue;
    }
    bool matched = false;
    for (auto m : multi) {
      if (s.compare(i, m.size(), m) == 0) {
        push(Token::Kind::Punct, i, i + m.size());
        i += m.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      push(Token::Kind::Punct, i, i + 1);
      ++i;
    }
  }
  return tokens;
}

bool is_keyword(std::string_view word) {
  static const std::unordered_set<std::string_view> kKeywords = {
      "module", "endmodule", "macromodule", "input", "output", "inout",
      "wire", "reg", "logic", "bit", "byte", "int", "integer", "longint",
      "shortint", "real", "realtime", "time", "signed", "unsigned",
      "parameter", "localparam", "typedef", "enum", "struct", "union",
      "packed", "tagged", "assign", "always", "always_ff", "always_comb",
      "always_latch", "initial", "final", "begin", "end", "if", "else",
      "case", "casex", "casez", "endcase", "default", "for", "foreach",
      "while", "do", "repeat", "forever", "generate", "endgenerate",
      "genvar", "function", "endfunction", "task", "endtask", "return",
      "posedge", "negedge", "edge", "or", "and", "not", "xor", "nand",
      "nor", "xnor", "buf", "bufif0", "bufif1", "notif0", "notif1",
      "property", "endproperty", "sequence", "endsequence", "assert",
      "assume", "cover", "restrict", "expect", "disable", "iff",
      "throughout", "within", "intersect", "first_match", "not",
      "until", "until_with", "s_until", "s_until_with", "eventually",
      "s_eventually", "nexttime", "s_nexttime", "always", "strong",
      "weak", "implies", "accept_on", "reject_on", "sync_accept_on",
      "sync_reject_on", "const", "var", "automatic", "static", "unique",
      "unique0", "priority", "void", "package", "endpackage", "import",
      "export", "interface", "endinterface", "modport", "clocking",
      "endclocking", "timeunit", "timeprecision", "fork", "join",
      "join_any", "join_none", "wait", "wait_order", "event", "string",
      "supply0", "supply1", "tri", "tri0", "tri1", "triand", "trior",
      "trireg", "wand", "wor", "uwire", "new", "this", "super", "null",
      "deassign", "force", "release", "specify", "endspecify",
      "specparam", "pulldown", "pullup", "cell", "config", "endconfig",
      "defparam", "design", "instance", "liblist", "library", "use",
      "include", "incdir",
  };
  return kKeywords.contains(word);
}

const std::vector<std::string>& assertion_builtins() {
  static const std::vector<std::string> kBuiltins = {
      "$rose",      "$fell",    "$past",      "$stable",  "$changed",
      "$isunknown", "$onehot",  "$onehot0",   "$countones",
      "$error",     "$display",
  };
  return kBuiltins;
}

bool is_assertion_builtin(std::string_view dollar_name) {
  const auto& b = assertion_builtins();
  return std::find(b.begin(), b.end(), dollar_name) != b.end();
}

bool is_simple_identifier(std::string_view str) {
  if (str.empty() || !ident_start(str[0])) return false;
  return std::all_of(str.begin() + 1, str.end(), ident_char);
}

}  // namespace assertain::sv
