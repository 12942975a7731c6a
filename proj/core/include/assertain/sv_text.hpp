#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace assertain::sv {

// Replaces comments (// and /* */) and string literals with spaces,
// preserving newlines so token positions stay line-accurate.
std::string strip_comments_and_strings(std::string_view src);

struct Token {
  enum class Kind {
    Identifier,    // foo, foo$bar
    SystemCall,    // $rose, $error (text includes the $)
    Directive,     // `define, `MY_MACRO (text excludes the backtick)
    EscapedIdent,  // \weird+name (text excludes the backslash)
    Number,        // 42, 4'b1010, 'h_DEAD, '0
    Punct,         // |->  |=>  ##  ( ) [ ] { } , ; . : @ # = ...
  };
  Kind kind;
  std::string text;
  std::size_t pos = 0;
};

// Tokenizes pre-stripped SystemVerilog text. Best-effort: characters it
// does not recognize become single-char Punct tokens.
std::vector<Token> tokenize(std::string_view stripped);

bool is_keyword(std::string_view word);

// The fixed whitelist of system functions assertions may call.
const std::vector<std::string>& assertion_builtins();
bool is_assertion_builtin(std::string_view dollar_name);

// True for identifiers usable as a simple SystemVerilog name.
bool is_simple_identifier(std::string_view s);

}  // namespace assertain::sv
