#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sirsql {

enum class TokenKind { Word, QuotedIdent, Number, String, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // word spelling, unquoted identifier, literal value, or symbol
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
  std::size_t end = 0;  // one past the last source byte
};

/// Splits source text into tokens. `--` and `/* */` comments are skipped.
/// Words may contain `#` and `$` (as in S#, P#).
std::vector<Token> tokenize(std::string_view source);

bool is_reserved_word(std::string_view word) noexcept;

}  // namespace sirsql
