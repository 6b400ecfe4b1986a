#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sirsql/ast.hpp"

namespace sirsql {

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
};

struct ParseResult {
  std::vector<ast::Statement> statements;
  std::vector<Diagnostic> warnings;
};

/// Parses a `.sirsql` script: semicolon-terminated statements of the
/// extended dialect. Throws SyntaxError on the first error.
ParseResult parse_script(std::string_view source);

inline std::vector<ast::Statement> parse(std::string_view source) {
  return parse_script(source).statements;
}

/// Parses a single statement; the trailing semicolon is optional.
ast::Statement parse_statement(std::string_view source);

ast::Select parse_select(std::string_view source);
ast::Expr parse_expr(std::string_view source);

}  // namespace sirsql
