#pragma once

#include <string>
#include <string_view>

#include "sirsql/ast.hpp"

namespace sirsql {

enum class Dialect {
  Kernel,  // plain SQL for the kernel; SIR-only nodes are rejected
  Sir,     // the extended dialect, re-parseable by parse()
};

enum class Quoting { Bracket, Double };

struct RenderOptions {
  Dialect dialect = Dialect::Kernel;
  Quoting quoting = Quoting::Bracket;
};

/// Quotes `name` when it is not a plain identifier in the target dialect or
/// collides with a reserved word.
std::string quote_ident(std::string_view name, const RenderOptions& opts = {});

std::string render(const ast::Expr& expr, const RenderOptions& opts = {});
std::string render(const ast::Select& select, const RenderOptions& opts = {});
std::string render(const ast::TableElement& element, const RenderOptions& opts = {});
std::string render(const ast::StatementNode& node, const RenderOptions& opts = {});
inline std::string render(const ast::Statement& stmt, const RenderOptions& opts = {}) {
  return render(stmt.node, opts);
}

inline std::string render_sir(const ast::StatementNode& node) {
  return render(node, {Dialect::Sir, Quoting::Bracket});
}

}  // namespace sirsql
