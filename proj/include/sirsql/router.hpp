#pragma once

#include <string>
#include <vector>

#include "sirsql/ast.hpp"
#include "sirsql/catalog.hpp"
#include "sirsql/kernel.hpp"

namespace sirsql {

enum class RouteKind { PassThrough, BaseRewrite };

struct Routed {
  RouteKind kind = RouteKind::PassThrough;
  std::string sql;     // kernel statement
  std::string target;  // relation written, empty for queries
  bool returns_rows = false;
};

/// Rewrites a query or DML statement for the kernel. Throws RejectedWrite,
/// UnknownRelation and UnknownColumn.
Routed route(const ast::StatementNode& stmt, const Catalog& catalog);

struct IeViolation {
  std::string ie;
  Row key;
  std::int64_t matches = 0;
  bool operator==(const IeViolation&) const = default;
};

/// Base keys for which a JoinForm IE of `sir` finds more than one tuple.
std::vector<IeViolation> check_ie_integrity(const CatalogEntry& sir, const Catalog& catalog, Kernel& kernel);

/// Fails with IaNotComputable when a base row with rowid above `after_rowid`
/// gets a null sub-tuple from some JoinForm IE.
void enforce_insert_computability(const CatalogEntry& sir, const Catalog& catalog, Kernel& kernel,
                                  std::int64_t after_rowid);

}  // namespace sirsql
