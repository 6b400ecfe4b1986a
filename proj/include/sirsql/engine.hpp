#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sirsql/catalog.hpp"
#include "sirsql/compiler.hpp"
#include "sirsql/kernel.hpp"
#include "sirsql/parser.hpp"
#include "sirsql/router.hpp"

namespace sirsql {

struct EngineOptions {
  CompileOptions compile;
  bool strict_integrity = false;
};

struct Outcome {
  enum class Kind { Definition, Write, Query };
  Kind kind = Kind::Definition;
  std::string target;
  std::vector<std::string> objects;  // kernel objects created
  std::vector<std::string> removed;  // relations dropped
  std::int64_t changed = 0;          // rows written
  RowSet rows;
};

/// The SIR layer over one kernel connection. Each statement runs in its
/// own kernel transaction together with its meta-table writes; the
/// in-memory catalog changes only after the commit.
class Engine {
 public:
  explicit Engine(Kernel& kernel, EngineOptions options = {});

  Outcome execute(const ast::Statement& stmt);
  /// Runs the statements of a script in order, stopping at the first failure.
  std::vector<Outcome> execute_script(std::string_view source, std::vector<Diagnostic>* warnings = nullptr);
  RowSet query(std::string_view sql);

  /// The kernel DDL of a relation's objects, in plan order.
  std::vector<std::string> explain(std::string_view relation);
  std::vector<IeViolation> check(std::string_view relation);

  const Catalog& catalog() const noexcept { return catalog_; }
  Kernel& kernel() noexcept { return kernel_; }
  EngineOptions& options() noexcept { return options_; }

 private:
  Outcome apply(Change change);
  Outcome write(const ast::StatementNode& node);

  Kernel& kernel_;
  EngineOptions options_;
  Catalog catalog_;
};

}  // namespace sirsql
