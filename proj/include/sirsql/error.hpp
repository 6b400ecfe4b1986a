#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sirsql {

enum class Errc {
  SyntaxError,
  UnterminatedStatement,
  DuplicateAttribute,
  UnrenderableNode,
  DuplicateName,
  CircularReference,
  InvariantViolation,
  UnknownRelation,
  UnknownColumn,
  AmbiguousColumn,
  CorruptCatalog,
  MissingRecursiveJoin,
  IeCycle,
  UnknownExcludedColumn,
  NameCollision,
  RecursiveJoinAttributeDrop,
  UnknownIE,
  DependentsExist,
  IndexOnInheritedAttribute,
  NotRewritable,
  CapabilityMissing,
  Unsupported,
  KernelError,
  NestedTransaction,
  UnknownObject,
  RejectedWrite,
  IaNotComputable,
  NotApplicable,
  NoProgress,
  SchemaMismatch,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library. `items()` carries the structured
/// payload of the error (cycle members, dependents, offending keys...).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::vector<std::string> items = {})
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        items_(std::move(items)) {}

  Errc code() const noexcept { return code_; }
  const std::vector<std::string>& items() const noexcept { return items_; }

 private:
  Errc code_;
  std::vector<std::string> items_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(Errc code, const std::string& message, int line, int column,
              std::vector<std::string> expected = {})
      : Error(code, format(message, line, column, expected), expected),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return items(); }

 private:
  static std::string format(const std::string& message, int line, int column,
                            const std::vector<std::string>& expected);
  int line_;
  int column_;
};

}  // namespace sirsql
