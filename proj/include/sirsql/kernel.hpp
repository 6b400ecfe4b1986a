#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "sirsql/error.hpp"

namespace sirsql {

struct Value {
  enum class Type { Null, Integer, Real, Text };
  Type type = Type::Null;
  std::int64_t integer = 0;
  double real = 0;
  std::string text;

  static Value null() { return {}; }
  static Value of(std::int64_t v) { return {Type::Integer, v, 0, {}}; }
  static Value of_real(double v) { return {Type::Real, 0, v, {}}; }
  static Value of(std::string v) { return {Type::Text, 0, 0, std::move(v)}; }

  bool is_null() const noexcept { return type == Type::Null; }
  /// Canonical text: integers in decimal, reals with 15 significant digits.
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) noexcept;
  friend bool operator<(const Value& a, const Value& b) noexcept;
};

using Row = std::vector<Value>;

struct RowSet {
  std::vector<std::string> columns;
  std::vector<Row> rows;

  bool operator==(const RowSet&) const = default;
};

enum class Capability { LeftJoin, ScalarSubquery, StringAggregation, Conditional };

std::string_view capability_name(Capability c) noexcept;

struct KernelObject {
  std::string name;
  std::string type;  // "table", "view" or "index"
  bool operator==(const KernelObject&) const = default;
};

/// Engine-agnostic access to the kernel relational engine.
class Kernel {
 public:
  virtual ~Kernel() = default;

  /// Runs a statement that returns rows.
  virtual RowSet query(std::string_view sql) = 0;
  /// Runs a statement (or a `;`-separated batch) and returns the number of changed rows.
  virtual std::int64_t execute(std::string_view sql) = 0;

  virtual void begin() = 0;
  virtual void commit() = 0;
  virtual void rollback() = 0;
  virtual bool in_transaction() const = 0;

  /// Column names of a table or view, in kernel order. Throws UnknownObject.
  virtual std::vector<std::string> introspect(std::string_view object) = 0;
  /// The stored DDL text of an object, if it exists.
  virtual std::optional<std::string> object_definition(std::string_view object) = 0;
  virtual std::vector<KernelObject> list_objects() = 0;
  /// DDL of the explicitly created indexes on a table.
  virtual std::vector<std::string> index_definitions(std::string_view table) const = 0;
  bool exists(std::string_view object) { return object_definition(object).has_value(); }

  virtual bool has(Capability c) const = 0;
  /// Name of the implicit row identifier of base tables.
  virtual std::string row_id() const = 0;

  template <class F>
  auto within_transaction(F&& work) -> decltype(work()) {
    if (in_transaction())
      throw Error(Errc::NestedTransaction, "a transaction is already open on this connection");
    begin();
    try {
      if constexpr (std::is_void_v<decltype(work())>) {
        work();
        commit();
      } else {
        auto result = work();
        commit();
        return result;
      }
    } catch (...) {
      rollback();
      throw;
    }
  }
};

}  // namespace sirsql
