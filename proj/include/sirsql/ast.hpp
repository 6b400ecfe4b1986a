#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sirsql/box.hpp"

namespace sirsql::ast {

struct Select;

enum class ExprKind {
  Column,    // qualifier.name or name
  Number,    // text = literal spelling
  String,    // text = unescaped value
  Null,
  Star,      // the `*` of count(*)
  Unary,     // text = operator, args[0]
  Binary,    // text = operator, args[0], args[1]
  Call,      // text = function name, args; distinct flag
  Subquery,  // scalar subquery
  Exists,    // EXISTS (subquery), negated
  IsNull,    // args[0] IS [NOT] NULL
  InList,    // args[0] [NOT] IN (args[1..])
  InSelect,  // args[0] [NOT] IN (subquery)
  Between,   // args[0] [NOT] BETWEEN args[1] AND args[2]
  Like,      // args[0] [NOT] LIKE args[1]
};

struct Expr {
  ExprKind kind = ExprKind::Null;
  std::string qualifier;  // Column only
  std::string text;       // column name, literal, operator or function name
  std::vector<Expr> args;
  box<Select> subquery;
  bool negated = false;
  bool distinct = false;

  static Expr column(std::string qualifier, std::string name);
  static Expr number(std::string spelling);
  static Expr string(std::string value);
  static Expr null();
  static Expr binary(std::string op, Expr lhs, Expr rhs);
  static Expr call(std::string name, std::vector<Expr> args);

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct QualifiedName {
  std::string qualifier;
  std::string name;
  friend bool operator==(const QualifiedName&, const QualifiedName&) = default;
};

struct SelectItem {
  enum class Kind { Expr, Star, StarMinus };
  Kind kind = Kind::Expr;
  Expr expr;
  std::string alias;
  std::string qualifier;                // `T.*`
  std::vector<QualifiedName> excluded;  // `*/A` or `*/(A1, ..., An)`

  friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

enum class JoinKind { Inner, Left, Right, Cross };

struct TableRef {
  enum class Kind { Named, Derived, Join };
  Kind kind = Kind::Named;
  std::string name;
  std::string alias;
  box<Select> derived;
  JoinKind join = JoinKind::Inner;
  box<TableRef> left;
  box<TableRef> right;
  box<Expr> on;

  static TableRef named(std::string name, std::string alias = {});
  friend bool operator==(const TableRef&, const TableRef&) = default;
};

struct OrderItem {
  Expr expr;
  bool descending = false;
  friend bool operator==(const OrderItem&, const OrderItem&) = default;
};

struct Select {
  bool distinct = false;
  std::optional<std::int64_t> limit;
  bool top_style = false;  // `SELECT TOP n` rather than trailing LIMIT
  std::vector<SelectItem> items;
  std::vector<TableRef> from;
  box<Expr> where;
  std::vector<Expr> group_by;
  box<Expr> having;
  std::vector<OrderItem> order_by;

  friend bool operator==(const Select&, const Select&) = default;
};

struct ForeignRef {
  std::string table;
  std::vector<std::string> columns;
  friend bool operator==(const ForeignRef&, const ForeignRef&) = default;
};

struct AttributeDecl {
  std::string name;
  std::string sql_type;
  bool is_primary_key = false;
  bool not_null = false;
  bool unique = false;
  std::optional<ForeignRef> references;
  friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

struct ValueItem {
  Expr expr;
  std::string name;
  friend bool operator==(const ValueItem&, const ValueItem&) = default;
};

/// An inheritance expression as written in a Create/Alter Table.
struct IeDecl {
  enum class Form { Select, Value };
  std::string name;
  Form form = Form::Select;
  Select select;                  // Select form
  std::vector<ValueItem> values;  // Value form
  bool shorthand = false;         // `NAME As (expr)` spelling of a one-item value form
  std::string trailing_from;      // the ignored `) FROM X` suffix, kept for rendering

  friend bool operator==(const IeDecl&, const IeDecl&) = default;
};

struct TableConstraint {
  enum class Kind { PrimaryKey, Unique, ForeignKey };
  Kind kind = Kind::PrimaryKey;
  std::vector<std::string> columns;
  std::optional<ForeignRef> references;
  friend bool operator==(const TableConstraint&, const TableConstraint&) = default;
};

using TableElement = std::variant<AttributeDecl, IeDecl, TableConstraint>;

struct CreateTable {
  std::string name;
  std::vector<TableElement> elements;
  friend bool operator==(const CreateTable&, const CreateTable&) = default;
};

struct CreateView {
  std::string name;
  std::vector<std::string> columns;
  Select select;
  friend bool operator==(const CreateView&, const CreateView&) = default;
};

struct CreateIndex {
  std::string name;
  std::string table;
  std::vector<std::string> columns;
  bool unique = false;
  friend bool operator==(const CreateIndex&, const CreateIndex&) = default;
};

enum class Position { Append, Before, After };

struct AlterAction {
  enum class Kind { Add, Alter, Drop };
  Kind kind = Kind::Add;
  Position position = Position::Append;  // Add
  std::string anchor;                    // Add Before/After anchor
  std::vector<TableElement> elements;    // Add
  std::string target;                    // Alter / Drop
  IeDecl replacement;                    // Alter
  friend bool operator==(const AlterAction&, const AlterAction&) = default;
};

struct AlterTable {
  std::string name;
  std::vector<AlterAction> actions;
  friend bool operator==(const AlterTable&, const AlterTable&) = default;
};

enum class DropMode { Restrict, Cascade };

struct DropTable {
  std::string name;
  DropMode mode = DropMode::Restrict;
  bool mode_explicit = false;
  friend bool operator==(const DropTable&, const DropTable&) = default;
};

struct DropView {
  std::string name;
  DropMode mode = DropMode::Restrict;
  bool mode_explicit = false;
  friend bool operator==(const DropView&, const DropView&) = default;
};

struct Insert {
  std::string table;
  std::vector<std::string> columns;
  std::vector<std::vector<Expr>> rows;  // VALUES form
  box<Select> select;                   // INSERT ... SELECT form
  bool parenthesized_select = false;
  friend bool operator==(const Insert&, const Insert&) = default;
};

struct Assignment {
  std::string column;
  Expr value;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Update {
  std::string table;
  std::vector<Assignment> assignments;
  box<Expr> where;
  friend bool operator==(const Update&, const Update&) = default;
};

struct Delete {
  std::string table;
  box<Expr> where;
  friend bool operator==(const Delete&, const Delete&) = default;
};

using StatementNode = std::variant<CreateTable, CreateView, AlterTable, DropTable, DropView,
                                   CreateIndex, Select, Insert, Update, Delete>;

struct SourcePos {
  int line = 1;
  int column = 1;
  std::size_t offset = 0;
};

struct Statement {
  StatementNode node;
  SourcePos pos;     // not part of equality
  std::string text;  // source slice, not part of equality

  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(node);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(node);
  }
  template <class T>
  T& as() {
    return std::get<T>(node);
  }

  friend bool operator==(const Statement& a, const Statement& b) { return a.node == b.node; }
};

/// True for a Create Table carrying at least one inheritance expression.
bool is_sir(const CreateTable& stmt) noexcept;

/// Short label naming the statement variant ("CreateTable", "Query"...).
std::string_view statement_kind(const Statement& stmt) noexcept;

// Traversal helpers shared by the compiler and router.

/// Visits every expression node (depth first, pre-order), descending into
/// subqueries when `into_subqueries` is set.
void visit(const Expr& expr, bool into_subqueries, const std::function<void(const Expr&)>& fn);
void visit(const Select& select, bool into_subqueries,
           const std::function<void(const Expr&)>& fn);
void visit_mut(Expr& expr, bool into_subqueries, const std::function<void(Expr&)>& fn);
void visit_mut(Select& select, bool into_subqueries, const std::function<void(Expr&)>& fn);

/// Every table name reachable from `select`, including in nested subqueries.
std::vector<std::string> referenced_tables(const Select& select);
std::vector<std::string> referenced_tables(const Expr& expr);

/// Splits an AND chain into its conjuncts.
std::vector<Expr> conjuncts(const Expr& expr);
Expr conjoin(std::vector<Expr> terms);

}  // namespace sirsql::ast
