#include "sirsql/ast.hpp"

#include "sirsql/ident.hpp"

namespace sirsql::ast {

Expr Expr::column(std::string qualifier, std::string name) {
  Expr e;
  e.kind = ExprKind::Column;
  e.qualifier = std::move(qualifier);
  e.text = std::move(name);
  return e;
}

Expr Expr::number(std::string spelling) {
  Expr e;
  e.kind = ExprKind::Number;
  e.text = std::move(spelling);
  return e;
}

Expr Expr::string(std::string value) {
  Expr e;
  e.kind = ExprKind::String;
  e.text = std::move(value);
  return e;
}

Expr Expr::null() { return Expr{}; }

Expr Expr::binary(std::string op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.text = std::move(op);
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::call(std::string name, std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::Call;
  e.text = std::move(name);
  e.args = std::move(args);
  return e;
}

TableRef TableRef::named(std::string name, std::string alias) {
  TableRef t;
  t.kind = Kind::Named;
  t.name = std::move(name);
  t.alias = std::move(alias);
  return t;
}

bool is_sir(const CreateTable& stmt) noexcept {
  for (const auto& el : stmt.elements)
    if (std::holds_alternative<IeDecl>(el)) return true;
  return false;
}

std::string_view statement_kind(const Statement& stmt) noexcept {
  static constexpr std::string_view names[] = {
      "CreateTable", "CreateView", "AlterTable", "DropTable", "DropView",
      "CreateIndex", "Query",      "Insert",     "Update",    "Delete"};
  return names[stmt.node.index()];
}

namespace {

void visit_table(const TableRef& t, bool into, const std::function<void(const Expr&)>& fn) {
  switch (t.kind) {
    case TableRef::Kind::Named:
      break;
    case TableRef::Kind::Derived:
      if (into && t.derived) visit(*t.derived, into, fn);
      break;
    case TableRef::Kind::Join:
      visit_table(*t.left, into, fn);
      visit_table(*t.right, into, fn);
      if (t.on) visit(*t.on, into, fn);
      break;
  }
}

void visit_table_mut(TableRef& t, bool into, const std::function<void(Expr&)>& fn) {
  switch (t.kind) {
    case TableRef::Kind::Named:
      break;
    case TableRef::Kind::Derived:
      if (into && t.derived) visit_mut(*t.derived, into, fn);
      break;
    case TableRef::Kind::Join:
      visit_table_mut(*t.left, into, fn);
      visit_table_mut(*t.right, into, fn);
      if (t.on) visit_mut(*t.on, into, fn);
      break;
  }
}

void collect_tables(const TableRef& t, std::vector<std::string>& out);

void collect_tables(const Select& s, std::vector<std::string>& out) {
  for (const auto& t : s.from) collect_tables(t, out);
  visit(s, false, [&](const Expr& e) {
    if (e.subquery) collect_tables(*e.subquery, out);
  });
}

void collect_tables(const TableRef& t, std::vector<std::string>& out) {
  switch (t.kind) {
    case TableRef::Kind::Named:
      if (!contains_ci(out, t.name)) out.push_back(t.name);
      break;
    case TableRef::Kind::Derived:
      if (t.derived) collect_tables(*t.derived, out);
      break;
    case TableRef::Kind::Join:
      collect_tables(*t.left, out);
      collect_tables(*t.right, out);
      if (t.on) {
        visit(*t.on, false, [&](const Expr& e) {
          if (e.subquery) collect_tables(*e.subquery, out);
        });
      }
      break;
  }
}

}  // namespace

void visit(const Expr& expr, bool into_subqueries, const std::function<void(const Expr&)>& fn) {
  fn(expr);
  for (const auto& a : expr.args) visit(a, into_subqueries, fn);
  if (into_subqueries && expr.subquery) visit(*expr.subquery, into_subqueries, fn);
}

void visit(const Select& s, bool into, const std::function<void(const Expr&)>& fn) {
  for (const auto& item : s.items)
    if (item.kind == SelectItem::Kind::Expr) visit(item.expr, into, fn);
  for (const auto& t : s.from) visit_table(t, into, fn);
  if (s.where) visit(*s.where, into, fn);
  for (const auto& g : s.group_by) visit(g, into, fn);
  if (s.having) visit(*s.having, into, fn);
  for (const auto& o : s.order_by) visit(o.expr, into, fn);
}

void visit_mut(Expr& expr, bool into, const std::function<void(Expr&)>& fn) {
  fn(expr);
  for (auto& a : expr.args) visit_mut(a, into, fn);
  if (into && expr.subquery) visit_mut(*expr.subquery, into, fn);
}

void visit_mut(Select& s, bool into, const std::function<void(Expr&)>& fn) {
  for (auto& item : s.items)
    if (item.kind == SelectItem::Kind::Expr) visit_mut(item.expr, into, fn);
  for (auto& t : s.from) visit_table_mut(t, into, fn);
  if (s.where) visit_mut(*s.where, into, fn);
  for (auto& g : s.group_by) visit_mut(g, into, fn);
  if (s.having) visit_mut(*s.having, into, fn);
  for (auto& o : s.order_by) visit_mut(o.expr, into, fn);
}

std::vector<std::string> referenced_tables(const Select& select) {
  std::vector<std::string> out;
  collect_tables(select, out);
  return out;
}

std::vector<std::string> referenced_tables(const Expr& expr) {
  std::vector<std::string> out;
  visit(expr, false, [&](const Expr& e) {
    if (e.subquery) collect_tables(*e.subquery, out);
  });
  return out;
}

std::vector<Expr> conjuncts(const Expr& expr) {
  if (expr.kind == ExprKind::Binary && iequals(expr.text, "AND")) {
    auto out = conjuncts(expr.args[0]);
    auto rhs = conjuncts(expr.args[1]);
    out.insert(out.end(), rhs.begin(), rhs.end());
    return out;
  }
  return {expr};
}

Expr conjoin(std::vector<Expr> terms) {
  Expr out = std::move(terms.front());
  for (std::size_t i = 1; i < terms.size(); ++i)
    out = Expr::binary("AND", std::move(out), std::move(terms[i]));
  return out;
}

}  // namespace sirsql::ast
