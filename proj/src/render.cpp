#include "sirsql/render.hpp"

#include "sirsql/error.hpp"
#include "sirsql/ident.hpp"
#include "sirsql/lexer.hpp"

namespace sirsql {

using namespace ast;

namespace {

bool plain_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool plain_char(char c) { return plain_start(c) || (c >= '0' && c <= '9'); }

// Kernel keywords beyond the dialect's reserved set that cannot appear bare.
constexpr std::string_view kKernelKeywords[] = {
    "ABORT", "ACTION", "ADD", "CASE", "CHECK", "COLLATE", "COLUMN", "COMMIT", "CONSTRAINT",
    "DEFAULT", "ELSE", "END", "ESCAPE", "EXCEPT", "FOREIGN", "GLOB", "INDEX", "INTERSECT",
    "ISNULL", "KEY", "NOTNULL", "OFFSET", "PRIMARY", "REFERENCES", "REGEXP", "THEN",
    "TRANSACTION", "TRIGGER", "UNIQUE", "USING", "WHEN", "WITH"};

bool needs_quotes(std::string_view name, Dialect dialect) {
  if (name.empty() || is_reserved_word(name)) return true;
  if (dialect == Dialect::Kernel)
    for (auto k : kKernelKeywords)
      if (iequals(name, k)) return true;
  bool sir = dialect == Dialect::Sir;
  auto start_ok = [&](char c) { return plain_start(c) || (sir && c == '#'); };
  auto char_ok = [&](char c) { return plain_char(c) || (sir && (c == '#' || c == '$')); };
  if (!start_ok(name[0])) return true;
  for (char c : name.substr(1))
    if (!char_ok(c)) return true;
  return false;
}

enum Prec { kOr = 1, kAnd, kNot, kCmp, kAdd, kMul, kUnary, kAtom };

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      if (iequals(e.text, "OR")) return kOr;
      if (iequals(e.text, "AND")) return kAnd;
      if (e.text == "+" || e.text == "-" || e.text == "||") return kAdd;
      if (e.text == "*" || e.text == "/" || e.text == "%") return kMul;
      return kCmp;
    case ExprKind::Unary:
      return iequals(e.text, "NOT") ? kNot : kUnary;
    case ExprKind::IsNull:
    case ExprKind::InList:
    case ExprKind::InSelect:
    case ExprKind::Between:
    case ExprKind::Like:
      return kCmp;
    default:
      return kAtom;
  }
}

class Renderer {
 public:
  explicit Renderer(const RenderOptions& opts) : opts_(opts) {}

  std::string id(std::string_view name) const { return quote_ident(name, opts_); }

  std::string expr(const Expr& e, int min_prec = 0) const {
    std::string s = expr_body(e);
    if (precedence(e) < min_prec) return "(" + s + ")";
    return s;
  }

  std::string expr_body(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Column:
        return e.qualifier.empty() ? id(e.text) : id(e.qualifier) + "." + id(e.text);
      case ExprKind::Number:
        return e.text;
      case ExprKind::String: {
        std::string out = "'";
        for (char c : e.text) {
          out.push_back(c);
          if (c == '\'') out.push_back('\'');
        }
        return out + "'";
      }
      case ExprKind::Null:
        return "NULL";
      case ExprKind::Star:
        return "*";
      case ExprKind::Unary: {
        if (iequals(e.text, "NOT")) return "NOT " + expr(e.args[0], kNot);
        const Expr& operand = e.args[0];
        std::string inner = expr(operand, kUnary);
        if (operand.kind == ExprKind::Unary || (!inner.empty() && (inner[0] == '-' || inner[0] == '+')))
          inner = "(" + expr_body(operand) + ")";
        return e.text + inner;
      }
      case ExprKind::Binary: {
        int p = precedence(e);
        std::string op = p == kOr ? "OR" : p == kAnd ? "AND" : e.text;
        int left = p == kCmp ? kCmp + 1 : p;
        return expr(e.args[0], left) + " " + op + " " + expr(e.args[1], p + 1);
      }
      case ExprKind::Call: {
        std::string out = e.text + "(";
        if (e.distinct) out += "DISTINCT ";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
          if (i) out += ", ";
          out += expr(e.args[i]);
        }
        return out + ")";
      }
      case ExprKind::Subquery:
        return "(" + select(*e.subquery) + ")";
      case ExprKind::Exists:
        return std::string(e.negated ? "NOT " : "") + "EXISTS (" + select(*e.subquery) + ")";
      case ExprKind::IsNull:
        return expr(e.args[0], kCmp + 1) + (e.negated ? " IS NOT NULL" : " IS NULL");
      case ExprKind::InList: {
        std::string out = expr(e.args[0], kCmp + 1) + (e.negated ? " NOT IN (" : " IN (");
        for (std::size_t i = 1; i < e.args.size(); ++i) {
          if (i > 1) out += ", ";
          out += expr(e.args[i]);
        }
        return out + ")";
      }
      case ExprKind::InSelect:
        return expr(e.args[0], kCmp + 1) + (e.negated ? " NOT IN (" : " IN (") +
               select(*e.subquery) + ")";
      case ExprKind::Between:
        return expr(e.args[0], kCmp + 1) + (e.negated ? " NOT BETWEEN " : " BETWEEN ") +
               expr(e.args[1], kCmp + 1) + " AND " + expr(e.args[2], kCmp + 1);
      case ExprKind::Like:
        return expr(e.args[0], kCmp + 1) + (e.negated ? " NOT LIKE " : " LIKE ") +
               expr(e.args[1], kCmp + 1);
    }
    return {};
  }

  std::string item(const SelectItem& it) const {
    switch (it.kind) {
      case SelectItem::Kind::Star:
        return it.qualifier.empty() ? "*" : id(it.qualifier) + ".*";
      case SelectItem::Kind::StarMinus: {
        if (opts_.dialect == Dialect::Kernel)
          throw Error(Errc::UnrenderableNode, "star-minus item must be expanded before rendering");
        auto qn = [&](const QualifiedName& q) {
          return q.qualifier.empty() ? id(q.name) : id(q.qualifier) + "." + id(q.name);
        };
        if (it.excluded.size() == 1) return "*/" + qn(it.excluded[0]);
        std::string out = "*/(";
        for (std::size_t i = 0; i < it.excluded.size(); ++i) {
          if (i) out += ", ";
          out += qn(it.excluded[i]);
        }
        return out + ")";
      }
      case SelectItem::Kind::Expr:
        break;
    }
    std::string out = expr(it.expr);
    if (!it.alias.empty()) out += " AS " + id(it.alias);
    return out;
  }

  std::string table(const TableRef& t, bool nested = false) const {
    switch (t.kind) {
      case TableRef::Kind::Named:
        return t.alias.empty() ? id(t.name) : id(t.name) + " " + id(t.alias);
      case TableRef::Kind::Derived:
        return "(" + select(*t.derived) + ") AS " + id(t.alias);
      case TableRef::Kind::Join:
        break;
    }
    std::string kw = t.join == JoinKind::Inner  ? " JOIN "
                     : t.join == JoinKind::Left ? " LEFT JOIN "
                     : t.join == JoinKind::Right ? " RIGHT JOIN "
                                                 : " CROSS JOIN ";
    std::string out = table(*t.left) + kw + table(*t.right, true);
    if (t.on) out += " ON " + expr(*t.on);
    return nested ? "(" + out + ")" : out;
  }

  std::string select(const Select& s) const {
    if (s.items.empty()) throw Error(Errc::UnrenderableNode, "empty select list");
    bool sir = opts_.dialect == Dialect::Sir;
    std::string out = "SELECT ";
    if (s.distinct) out += "DISTINCT ";
    if (s.limit && s.top_style && sir) out += "TOP " + std::to_string(*s.limit) + " ";
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      if (i) out += ", ";
      out += item(s.items[i]);
    }
    if (!s.from.empty()) {
      out += " FROM ";
      for (std::size_t i = 0; i < s.from.size(); ++i) {
        if (i) out += ", ";
        out += table(s.from[i]);
      }
    }
    if (s.where) out += " WHERE " + expr(*s.where);
    if (!s.group_by.empty()) {
      out += " GROUP BY ";
      for (std::size_t i = 0; i < s.group_by.size(); ++i) {
        if (i) out += ", ";
        out += expr(s.group_by[i]);
      }
    }
    if (s.having) out += " HAVING " + expr(*s.having);
    if (!s.order_by.empty()) {
      out += " ORDER BY ";
      for (std::size_t i = 0; i < s.order_by.size(); ++i) {
        if (i) out += ", ";
        out += expr(s.order_by[i].expr);
        if (s.order_by[i].descending) out += " DESC";
      }
    }
    if (s.limit && !(s.top_style && sir)) out += " LIMIT " + std::to_string(*s.limit);
    return out;
  }

  std::string names(const std::vector<std::string>& cols) const {
    std::string out = "(";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ", ";
      out += id(cols[i]);
    }
    return out + ")";
  }

  std::string foreign(const ForeignRef& r) const {
    std::string out = id(r.table);
    if (!r.columns.empty()) out += names(r.columns);
    return out;
  }

  std::string element(const TableElement& el) const {
    if (const auto* a = std::get_if<AttributeDecl>(&el)) {
      std::string out = id(a->name) + " " + a->sql_type;
      if (a->is_primary_key) out += " PRIMARY KEY";
      if (a->not_null) out += " NOT NULL";
      if (a->unique) out += " UNIQUE";
      if (a->references) out += " REFERENCES " + foreign(*a->references);
      return out;
    }
    if (const auto* c = std::get_if<TableConstraint>(&el)) {
      switch (c->kind) {
        case TableConstraint::Kind::PrimaryKey:
          return "PRIMARY KEY " + names(c->columns);
        case TableConstraint::Kind::Unique:
          return "UNIQUE " + names(c->columns);
        case TableConstraint::Kind::ForeignKey:
          return "FOREIGN KEY " + names(c->columns) + " REFERENCES " + foreign(*c->references);
      }
    }
    const auto& ie = std::get<IeDecl>(el);
    if (opts_.dialect == Dialect::Kernel)
      throw Error(Errc::UnrenderableNode, "inheritance expression " + ie.name + " has no kernel form");
    std::string out;
    if (ie.form == IeDecl::Form::Select) {
      out = id(ie.name) + " (" + select(ie.select) + ")";
    } else if (ie.shorthand && ie.values.size() == 1 && iequals(ie.values[0].name, ie.name)) {
      out = id(ie.name) + " AS (" + expr(ie.values[0].expr) + ")";
    } else {
      out = id(ie.name) + " (";
      for (std::size_t i = 0; i < ie.values.size(); ++i) {
        if (i) out += ", ";
        out += expr(ie.values[i].expr) + " AS " + id(ie.values[i].name);
      }
      out += ")";
    }
    if (!ie.trailing_from.empty()) out += " FROM " + id(ie.trailing_from);
    return out;
  }

  std::string operator()(const CreateTable& ct) const {
    std::string out = "CREATE TABLE " + id(ct.name) + " (";
    for (std::size_t i = 0; i < ct.elements.size(); ++i) {
      if (i) out += ", ";
      out += element(ct.elements[i]);
    }
    return out + ")";
  }

  std::string operator()(const CreateView& v) const {
    std::string out = "CREATE VIEW " + id(v.name);
    if (!v.columns.empty()) out += " " + names(v.columns);
    return out + " AS " + select(v.select);
  }

  std::string operator()(const CreateIndex& ci) const {
    return std::string("CREATE ") + (ci.unique ? "UNIQUE " : "") + "INDEX " + id(ci.name) +
           " ON " + id(ci.table) + " " + names(ci.columns);
  }

  std::string operator()(const AlterTable& at) const {
    if (opts_.dialect == Dialect::Kernel)
      throw Error(Errc::UnrenderableNode, "ALTER TABLE is compiled, not rendered");
    std::string out = "ALTER TABLE " + id(at.name) + " ";
    for (std::size_t i = 0; i < at.actions.size(); ++i) {
      if (i) out += ", ";
      const auto& a = at.actions[i];
      switch (a.kind) {
        case AlterAction::Kind::Add:
          out += "ADD ";
          if (a.position == Position::Before) out += "BEFORE " + id(a.anchor) + " ";
          if (a.position == Position::After) out += "AFTER " + id(a.anchor) + " ";
          for (std::size_t j = 0; j < a.elements.size(); ++j) {
            if (j) out += ", ";
            out += element(a.elements[j]);
          }
          break;
        case AlterAction::Kind::Alter:
          out += "ALTER " + id(a.target) + " AS " + element(a.replacement);
          break;
        case AlterAction::Kind::Drop:
          out += "DROP " + id(a.target);
          break;
      }
    }
    return out;
  }

  template <class D>
  std::string drop(const char* what, const D& d) const {
    std::string out = std::string("DROP ") + what + " " + id(d.name);
    if (d.mode_explicit) out += d.mode == DropMode::Cascade ? " CASCADE" : " RESTRICT";
    return out;
  }
  std::string operator()(const DropTable& d) const { return drop("TABLE", d); }
  std::string operator()(const DropView& d) const { return drop("VIEW", d); }

  std::string operator()(const Select& s) const { return select(s); }

  std::string operator()(const Insert& ins) const {
    std::string out = "INSERT INTO " + id(ins.table);
    if (!ins.columns.empty()) out += " " + names(ins.columns);
    if (ins.select) {
      if (ins.parenthesized_select && opts_.dialect == Dialect::Sir)
        return out + " (" + select(*ins.select) + ")";
      return out + " " + select(*ins.select);
    }
    out += " VALUES ";
    for (std::size_t r = 0; r < ins.rows.size(); ++r) {
      if (r) out += ", ";
      out += "(";
      for (std::size_t i = 0; i < ins.rows[r].size(); ++i) {
        if (i) out += ", ";
        out += expr(ins.rows[r][i]);
      }
      out += ")";
    }
    return out;
  }

  std::string operator()(const Update& up) const {
    std::string out = "UPDATE " + id(up.table) + " SET ";
    for (std::size_t i = 0; i < up.assignments.size(); ++i) {
      if (i) out += ", ";
      out += id(up.assignments[i].column) + " = " + expr(up.assignments[i].value);
    }
    if (up.where) out += " WHERE " + expr(*up.where);
    return out;
  }

  std::string operator()(const Delete& d) const {
    std::string out = "DELETE FROM " + id(d.table);
    if (d.where) out += " WHERE " + expr(*d.where);
    return out;
  }

 private:
  RenderOptions opts_;
};

}  // namespace

std::string quote_ident(std::string_view name, const RenderOptions& opts) {
  if (!needs_quotes(name, opts.dialect)) return std::string(name);
  if (opts.quoting == Quoting::Bracket && name.find(']') == std::string_view::npos)
    return "[" + std::string(name) + "]";
  std::string out = "\"";
  for (char c : name) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  return out + "\"";
}

std::string render(const Expr& expr, const RenderOptions& opts) {
  return Renderer(opts).expr(expr);
}

std::string render(const Select& select, const RenderOptions& opts) {
  return Renderer(opts).select(select);
}

std::string render(const TableElement& element, const RenderOptions& opts) {
  return Renderer(opts).element(element);
}

std::string render(const StatementNode& node, const RenderOptions& opts) {
  return std::visit(Renderer(opts), node);
}

}  // namespace sirsql
