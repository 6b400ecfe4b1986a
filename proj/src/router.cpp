#include "sirsql/router.hpp"

#include "sirsql/compiler.hpp"
#include "sirsql/ident.hpp"
#include "sirsql/render.hpp"

namespace sirsql {

using namespace ast;

namespace {

constexpr RenderOptions kKernel{Dialect::Kernel, Quoting::Bracket};

std::string q(std::string_view name) { return quote_ident(name, kKernel); }

std::string tuple(const std::vector<std::string>& cols) {
  std::string out;
  for (const auto& c : cols) out += (out.empty() ? "" : ", ") + q(c);
  return cols.size() == 1 ? out : "(" + out + ")";
}

std::string column_list(const std::vector<std::string>& cols) {
  std::string out;
  for (const auto& c : cols) out += (out.empty() ? "" : ", ") + q(c);
  return out;
}

std::vector<std::string> write_keys(const CatalogEntry& e) {
  auto keys = e.key_columns();
  return keys.empty() ? e.stored_columns() : keys;
}

/// IAs of the SIR renamed from a source column called `name`.
std::vector<std::string> renamed_from(const CatalogEntry& e, const std::string& name) {
  std::vector<std::string> out;
  if (e.kind != RelationKind::Sir) return out;
  for (const auto& el : e.table().elements) {
    const auto* ie = std::get_if<IeDecl>(&el);
    if (!ie || ie->form != IeDecl::Form::Select) continue;
    for (const auto& it : ie->select.items)
      if (it.kind == SelectItem::Kind::Expr && it.expr.kind == ExprKind::Column && iequals(it.expr.text, name) &&
          !it.alias.empty())
        out.push_back(it.alias);
  }
  return out;
}

/// Checks that `name` is a stored attribute of the SIR; `what` names the
/// statement part for the diagnostic.
void require_stored(const CatalogEntry& e, const std::string& name, std::string_view what) {
  const AttrMeta* a = e.attr(name);
  if (!a) {
    auto ias = renamed_from(e, name);
    if (ias.empty()) throw Error(Errc::UnknownColumn, "no column " + e.name + "." + name, {name});
    std::string list;
    for (const auto& x : ias) list += (list.empty() ? "" : ", ") + x;
    throw Error(Errc::RejectedWrite,
                std::string(what) + " " + name + ", which " + e.name + " only inherits (as " + list +
                    "): IA not writable",
                ias);
  }
  if (a->is_inherited)
    throw Error(Errc::RejectedWrite,
                std::string(what) + " inherited attribute " + name + " of " + e.name +
                    ": IA not writable (its IE " + a->ie_name + " computes it)",
                {name});
}

/// Columns of the target read outside subqueries, by name.
std::vector<std::string> target_columns(const Expr& e, const CatalogEntry& target) {
  std::vector<std::string> out;
  visit(e, false, [&](const Expr& x) {
    if (x.kind != ExprKind::Column) return;
    if (!x.qualifier.empty() && !iequals(x.qualifier, target.name) && !iequals(x.qualifier, target.base_object()))
      throw Error(Errc::UnknownColumn, "unknown qualifier in " + x.qualifier + "." + x.text,
                  {x.qualifier + "." + x.text});
    if (!target.attr(x.text)) throw Error(Errc::UnknownColumn, "no column " + target.name + "." + x.text, {x.text});
    out.push_back(x.text);
  });
  return out;
}

bool has_subquery(const Expr& e) {
  bool found = false;
  visit(e, false, [&](const Expr& x) { found = found || static_cast<bool>(x.subquery); });
  return found;
}

bool stored_only(const Expr& e, const CatalogEntry& target) {
  if (has_subquery(e)) return false;
  for (const auto& c : target_columns(e, target))
    if (target.attr(c)->is_inherited) return false;
  return true;
}

void to_base(Expr& e, const CatalogEntry& target) {
  visit_mut(e, false, [&](Expr& x) {
    if (x.kind == ExprKind::Column && iequals(x.qualifier, target.name)) x.qualifier = target.base_object();
  });
}

/// The WHERE clause of a write on R_B: the predicate itself when it reads
/// stored attributes only, else a key match against the full view.
std::string base_where(const box<Expr>& where, const CatalogEntry& target) {
  if (!where) return {};
  Expr w = *where;
  if (stored_only(w, target)) {
    to_base(w, target);
    return " WHERE " + render(w, kKernel);
  }
  auto keys = write_keys(target);
  return " WHERE " + tuple(keys) + " IN (SELECT " + column_list(keys) + " FROM " + q(target.name) +
         " WHERE " + render(w, kKernel) + ")";
}

Routed route_insert(const Insert& ins, const CatalogEntry& target) {
  Insert out = ins;
  out.table = target.base_object();
  if (out.columns.empty()) {
    bool named = out.select && !out.select->items.empty();
    if (named) {
      for (const auto& it : out.select->items) {
        std::string n = !it.alias.empty() ? it.alias
                        : it.kind == SelectItem::Kind::Expr && it.expr.kind == ExprKind::Column ? it.expr.text
                                                                                                  : std::string();
        if (n.empty() || !target.attr(n)) {
          named = false;
          break;
        }
        out.columns.push_back(n);
      }
      if (!named) out.columns.clear();
    }
    if (!named) {
      auto stored = target.stored_columns();
      std::size_t width = out.rows.empty() ? (out.select ? out.select->items.size() : 0) : out.rows.front().size();
      if (width != stored.size())
        throw Error(Errc::RejectedWrite,
                    "Insert into " + target.name + " supplies " + std::to_string(width) + " values for " +
                        std::to_string(stored.size()) + " stored attributes; name the columns",
                    {target.name});
      out.columns = stored;
    }
  }
  for (const auto& c : out.columns) require_stored(target, c, "Insert names");
  return {RouteKind::BaseRewrite, render(StatementNode{out}, kKernel), target.name, false};
}

Routed route_update(const Update& up, const CatalogEntry& target) {
  Update out = up;
  out.table = target.base_object();
  out.where.reset();
  for (auto& a : out.assignments) {
    require_stored(target, a.column, "Update sets");
    for (const auto& c : target_columns(a.value, target))
      if (target.attr(c)->is_inherited)
        throw Error(Errc::RejectedWrite,
                    "Update of " + a.column + " reads inherited attribute " + c + "; IA values are not writable inputs",
                    {c});
    to_base(a.value, target);
  }
  return {RouteKind::BaseRewrite, render(StatementNode{out}, kKernel) + base_where(up.where, target), target.name,
          false};
}

Routed route_delete(const Delete& del, const CatalogEntry& target) {
  return {RouteKind::BaseRewrite, "DELETE FROM " + q(target.base_object()) + base_where(del.where, target),
          target.name, false};
}

const CatalogEntry* write_target(const std::string& name, const Catalog& catalog) {
  if (const auto* e = catalog.find(name)) return e;
  if (catalog.base_owner(name)) return nullptr;
  throw Error(Errc::UnknownRelation, "no relation named " + name, {name});
}

}  // namespace

Routed route(const StatementNode& stmt, const Catalog& catalog) {
  if (const auto* sel = std::get_if<Select>(&stmt))
    return {RouteKind::PassThrough, render(expand_select(*sel, catalog), kKernel), {}, true};

  std::string table;
  if (const auto* s = std::get_if<Insert>(&stmt)) table = s->table;
  else if (const auto* s = std::get_if<Update>(&stmt)) table = s->table;
  else if (const auto* s = std::get_if<Delete>(&stmt)) table = s->table;
  else throw Error(Errc::Unsupported, "only queries and Insert/Update/Delete are routed");

  const CatalogEntry* target = write_target(table, catalog);
  if (!target || target->kind != RelationKind::Sir) {
    StatementNode copy = stmt;
    if (auto* ins = std::get_if<Insert>(&copy); ins && ins->select) *ins->select = expand_select(*ins->select, catalog);
    return {RouteKind::PassThrough, render(copy, kKernel), table, false};
  }
  if (const auto* s = std::get_if<Insert>(&stmt)) {
    Insert ins = *s;
    if (ins.select) *ins.select = expand_select(*ins.select, catalog);
    return route_insert(ins, *target);
  }
  if (const auto* s = std::get_if<Update>(&stmt)) return route_update(*s, *target);
  return route_delete(std::get<Delete>(stmt), *target);
}

std::vector<IeViolation> check_ie_integrity(const CatalogEntry& sir, const Catalog& catalog, Kernel& kernel) {
  std::vector<IeViolation> out;
  if (sir.kind != RelationKind::Sir) return out;
  const CreateTable& def = sir.table();
  auto keys = write_keys(sir);
  auto stored = sir.stored_columns();
  for (const auto& el : def.elements) {
    const auto* ie = std::get_if<IeDecl>(&el);
    if (!ie) continue;
    CanonicalIE c = canonicalize(*ie, def, catalog);
    if (c.kind != IeKind::JoinForm) continue;
    bool over_base = std::all_of(c.reads.begin(), c.reads.end(),
                                 [&](const std::string& r) { return contains_ci(stored, r); });
    const std::string prev = over_base ? sir.base_object() : sir.name;
    Select s = stage_query(c, prev);
    s.items.clear();
    for (const auto& k : keys) {
      SelectItem it;
      it.expr = Expr::column(prev, k);
      s.items.push_back(std::move(it));
    }
    Expr star;
    star.kind = ExprKind::Star;
    SelectItem n;
    n.expr = Expr::call("COUNT", {star});
    s.items.push_back(std::move(n));
    if (over_base) {
      s.group_by.push_back(Expr::column(prev, kernel.row_id()));
    } else {
      for (const auto& k : keys) s.group_by.push_back(Expr::column(prev, k));
    }
    s.having = Expr::binary(">", Expr::call("COUNT", {star}), Expr::number("1"));
    RowSet rows = kernel.query(render(s, kKernel));
    for (auto& r : rows.rows) {
      IeViolation v;
      v.ie = c.name;
      v.matches = r.back().integer;
      r.pop_back();
      v.key = std::move(r);
      out.push_back(std::move(v));
    }
  }
  return out;
}

void enforce_insert_computability(const CatalogEntry& sir, const Catalog& catalog, Kernel& kernel,
                                  std::int64_t after_rowid) {
  if (sir.kind != RelationKind::Sir) return;
  const CreateTable& def = sir.table();
  auto keys = write_keys(sir);
  std::vector<std::string> failing;
  std::vector<Row> failing_keys;
  for (const auto& el : def.elements) {
    const auto* ie = std::get_if<IeDecl>(&el);
    if (!ie) continue;
    CanonicalIE c = canonicalize(*ie, def, catalog);
    if (c.kind != IeKind::JoinForm) continue;
    std::string sql = "SELECT " + column_list(keys) + " FROM " + q(sir.name) + " WHERE " + tuple(keys) +
                      " IN (SELECT " + column_list(keys) + " FROM " + q(sir.base_object()) + " WHERE " +
                      kernel.row_id() + " > " + std::to_string(after_rowid) + ")";
    for (const auto& p : c.produced) sql += " AND " + q(p) + " IS NULL";
    RowSet rows = kernel.query(sql);
    if (rows.rows.empty()) continue;
    failing.push_back(c.name);
    for (auto& r : rows.rows) failing_keys.push_back(std::move(r));
  }
  if (failing.empty()) return;
  std::string ies, ks;
  for (const auto& f : failing) ies += (ies.empty() ? "" : ", ") + f;
  for (const auto& r : failing_keys) {
    std::string one;
    for (const auto& v : r) one += (one.empty() ? "" : ", ") + v.to_string();
    ks += (ks.empty() ? "(" : "; (") + one + ")";
  }
  throw Error(Errc::IaNotComputable, "IEs " + ies + " of " + sir.name + " find no tuple for " + ks, failing);
}

}  // namespace sirsql
