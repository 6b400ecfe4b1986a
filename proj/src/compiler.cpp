#include "sirsql/compiler.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sirsql/ident.hpp"
#include "sirsql/parser.hpp"
#include "sirsql/render.hpp"

namespace sirsql {

using namespace ast;

std::string_view ie_kind_name(IeKind k) noexcept {
  switch (k) {
    case IeKind::JoinForm: return "JoinForm";
    case IeKind::SubqueryForm: return "SubqueryForm";
    case IeKind::ValueForm: return "ValueForm";
  }
  return "?";
}

std::vector<std::string> KernelPlan::objects() const {
  std::vector<std::string> out;
  for (const auto& s : steps) out.push_back(s.object);
  return out;
}

std::string KernelPlan::text() const {
  std::string out;
  for (const auto& s : steps) out += s.ddl + ";\n";
  return out;
}

namespace {

constexpr RenderOptions kKernel{Dialect::Kernel, Quoting::Bracket};

bool is_aggregate_call(const Expr& e) {
  if (e.kind != ExprKind::Call) return false;
  static constexpr std::string_view always[] = {"SUM", "COUNT", "AVG", "TOTAL", "LIST", "GROUP_CONCAT"};
  for (auto a : always)
    if (iequals(e.text, a)) return true;
  return (iequals(e.text, "MIN") || iequals(e.text, "MAX")) && e.args.size() == 1;
}

bool contains_aggregate(const Expr& e) {
  bool found = false;
  visit(e, false, [&](const Expr& x) { found = found || is_aggregate_call(x); });
  return found;
}

bool mentions_self(const Expr& e) {
  bool found = false;
  visit(e, true, [&](const Expr& x) {
    found = found || (x.kind == ExprKind::Column && x.qualifier == kSelf);
  });
  return found;
}

std::set<std::string, ILess> qualifiers_in(const Expr& e) {
  std::set<std::string, ILess> out;
  visit(e, true, [&](const Expr& x) {
    if (x.kind == ExprKind::Column && !x.qualifier.empty()) out.insert(x.qualifier);
  });
  return out;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (!contains_ci(v, s)) v.push_back(s);
}

std::string ref_name(const TableRef& t) { return t.alias.empty() ? t.name : t.alias; }

// ---- relation renaming ------------------------------------------------------

void rename_tables(Select& s, const std::function<void(TableRef&)>& on_named,
                   const std::function<void(Expr&)>& on_column);

void rename_in_expr(Expr& e, const std::function<void(TableRef&)>& on_named,
                    const std::function<void(Expr&)>& on_column) {
  if (e.kind == ExprKind::Column) on_column(e);
  for (auto& a : e.args) rename_in_expr(a, on_named, on_column);
  if (e.subquery) rename_tables(*e.subquery, on_named, on_column);
}

void rename_in_table(TableRef& t, const std::function<void(TableRef&)>& on_named,
                     const std::function<void(Expr&)>& on_column) {
  switch (t.kind) {
    case TableRef::Kind::Named:
      on_named(t);
      break;
    case TableRef::Kind::Derived:
      rename_tables(*t.derived, on_named, on_column);
      break;
    case TableRef::Kind::Join:
      rename_in_table(*t.left, on_named, on_column);
      rename_in_table(*t.right, on_named, on_column);
      if (t.on) rename_in_expr(*t.on, on_named, on_column);
      break;
  }
}

void rename_tables(Select& s, const std::function<void(TableRef&)>& on_named,
                   const std::function<void(Expr&)>& on_column) {
  for (auto& it : s.items) {
    if (it.kind == SelectItem::Kind::Expr) rename_in_expr(it.expr, on_named, on_column);
    if (it.kind == SelectItem::Kind::Star && !it.qualifier.empty()) {
      Expr probe = Expr::column(it.qualifier, "*");
      on_column(probe);
      it.qualifier = probe.qualifier;
    }
  }
  for (auto& t : s.from) rename_in_table(t, on_named, on_column);
  if (s.where) rename_in_expr(*s.where, on_named, on_column);
  for (auto& g : s.group_by) rename_in_expr(g, on_named, on_column);
  if (s.having) rename_in_expr(*s.having, on_named, on_column);
  for (auto& o : s.order_by) rename_in_expr(o.expr, on_named, on_column);
}

/// Points every kSelf reference at the view stage `prev`.
void bind_self(Select& s, const std::string& prev) {
  rename_tables(
      s, [&](TableRef& t) { if (t.name == kSelf) t.name = prev; },
      [&](Expr& c) { if (c.qualifier == kSelf) c.qualifier = prev; });
}

void bind_self(Expr& e, const std::string& prev) {
  rename_in_expr(
      e, [&](TableRef& t) { if (t.name == kSelf) t.name = prev; },
      [&](Expr& c) { if (c.qualifier == kSelf) c.qualifier = prev; });
}

// ---- name resolution --------------------------------------------------------

struct Binding {
  std::string qualifier;
  std::string relation;
  bool self = false;
  std::vector<std::string> columns;
};

struct Scope {
  std::vector<Binding> bindings;
  const Scope* parent = nullptr;
};

class Resolver {
 public:
  Resolver(const Catalog& catalog, std::string rel, std::vector<std::string> rel_attrs)
      : catalog_(catalog), rel_(std::move(rel)), rel_attrs_(std::move(rel_attrs)) {}

  std::vector<std::string> reads;
  std::vector<std::string> relations;
  std::vector<std::pair<std::string, std::string>> column_uses;  // (relation, column)
  bool self_source = false;
  bool dropped_self = false;

  Scope select(Select& s, const Scope* parent, bool top) {
    Scope sc;
    sc.parent = parent;
    std::vector<TableRef> kept;
    for (auto& t : s.from) {
      if (top && t.kind == TableRef::Kind::Named && iequals(t.name, rel_) && t.alias.empty()) {
        dropped_self = true;
        continue;
      }
      bind_table(t, sc);
      kept.push_back(std::move(t));
    }
    s.from = std::move(kept);

    std::vector<SelectItem> items;
    for (auto& it : s.items) {
      if (it.kind == SelectItem::Kind::Expr) {
        expr(it.expr, sc);
        items.push_back(std::move(it));
        continue;
      }
      if (it.kind == SelectItem::Kind::Star && !top) {
        if (!it.qualifier.empty() && !find_binding(sc, it.qualifier))
          throw Error(Errc::UnknownRelation, "no source named " + it.qualifier + " for " +
                                                 it.qualifier + ".*", {it.qualifier});
        items.push_back(std::move(it));
        continue;
      }
      std::vector<SourceColumns> sources;
      for (const auto& b : sc.bindings) {
        if (b.self) {
          if (!it.qualifier.empty() && iequals(it.qualifier, b.qualifier))
            throw Error(Errc::Unsupported, "star over the enclosing relation " + rel_);
          continue;
        }
        sources.push_back({b.qualifier, b.columns});
      }
      for (auto& q : expand_star_minus(it, sources)) {
        SelectItem col;
        col.expr = Expr::column(q.qualifier, q.name);
        expr(col.expr, sc);
        items.push_back(std::move(col));
      }
    }
    s.items = std::move(items);
    if (s.where) expr(*s.where, sc);
    for (auto& g : s.group_by) expr(g, sc);
    if (s.having) expr(*s.having, sc);
    for (auto& o : s.order_by) {
      if (o.expr.kind == ExprKind::Column && o.expr.qualifier.empty() && is_alias(s, o.expr.text)) continue;
      expr(o.expr, sc);
    }
    return sc;
  }

  void expr(Expr& e, const Scope& sc) {
    switch (e.kind) {
      case ExprKind::Column:
        column(e, sc);
        return;
      case ExprKind::Subquery:
      case ExprKind::Exists:
        select(*e.subquery, &sc, false);
        return;
      case ExprKind::InSelect:
        expr(e.args[0], sc);
        select(*e.subquery, &sc, false);
        return;
      default:
        for (auto& a : e.args) expr(a, sc);
    }
  }

 private:
  static bool is_alias(const Select& s, std::string_view name) {
    for (const auto& it : s.items)
      if (it.kind == SelectItem::Kind::Expr && iequals(it.alias, name)) return true;
    return false;
  }

  static const Binding* find_binding(const Scope& sc, std::string_view qualifier) {
    for (const Scope* s = &sc; s; s = s->parent)
      for (const auto& b : s->bindings)
        if (iequals(b.qualifier, qualifier)) return &b;
    return nullptr;
  }

  void bind_table(TableRef& t, Scope& sc) {
    switch (t.kind) {
      case TableRef::Kind::Named: {
        if (iequals(t.name, rel_)) {
          if (t.alias.empty())
            throw Error(Errc::Unsupported,
                        "alias " + rel_ + " when reading it inside a nested subquery");
          t.name = std::string(kSelf);
          self_source = true;
          sc.bindings.push_back({t.alias, rel_, true, rel_attrs_});
          return;
        }
        auto cols = catalog_.columns_of(t.name);
        if (!cols) throw Error(Errc::UnknownRelation, "no relation named " + t.name, {t.name});
        push_unique(relations, t.name);
        sc.bindings.push_back({ref_name(t), t.name, false, *cols});
        return;
      }
      case TableRef::Kind::Derived: {
        select(*t.derived, sc.parent, false);
        std::vector<std::string> cols;
        for (const auto& it : t.derived->items) {
          if (it.kind != SelectItem::Kind::Expr)
            throw Error(Errc::Unsupported, "star in a derived table of an inheritance expression");
          cols.push_back(!it.alias.empty() ? it.alias : it.expr.text);
        }
        sc.bindings.push_back({t.alias, {}, false, cols});
        return;
      }
      case TableRef::Kind::Join:
        bind_table(*t.left, sc);
        bind_table(*t.right, sc);
        if (t.on) expr(*t.on, sc);
        return;
    }
  }

  void note(const Binding& b, const std::string& col) {
    if (b.self)
      push_unique(reads, col);
    else if (!b.relation.empty())
      column_uses.emplace_back(b.relation, col);
  }

  void column(Expr& e, const Scope& sc) {
    if (e.qualifier == kSelf) return;
    if (!e.qualifier.empty()) {
      if (const Binding* b = find_binding(sc, e.qualifier)) {
        if (!contains_ci(b->columns, e.text))
          throw Error(Errc::UnknownColumn, "no column " + e.qualifier + "." + e.text,
                      {e.qualifier + "." + e.text});
        e.qualifier = b->qualifier;
        note(*b, e.text);
        return;
      }
      if (iequals(e.qualifier, rel_)) {
        if (!contains_ci(rel_attrs_, e.text))
          throw Error(Errc::UnknownColumn, "no column " + rel_ + "." + e.text, {rel_ + "." + e.text});
        e.qualifier = std::string(kSelf);
        push_unique(reads, e.text);
        return;
      }
      throw Error(Errc::UnknownColumn, "unknown qualifier in " + e.qualifier + "." + e.text,
                  {e.qualifier + "." + e.text});
    }
    for (const Scope* s = &sc; s; s = s->parent) {
      const Binding* hit = nullptr;
      for (const auto& b : s->bindings) {
        if (!contains_ci(b.columns, e.text)) continue;
        if (hit)
          throw Error(Errc::AmbiguousColumn, "column " + e.text + " is in " + hit->qualifier + " and " +
                                                 b.qualifier, {e.text});
        hit = &b;
      }
      if (hit) {
        e.qualifier = hit->qualifier;
        note(*hit, e.text);
        return;
      }
    }
    if (contains_ci(rel_attrs_, e.text)) {
      e.qualifier = std::string(kSelf);
      push_unique(reads, e.text);
      return;
    }
    throw Error(Errc::UnknownColumn, "no column " + e.text, {e.text});
  }

  const Catalog& catalog_;
  std::string rel_;
  std::vector<std::string> rel_attrs_;
};

// ---- declared order ---------------------------------------------------------

/// The top-level sources of an IE's FROM other than the enclosing relation.
std::vector<SourceColumns> ie_sources(const Select& s, std::string_view rel, const Catalog& catalog) {
  std::vector<SourceColumns> out;
  std::function<void(const TableRef&)> walk = [&](const TableRef& t) {
    switch (t.kind) {
      case TableRef::Kind::Named: {
        if (iequals(t.name, rel)) return;
        auto cols = catalog.columns_of(t.name);
        if (!cols) throw Error(Errc::UnknownRelation, "no relation named " + t.name, {t.name});
        out.push_back({ref_name(t), *cols});
        return;
      }
      case TableRef::Kind::Derived: {
        std::vector<std::string> cols;
        for (const auto& it : t.derived->items)
          if (it.kind == SelectItem::Kind::Expr) cols.push_back(!it.alias.empty() ? it.alias : it.expr.text);
        out.push_back({t.alias, cols});
        return;
      }
      case TableRef::Kind::Join:
        walk(*t.left);
        walk(*t.right);
        return;
    }
  };
  for (const auto& t : s.from) walk(t);
  return out;
}

bool is_subquery_form(const Select& s) {
  if (!s.group_by.empty()) return true;
  for (const auto& it : s.items)
    if (it.kind == SelectItem::Kind::Expr && contains_aggregate(it.expr)) return true;
  return false;
}

std::vector<std::string> produced_names(const IeDecl& ie, std::string_view rel, const Catalog& catalog) {
  std::vector<std::string> out;
  if (ie.form == IeDecl::Form::Value) {
    for (const auto& v : ie.values) out.push_back(v.name);
    return out;
  }
  auto sources = ie_sources(ie.select, rel, catalog);
  for (const auto& it : ie.select.items) {
    if (it.kind != SelectItem::Kind::Expr) {
      for (auto& q : expand_star_minus(it, sources)) out.push_back(q.name);
      continue;
    }
    if (!it.alias.empty())
      out.push_back(it.alias);
    else if (it.expr.kind == ExprKind::Column)
      out.push_back(it.expr.text);
    else
      out.push_back({});
  }
  if (is_subquery_form(ie.select)) {
    if (out.size() != 1)
      throw Error(Errc::Unsupported, "aggregate IE " + ie.name + " must define exactly one attribute");
    if (ie.select.items[0].alias.empty()) out[0] = ie.name;
  }
  for (const auto& n : out)
    if (n.empty())
      throw Error(Errc::InvariantViolation, "every attribute of IE " + ie.name + " needs a name",
                  {"named IE attributes"});
  return out;
}

std::vector<std::string> declared_order(const CreateTable& def, const Catalog& catalog) {
  std::vector<std::string> out;
  for (const auto& el : def.elements) {
    if (const auto* a = std::get_if<AttributeDecl>(&el)) out.push_back(a->name);
    if (const auto* ie = std::get_if<IeDecl>(&el)) {
      auto p = produced_names(*ie, def.name, catalog);
      out.insert(out.end(), p.begin(), p.end());
    }
  }
  std::set<std::string, ILess> seen;
  for (const auto& n : out)
    if (!seen.insert(n).second)
      throw Error(Errc::DuplicateAttribute, "attribute " + n + " appears twice in " + def.name, {n});
  return out;
}

// ---- plan construction ------------------------------------------------------

bool calls(const Expr& e, std::string_view fn) {
  bool found = false;
  visit(e, true, [&](const Expr& x) { found = found || (x.kind == ExprKind::Call && iequals(x.text, fn)); });
  return found;
}

bool has_subquery(const Expr& e) {
  bool found = false;
  visit(e, true, [&](const Expr& x) { found = found || static_cast<bool>(x.subquery); });
  return found;
}

void require_capabilities(const CanonicalIE& ie, const Kernel* kernel) {
  if (!kernel) return;
  auto need = [&](Capability c) {
    if (!kernel->has(c))
      throw Error(Errc::CapabilityMissing,
                  "IE " + ie.name + " needs the kernel capability " + std::string(capability_name(c)),
                  {std::string(capability_name(c))});
  };
  std::vector<const Expr*> exprs;
  Expr sub;
  for (const auto& it : ie.items) exprs.push_back(&it.expr);
  for (const auto& j : ie.joins) exprs.push_back(&j.on);
  for (const auto& v : ie.values) exprs.push_back(&v.expr);
  if (ie.kind == IeKind::SubqueryForm) {
    sub.kind = ExprKind::Subquery;
    sub.subquery = ie.subquery;
    exprs.push_back(&sub);
  }
  if (ie.kind == IeKind::JoinForm) need(Capability::LeftJoin);
  for (const Expr* e : exprs) {
    if (has_subquery(*e)) need(Capability::ScalarSubquery);
    if (calls(*e, "LIST") || calls(*e, "GROUP_CONCAT")) need(Capability::StringAggregation);
    if (calls(*e, "IIF")) need(Capability::Conditional);
  }
}

SelectItem star_of(const std::string& q) {
  SelectItem it;
  it.kind = SelectItem::Kind::Star;
  it.qualifier = q;
  return it;
}

SelectItem named_item(Expr e, const std::string& alias) {
  SelectItem it;
  it.expr = std::move(e);
  if (!(it.expr.kind == ExprKind::Column && iequals(it.expr.text, alias))) it.alias = alias;
  return it;
}

/// Kernels aggregate in scan order, so an ordered aggregate such as
/// `Select LIST(a, b) From F Where W Order By o` reads an ordered derived table.
Select ordered_aggregate(Select q) {
  if (q.order_by.empty() || !q.group_by.empty() || q.having || q.items.size() != 1) return q;
  const Expr& agg = q.items[0].expr;
  if (!is_aggregate_call(agg) || agg.distinct) return q;
  for (const auto& a : agg.args)
    if (a.kind == ExprKind::Star || contains_aggregate(a)) return q;
  Select inner = q;
  inner.items.clear();
  Expr call = agg;
  for (std::size_t i = 0; i < agg.args.size(); ++i) {
    SelectItem it;
    it.expr = agg.args[i];
    it.alias = "a" + std::to_string(i + 1);
    call.args[i] = Expr::column("ordered", it.alias);
    inner.items.push_back(std::move(it));
  }
  Select outer;
  SelectItem item;
  item.expr = std::move(call);
  item.alias = q.items[0].alias;
  outer.items.push_back(std::move(item));
  TableRef d;
  d.kind = TableRef::Kind::Derived;
  d.alias = "ordered";
  d.derived = std::move(inner);
  outer.from.push_back(std::move(d));
  return outer;
}

struct Stage {
  std::vector<const CanonicalIE*> members;
};

/// `SELECT prev.*, <new attributes> FROM <prev joined as needed>`; the new
/// attributes are also returned by name for reordering.
Select stage_select(const Stage& st, const std::string& prev,
                    std::vector<std::pair<std::string, SelectItem>>& added) {
  Select s;
  s.items.push_back(star_of(prev));
  const CanonicalIE& first = *st.members.front();
  if (first.kind == IeKind::JoinForm) {
    TableRef left = TableRef::named(prev);
    for (const auto& j : first.joins) {
      TableRef t;
      t.kind = TableRef::Kind::Join;
      t.join = JoinKind::Left;
      t.left = std::move(left);
      t.right = j.source;
      t.on = j.on;
      left = std::move(t);
    }
    s.from.push_back(std::move(left));
    for (std::size_t i = 0; i < first.items.size(); ++i)
      added.emplace_back(first.produced[i], named_item(first.items[i].expr, first.produced[i]));
  } else if (first.kind == IeKind::SubqueryForm) {
    s.from.push_back(TableRef::named(prev));
    Expr sub;
    sub.kind = ExprKind::Subquery;
    sub.subquery = ordered_aggregate(first.subquery);
    added.emplace_back(first.produced[0], named_item(std::move(sub), first.produced[0]));
  } else {
    s.from.push_back(TableRef::named(prev));
    std::map<std::string, Expr, ILess> inlined;
    for (const CanonicalIE* m : st.members) {
      for (const auto& v : m->values) {
        Expr e = v.expr;
        if (!inlined.empty()) {
          visit_mut(e, true, [&](Expr& x) {
            if (x.kind == ExprKind::Column && x.qualifier == kSelf) {
              auto it = inlined.find(x.text);
              if (it != inlined.end()) x = it->second;
            }
          });
        }
        inlined[v.name] = e;
        added.emplace_back(v.name, named_item(std::move(e), v.name));
      }
    }
  }
  for (auto& [name, item] : added) s.items.push_back(item);
  bind_self(s, prev);
  for (auto& [name, item] : added) bind_self(item.expr, prev);
  return s;
}

std::string view_ddl(const std::string& name, const Select& s) {
  return "CREATE VIEW " + quote_ident(name, kKernel) + " AS " + render(s, kKernel);
}

ForeignRef base_reference(ForeignRef r, const Catalog& catalog) {
  if (const auto* e = catalog.find(r.table); e && e->kind == RelationKind::Sir) r.table = e->base_object();
  return r;
}

std::string base_ddl(const CreateTable& def, const std::string& name, const Catalog& catalog) {
  CreateTable base;
  base.name = name;
  for (const auto& el : def.elements) {
    if (const auto* a = std::get_if<AttributeDecl>(&el)) {
      AttributeDecl copy = *a;
      if (copy.references) copy.references = base_reference(*copy.references, catalog);
      base.elements.emplace_back(std::move(copy));
    } else if (const auto* c = std::get_if<TableConstraint>(&el)) {
      TableConstraint copy = *c;
      if (copy.references) copy.references = base_reference(*copy.references, catalog);
      base.elements.emplace_back(std::move(copy));
    }
  }
  return render(StatementNode{base}, kKernel);
}

std::vector<std::string> key_columns(const CreateTable& def) {
  std::vector<std::string> keys;
  for (const auto& el : def.elements) {
    if (const auto* a = std::get_if<AttributeDecl>(&el); a && a->is_primary_key) keys.push_back(a->name);
    if (const auto* c = std::get_if<TableConstraint>(&el); c && c->kind == TableConstraint::Kind::PrimaryKey)
      for (const auto& k : c->columns) push_unique(keys, k);
  }
  return keys;
}

std::string canonical_text(const CanonicalIE& ie, const std::string& rel) {
  RenderOptions sir{Dialect::Sir, Quoting::Bracket};
  IeDecl out;
  out.name = ie.name;
  if (ie.kind == IeKind::ValueForm) {
    out.form = IeDecl::Form::Value;
    out.values = ie.values;
    for (auto& v : out.values) bind_self(v.expr, rel);
  } else {
    out.form = IeDecl::Form::Select;
    if (ie.kind == IeKind::SubqueryForm) {
      out.select = ie.subquery;
      if (out.select.items.size() == 1) out.select.items[0].alias = ie.produced[0];
    } else {
      std::vector<std::pair<std::string, SelectItem>> added;
      Stage st{{&ie}};
      out.select = stage_select(st, rel, added);
      out.select.items.erase(out.select.items.begin());
    }
    bind_self(out.select, rel);
  }
  return render(TableElement{out}, sir);
}

}  // namespace

// ---- public operations ------------------------------------------------------

std::vector<QualifiedName> expand_star_minus(const SelectItem& item, const std::vector<SourceColumns>& sources) {
  std::vector<QualifiedName> out;
  const SourceColumns* only = nullptr;
  if (item.kind == SelectItem::Kind::Star && !item.qualifier.empty()) {
    for (const auto& s : sources)
      if (iequals(s.qualifier, item.qualifier)) only = &s;
    if (!only)
      throw Error(Errc::UnknownRelation, "no source named " + item.qualifier, {item.qualifier});
  }
  for (const auto& ex : item.excluded) {
    bool found = false;
    for (const auto& s : sources) {
      if (!ex.qualifier.empty() && !iequals(ex.qualifier, s.qualifier)) continue;
      found = found || contains_ci(s.columns, ex.name);
    }
    if (!found) {
      std::string n = ex.qualifier.empty() ? ex.name : ex.qualifier + "." + ex.name;
      throw Error(Errc::UnknownExcludedColumn, "excluded column " + n + " is not in any source", {n});
    }
  }
  for (const auto& s : sources) {
    if (only && &s != only) continue;
    for (const auto& c : s.columns) {
      bool excluded = std::any_of(item.excluded.begin(), item.excluded.end(), [&](const QualifiedName& q) {
        return iequals(q.name, c) && (q.qualifier.empty() || iequals(q.qualifier, s.qualifier));
      });
      if (!excluded) out.push_back({s.qualifier, c});
    }
  }
  return out;
}

CanonicalIE canonicalize(const IeDecl& ie, const CreateTable& sir, const Catalog& catalog) {
  CanonicalIE out;
  out.name = ie.name;
  auto attrs = declared_order(sir, catalog);
  out.produced = produced_names(ie, sir.name, catalog);
  Resolver res(catalog, sir.name, attrs);
  Scope empty;

  if (ie.form == IeDecl::Form::Value) {
    out.kind = IeKind::ValueForm;
    out.values = ie.values;
    for (auto& v : out.values) res.expr(v.expr, empty);
  } else {
    Select s = ie.select;
    res.select(s, nullptr, true);
    if (is_subquery_form(ie.select)) {
      out.kind = IeKind::SubqueryForm;
      s.items[0].alias.clear();
      out.subquery = std::move(s);
    } else {
      out.kind = IeKind::JoinForm;
      std::vector<std::set<std::string, ILess>> unit_names;
      for (const auto& t : s.from) {
        std::set<std::string, ILess> names;
        std::function<void(const TableRef&)> leaves = [&](const TableRef& r) {
          if (r.kind == TableRef::Kind::Join) {
            leaves(*r.left);
            leaves(*r.right);
          } else {
            names.insert(r.name == kSelf ? r.alias : ref_name(r));
          }
        };
        leaves(t);
        unit_names.push_back(std::move(names));
      }
      std::vector<std::vector<Expr>> attached(s.from.size());
      bool recursive = false;
      if (s.where) {
        for (auto& c : conjuncts(*s.where)) {
          if (mentions_self(c)) {
            bool eq = c.kind == ExprKind::Binary && c.text == "=" &&
                      mentions_self(c.args[0]) != mentions_self(c.args[1]);
            if (!eq)
              throw Error(Errc::Unsupported, "recursive join of IE " + ie.name +
                                                 " is not an equijoin; declare it with an aggregate or as a value expression");
            const Expr& side = mentions_self(c.args[0]) ? c.args[0] : c.args[1];
            visit(side, true, [&](const Expr& x) {
              if (x.kind == ExprKind::Column && x.qualifier == kSelf) push_unique(out.join_attrs, x.text);
            });
            recursive = true;
          }
          if (s.from.empty()) continue;
          auto qs = qualifiers_in(c);
          std::size_t unit = 0;
          for (std::size_t i = 0; i < unit_names.size(); ++i)
            for (const auto& q : qs)
              if (unit_names[i].count(q)) unit = std::max(unit, i);
          attached[unit].push_back(std::move(c));
        }
      }
      if (!recursive || s.from.empty())
        throw Error(Errc::MissingRecursiveJoin,
                    "IE " + ie.name + " has no join predicate referencing " + sir.name, {ie.name});
      for (std::size_t i = 0; i < s.from.size(); ++i) {
        Expr on = attached[i].empty() ? Expr::number("1") : conjoin(std::move(attached[i]));
        out.joins.push_back({std::move(s.from[i]), std::move(on)});
      }
      out.items = std::move(s.items);
      if (s.distinct) {
        // each named source becomes (SELECT DISTINCT <columns used> FROM source)
        for (auto& j : out.joins) {
          if (j.source.kind != TableRef::Kind::Named || j.source.name == kSelf) continue;
          std::string ref = ref_name(j.source);
          std::vector<std::string> cols;
          auto collect = [&](const Expr& e) {
            visit(e, false, [&](const Expr& x) {
              if (x.kind == ExprKind::Column && iequals(x.qualifier, ref)) push_unique(cols, x.text);
            });
          };
          for (const auto& it : out.items) collect(it.expr);
          for (const auto& other : out.joins) collect(other.on);
          if (cols.empty()) continue;
          Select d;
          d.distinct = true;
          for (const auto& c : cols) d.items.push_back(named_item(Expr::column({}, c), {}));
          d.from.push_back(TableRef::named(j.source.name));
          TableRef t;
          t.kind = TableRef::Kind::Derived;
          t.alias = ref;
          t.derived = std::move(d);
          j.source = std::move(t);
        }
      }
    }
  }
  out.reads = res.reads;
  out.relations = res.relations;
  out.self_source = res.self_source;
  return out;
}

std::vector<CanonicalIE> order_ies(std::vector<CanonicalIE> ies) {
  auto depends = [](const CanonicalIE& a, const CanonicalIE& b) {
    for (const auto& r : a.reads)
      if (contains_ci(b.produced, r)) return true;
    return false;
  };
  for (const auto& ie : ies)
    if (depends(ie, ie))
      throw Error(Errc::IeCycle, "IE " + ie.name + " reads its own attribute", {ie.name});
  std::vector<CanonicalIE> out;
  std::vector<bool> done(ies.size(), false);
  for (std::size_t round = 0; round < ies.size(); ++round) {
    std::size_t pick = ies.size();
    for (std::size_t i = 0; i < ies.size() && pick == ies.size(); ++i) {
      if (done[i]) continue;
      bool ready = true;
      for (std::size_t k = 0; k < ies.size(); ++k)
        if (!done[k] && k != i && depends(ies[i], ies[k])) ready = false;
      if (ready) pick = i;
    }
    if (pick == ies.size()) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < ies.size(); ++i)
        if (!done[i]) names.push_back(ies[i].name);
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
      throw Error(Errc::IeCycle, "IEs read each other's attributes: " + list, names);
    }
    done[pick] = true;
    out.push_back(ies[pick]);
  }
  return out;
}

IeDecl rewrite_to_base(const IeDecl& ie, const CreateTable& sir, const Catalog& catalog) {
  if (!catalog.find(sir.name)) return ie;
  auto readers = catalog.transitive_dependents(sir.name);
  CanonicalIE probe;
  Resolver res(catalog, sir.name, declared_order(sir, catalog));
  Scope empty;
  if (ie.form == IeDecl::Form::Value) {
    IeDecl copy = ie;
    for (auto& v : copy.values) res.expr(v.expr, empty);
  } else {
    Select s = ie.select;
    res.select(s, nullptr, true);
  }
  std::vector<std::string> targets;
  for (const auto& rel : res.relations) {
    if (!contains_ci(readers, rel)) continue;
    const CatalogEntry& x = catalog.get(rel);
    if (x.kind != RelationKind::Sir)
      throw Error(Errc::NotRewritable, rel + " is not an SIR and has no base to read", {rel});
    for (const auto& [r, col] : res.column_uses) {
      if (!iequals(r, rel)) continue;
      const AttrMeta* a = x.attr(col);
      if (a && a->is_inherited)
        throw Error(Errc::NotRewritable,
                    "IE " + ie.name + " reads inherited attribute " + rel + "." + col + ", absent from " +
                        x.base_object(), {rel + "." + col});
    }
    targets.push_back(rel);
  }
  if (targets.empty()) return ie;
  IeDecl out = ie;
  auto base_of = [&](const std::string& n) -> const CatalogEntry* {
    for (const auto& t : targets)
      if (iequals(t, n)) return &catalog.get(t);
    return nullptr;
  };
  auto on_named = [&](TableRef& t) {
    if (const auto* x = base_of(t.name)) t.name = x->base_object();
  };
  auto on_column = [&](Expr& c) {
    if (const auto* x = base_of(c.qualifier)) c.qualifier = x->base_object();
  };
  if (out.form == IeDecl::Form::Value) {
    for (auto& v : out.values) rename_in_expr(v.expr, on_named, on_column);
  } else {
    rename_tables(out.select, on_named, on_column);
  }
  return out;
}

CompiledRelation compile_relation(const CreateTable& def, const Catalog& catalog, const CompileOptions& options,
                                  const Kernel* kernel) {
  CompiledRelation out;
  CatalogEntry& e = out.entry;
  e.name = def.name;
  e.definition = def;
  e.kind = is_sir(def) ? RelationKind::Sir : RelationKind::Stored;

  auto order = declared_order(def, catalog);
  auto keys = key_columns(def);
  std::vector<std::string> stored;
  for (const auto& el : def.elements)
    if (const auto* a = std::get_if<AttributeDecl>(&el)) stored.push_back(a->name);
  for (const auto& k : keys)
    if (!contains_ci(stored, k))
      throw Error(Errc::InvariantViolation, "key attribute " + k + " of " + def.name + " is not stored",
                  {"keys of B"});

  std::vector<CanonicalIE> canon;
  for (const auto& el : def.elements) {
    const auto* ie = std::get_if<IeDecl>(&el);
    if (!ie) continue;
    canon.push_back(canonicalize(*ie, def, catalog));
    require_capabilities(canon.back(), kernel);
    IeMeta meta{ie->name, render(el, {Dialect::Sir, Quoting::Bracket}), canonical_text(canon.back(), def.name)};
    e.ies.push_back(std::move(meta));
    for (const auto& r : canon.back().relations) push_unique(e.deps, r);
  }
  for (const auto& el : def.elements) {
    const ForeignRef* ref = nullptr;
    if (const auto* a = std::get_if<AttributeDecl>(&el); a && a->references) ref = &*a->references;
    if (const auto* c = std::get_if<TableConstraint>(&el); c && c->references) ref = &*c->references;
    if (ref && !iequals(ref->table, def.name)) push_unique(e.deps, ref->table);
  }

  for (const auto& el : def.elements) {
    if (const auto* a = std::get_if<AttributeDecl>(&el)) {
      e.attrs.push_back({a->name, a->sql_type, contains_ci(keys, a->name), false, {}});
    } else if (const auto* ie = std::get_if<IeDecl>(&el)) {
      const auto& c = *std::find_if(canon.begin(), canon.end(), [&](const CanonicalIE& x) { return x.name == ie->name; });
      for (const auto& p : c.produced) e.attrs.push_back({p, {}, false, true, ie->name});
    }
  }

  if (e.kind == RelationKind::Stored) {
    out.plan.final_name = def.name;
    out.plan.steps.push_back({def.name, PlanStep::Kind::Table, base_ddl(def, def.name, catalog)});
    e.kernel_objects = out.plan.objects();
    return out;
  }

  if (stored.empty())
    throw Error(Errc::InvariantViolation, def.name + " has no stored attribute", {"B non-empty"});
  bool any_join = false, matched = false;
  for (const auto& c : canon) {
    if (c.kind != IeKind::JoinForm) continue;
    any_join = true;
    for (const auto& j : c.join_attrs) matched = matched || contains_ci(stored, j);
  }
  if (any_join && !matched)
    throw Error(Errc::InvariantViolation,
                "no recursive join of " + def.name + " matches a stored attribute", {"recursive join on SA"});

  out.order = order_ies(canon);
  std::vector<Stage> stages;
  for (const auto& c : out.order) {
    bool mergeable = options.collapse_value_ies && c.kind == IeKind::ValueForm && !c.self_source;
    if (mergeable && !stages.empty()) {
      const CanonicalIE& last = *stages.back().members.back();
      if (last.kind == IeKind::ValueForm && !last.self_source) {
        stages.back().members.push_back(&c);
        continue;
      }
    }
    stages.push_back({{&c}});
  }

  const std::string base = def.name + "_B";
  out.plan.final_name = def.name;
  out.plan.steps.push_back({base, PlanStep::Kind::Table, base_ddl(def, base, catalog)});

  std::string prev = base;
  std::vector<std::string> cols = stored;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    std::vector<std::pair<std::string, SelectItem>> added;
    Select s = stage_select(stages[i], prev, added);
    std::vector<std::string> next_cols = cols;
    for (const auto& [n, it] : added) next_cols.push_back(n);
    bool last = i + 1 == stages.size();
    bool in_order = std::equal(next_cols.begin(), next_cols.end(), order.begin(), order.end(),
                               [](const std::string& a, const std::string& b) { return iequals(a, b); });
    if (last && !in_order && options.skip_redundant_full_view) {
      s.items.clear();
      for (const auto& name : order) {
        auto it = std::find_if(added.begin(), added.end(), [&](const auto& p) { return iequals(p.first, name); });
        if (it != added.end())
          s.items.push_back(it->second);
        else
          s.items.push_back(named_item(Expr::column(prev, name), name));
      }
      in_order = true;
    }
    std::string name = last && in_order ? def.name : def.name + "_" + std::to_string(i + 1);
    out.plan.steps.push_back({name, PlanStep::Kind::View, view_ddl(name, s)});
    prev = name;
    cols = std::move(next_cols);
    if (last && !in_order) {
      Select full;
      for (const auto& c : order) full.items.push_back(named_item(Expr::column(prev, c), c));
      full.from.push_back(TableRef::named(prev));
      out.plan.steps.push_back({def.name, PlanStep::Kind::View, view_ddl(def.name, full)});
    }
  }
  e.kernel_objects = out.plan.objects();
  return out;
}

namespace {

std::vector<std::string> view_columns(const Select& s, const Catalog& catalog) {
  std::vector<SourceColumns> sources;
  std::function<void(const TableRef&)> walk = [&](const TableRef& t) {
    switch (t.kind) {
      case TableRef::Kind::Named: {
        auto cols = catalog.columns_of(t.name);
        if (!cols) throw Error(Errc::UnknownRelation, "no relation named " + t.name, {t.name});
        sources.push_back({ref_name(t), *cols});
        return;
      }
      case TableRef::Kind::Derived:
        sources.push_back({t.alias, view_columns(*t.derived, catalog)});
        return;
      case TableRef::Kind::Join:
        walk(*t.left);
        walk(*t.right);
        return;
    }
  };
  for (const auto& t : s.from) walk(t);
  std::vector<std::string> out;
  for (const auto& it : s.items) {
    if (it.kind != SelectItem::Kind::Expr) {
      for (auto& q : expand_star_minus(it, sources)) out.push_back(q.name);
    } else if (!it.alias.empty()) {
      out.push_back(it.alias);
    } else if (it.expr.kind == ExprKind::Column) {
      out.push_back(it.expr.text);
    } else {
      out.push_back(render(it.expr, kKernel));
    }
  }
  return out;
}

}  // namespace

Select expand_select(Select s, const Catalog& catalog) {
  std::vector<SourceColumns> sources;
  std::function<void(const TableRef&)> walk = [&](const TableRef& t) {
    if (t.kind == TableRef::Kind::Named) {
      if (auto cols = catalog.columns_of(t.name)) sources.push_back({ref_name(t), *cols});
    } else if (t.kind == TableRef::Kind::Derived) {
      sources.push_back({t.alias, view_columns(*t.derived, catalog)});
    } else {
      walk(*t.left);
      walk(*t.right);
    }
  };
  for (const auto& t : s.from) walk(t);
  std::vector<SelectItem> items;
  for (auto& it : s.items) {
    if (it.kind != SelectItem::Kind::StarMinus) {
      items.push_back(std::move(it));
      continue;
    }
    for (auto& q : expand_star_minus(it, sources)) {
      SelectItem col;
      col.expr = Expr::column(q.qualifier, q.name);
      items.push_back(std::move(col));
    }
  }
  s.items = std::move(items);
  visit_mut(s, true, [&](Expr& e) {
    if (e.subquery) {
      bool has_minus = std::any_of(e.subquery->items.begin(), e.subquery->items.end(),
                                   [](const SelectItem& i) { return i.kind == SelectItem::Kind::StarMinus; });
      if (has_minus) *e.subquery = expand_select(*e.subquery, catalog);
    }
  });
  return s;
}

Select stage_query(const CanonicalIE& ie, const std::string& prev) {
  std::vector<std::pair<std::string, SelectItem>> added;
  return stage_select(Stage{{&ie}}, prev, added);
}

namespace {

std::vector<std::string> plan_views(const CatalogEntry& e) {
  std::vector<std::string> out;
  if (e.kind == RelationKind::View) return e.kernel_objects;
  if (e.kind == RelationKind::Sir)
    out.assign(e.kernel_objects.begin() + 1, e.kernel_objects.end());
  return out;
}

void drop_views(const CatalogEntry& e, std::vector<std::string>& sql) {
  auto views = plan_views(e);
  for (auto it = views.rbegin(); it != views.rend(); ++it)
    sql.push_back("DROP VIEW " + quote_ident(*it, kKernel));
}

void drop_entry(const CatalogEntry& e, std::vector<std::string>& sql) {
  drop_views(e, sql);
  if (e.kind != RelationKind::View) sql.push_back("DROP TABLE " + quote_ident(e.base_object(), kKernel));
}

void check_kernel_names(const KernelPlan& plan, const Catalog& catalog, const Kernel* kernel,
                        std::string_view owner) {
  if (!kernel) return;
  for (const auto& s : plan.steps) {
    const CatalogEntry* o = catalog.object_owner(s.object);
    if (o && iequals(o->name, owner)) continue;
    if (const_cast<Kernel*>(kernel)->exists(s.object))
      throw Error(Errc::NameCollision, "kernel object " + s.object + " already exists", {s.object});
  }
}

CompiledRelation recompile(const CatalogEntry& e, const Catalog& catalog, const CompileOptions& options,
                           const Kernel* kernel) {
  if (e.kind == RelationKind::View) return compile_view(std::get<CreateView>(e.definition), catalog);
  return compile_relation(e.table(), catalog, options, kernel);
}

}  // namespace

CompiledRelation compile_view(const CreateView& def, const Catalog& catalog) {
  CompiledRelation out;
  CatalogEntry& e = out.entry;
  e.name = def.name;
  e.kind = RelationKind::View;
  e.definition = def;
  for (const auto& t : referenced_tables(def.select)) {
    if (!catalog.find(t) && !catalog.base_owner(t))
      throw Error(Errc::UnknownRelation, "no relation named " + t, {t});
    push_unique(e.deps, t);
  }
  CreateView kernel_view = def;
  kernel_view.select = expand_select(def.select, catalog);
  auto cols = def.columns.empty() ? view_columns(kernel_view.select, catalog) : def.columns;
  for (const auto& c : cols) e.attrs.push_back({c, {}, false, false, {}});
  out.plan.final_name = def.name;
  out.plan.steps.push_back({def.name, PlanStep::Kind::View, render(StatementNode{kernel_view}, kKernel)});
  e.kernel_objects = out.plan.objects();
  return out;
}

Change compile_create(const CreateTable& stmt, const Catalog& catalog, const CompileOptions& options,
                      const Kernel* kernel) {
  CreateTable def = stmt;
  if (options.rewrite_to_base && is_sir(def)) {
    for (auto& el : def.elements)
      if (auto* ie = std::get_if<IeDecl>(&el)) *ie = rewrite_to_base(*ie, def, catalog);
  }
  if (catalog.find(def.name) || catalog.object_owner(def.name))
    throw Error(Errc::DuplicateName, "relation " + def.name + " already exists", {def.name});
  CompiledRelation c = compile_relation(def, catalog, options, kernel);
  check_kernel_names(c.plan, catalog, kernel, def.name);
  c.entry.created_at = catalog.next_sequence();
  Change ch;
  ch.target = def.name;
  ch.after = catalog;
  ch.after.register_entry(c.entry);
  for (const auto& s : c.plan.steps) ch.sql.push_back(s.ddl);
  ch.objects = c.plan.objects();
  ch.written.push_back(def.name);
  return ch;
}

Change compile_create_view(const CreateView& stmt, const Catalog& catalog) {
  CompiledRelation c = compile_view(stmt, catalog);
  c.entry.created_at = catalog.next_sequence();
  Change ch;
  ch.target = stmt.name;
  ch.after = catalog;
  ch.after.register_entry(c.entry);
  for (const auto& s : c.plan.steps) ch.sql.push_back(s.ddl);
  ch.objects = c.plan.objects();
  ch.written.push_back(stmt.name);
  return ch;
}

namespace {

std::string element_name(const TableElement& el) {
  if (const auto* a = std::get_if<AttributeDecl>(&el)) return a->name;
  if (const auto* ie = std::get_if<IeDecl>(&el)) return ie->name;
  return {};
}

std::optional<std::size_t> find_element(const CreateTable& def, std::string_view name, const Catalog& catalog,
                                        bool attrs_of_ies = true) {
  for (std::size_t i = 0; i < def.elements.size(); ++i)
    if (iequals(element_name(def.elements[i]), name)) return i;
  if (attrs_of_ies) {
    for (std::size_t i = 0; i < def.elements.size(); ++i)
      if (const auto* ie = std::get_if<IeDecl>(&def.elements[i]))
        if (contains_ci(produced_names(*ie, def.name, catalog), name)) return i;
  }
  return std::nullopt;
}

std::vector<std::string> join_attributes(const CreateTable& def, const Catalog& catalog) {
  std::vector<std::string> out;
  for (const auto& el : def.elements)
    if (const auto* ie = std::get_if<IeDecl>(&el)) {
      auto c = canonicalize(*ie, def, catalog);
      for (const auto& j : c.join_attrs) push_unique(out, j);
    }
  return out;
}

void forbid_join_attribute(const CreateTable& def, std::string_view name, const Catalog& catalog) {
  auto joins = join_attributes(def, catalog);
  if (contains_ci(joins, name))
    throw Error(Errc::RecursiveJoinAttributeDrop,
                std::string(name) + " serves a recursive join of " + def.name, {std::string(name)});
}

/// Replaces the base table of `old` by that of `next` when its name or
/// definition changed, keeping the rows of the common columns.
bool rebuild_base(const CatalogEntry& old, const CompiledRelation& next, const Catalog& catalog,
                  const Kernel* kernel, std::vector<std::string>& sql) {
  const std::string& old_base = old.base_object();
  const PlanStep& new_base = next.plan.steps.front();
  std::string old_ddl = base_ddl(old.table(), new_base.object, catalog);
  if (iequals(old_base, new_base.object) && old_ddl == new_base.ddl) return false;
  std::vector<std::string> common;
  for (const auto& c : next.entry.stored_columns())
    if (contains_ci(old.stored_columns(), c)) common.push_back(quote_ident(c, kKernel));
  std::string list;
  for (const auto& c : common) list += (list.empty() ? "" : ", ") + c;
  std::vector<std::string> indexes;
  if (kernel) {
    auto stored = next.entry.stored_columns();
    for (const auto& ddl : kernel->index_definitions(old_base)) {
      auto k = std::get<CreateIndex>(parse_statement(ddl).node);
      if (!std::all_of(k.columns.begin(), k.columns.end(), [&](const std::string& c) { return contains_ci(stored, c); }))
        continue;
      k.table = new_base.object;
      indexes.push_back(render(StatementNode{k}, kKernel));
    }
  }
  const std::string tmp = "sirsql_rebuild";
  if (!common.empty())
    sql.push_back("CREATE TEMP TABLE " + tmp + " AS SELECT " + list + " FROM " + quote_ident(old_base, kKernel));
  sql.push_back("DROP TABLE " + quote_ident(old_base, kKernel));
  sql.push_back(new_base.ddl);
  if (!common.empty()) {
    sql.push_back("INSERT INTO " + quote_ident(new_base.object, kKernel) + " (" + list + ") SELECT " + list +
                  " FROM " + tmp);
    sql.push_back("DROP TABLE " + tmp);
  }
  sql.insert(sql.end(), indexes.begin(), indexes.end());
  return true;
}

}  // namespace

Change compile_alter(const AlterTable& stmt, const Catalog& catalog, const CompileOptions& options,
                     const Kernel* kernel) {
  const CatalogEntry& old = catalog.get(stmt.name);
  if (old.kind == RelationKind::View)
    throw Error(Errc::Unsupported, stmt.name + " is a view; use Drop View and Create Table", {stmt.name});
  CreateTable def = old.table();
  auto maybe_rewrite = [&](IeDecl ie) {
    return options.rewrite_to_base ? rewrite_to_base(ie, def, catalog) : ie;
  };

  for (const auto& act : stmt.actions) {
    switch (act.kind) {
      case AlterAction::Kind::Add: {
        std::size_t at = def.elements.size();
        if (act.position != Position::Append) {
          auto idx = find_element(def, act.anchor, catalog);
          if (!idx) throw Error(Errc::UnknownColumn, "no attribute " + act.anchor + " in " + def.name, {act.anchor});
          at = act.position == Position::Before ? *idx : *idx + 1;
        }
        for (const auto& el : act.elements) {
          TableElement added = el;
          def.elements.insert(def.elements.begin() + static_cast<std::ptrdiff_t>(at++), added);
          if (auto* ie = std::get_if<IeDecl>(&def.elements[at - 1])) *ie = maybe_rewrite(*ie);
        }
        break;
      }
      case AlterAction::Kind::Alter: {
        auto idx = find_element(def, act.target, catalog);
        if (!idx) throw Error(Errc::UnknownIE, "no IE or attribute " + act.target + " in " + def.name, {act.target});
        if (std::holds_alternative<AttributeDecl>(def.elements[*idx])) forbid_join_attribute(def, act.target, catalog);
        if (std::holds_alternative<TableConstraint>(def.elements[*idx]))
          throw Error(Errc::UnknownIE, "no IE or attribute " + act.target + " in " + def.name, {act.target});
        def.elements[*idx] = act.replacement;
        def.elements[*idx] = maybe_rewrite(std::get<IeDecl>(def.elements[*idx]));
        break;
      }
      case AlterAction::Kind::Drop: {
        auto idx = find_element(def, act.target, catalog, false);
        if (!idx) {
          bool ie_attr = find_element(def, act.target, catalog).has_value();
          throw Error(ie_attr ? Errc::Unsupported : Errc::UnknownColumn,
                      ie_attr ? act.target + " is produced by a multi-attribute IE; drop or alter the IE"
                              : "no attribute or IE " + act.target + " in " + def.name,
                      {act.target});
        }
        if (std::holds_alternative<AttributeDecl>(def.elements[*idx])) forbid_join_attribute(def, act.target, catalog);
        def.elements.erase(def.elements.begin() + static_cast<std::ptrdiff_t>(*idx));
        std::erase_if(def.elements, [&](const TableElement& el) {
          const auto* c = std::get_if<TableConstraint>(&el);
          return c && c->kind != TableConstraint::Kind::ForeignKey && c->columns.size() == 1 &&
                 iequals(c->columns[0], act.target);
        });
        break;
      }
    }
  }

  Catalog next = catalog;
  CompiledRelation self = compile_relation(def, catalog, options, kernel);
  self.entry.created_at = old.created_at;
  check_kernel_names(self.plan, catalog, kernel, def.name);
  next.put(self.entry);
  for (const auto& d : self.entry.deps)
    if (!iequals(d, def.name) && !next.find(d) && !next.base_owner(d))
      throw Error(Errc::UnknownRelation, "no relation named " + d, {d});

  auto dependents = catalog.transitive_dependents(stmt.name);
  std::vector<CompiledRelation> recompiled;
  for (const auto& name : dependents) {
    const CatalogEntry& d = catalog.get(name);
    CompiledRelation c = recompile(d, next, options, kernel);
    c.entry.created_at = d.created_at;
    next.put(c.entry);
    recompiled.push_back(std::move(c));
  }
  if (auto cycle = next.find_cycle(stmt.name)) {
    std::string path;
    for (const auto& n : *cycle) path += n + " -> ";
    throw Error(Errc::CircularReference, "circular reference " + path + cycle->front(), *cycle);
  }

  Change ch;
  ch.target = stmt.name;
  for (auto it = dependents.rbegin(); it != dependents.rend(); ++it) drop_views(catalog.get(*it), ch.sql);
  drop_views(old, ch.sql);

  bool rebuilt = rebuild_base(old, self, catalog, kernel, ch.sql);
  for (const auto& c : recompiled)
    if (c.entry.kind != RelationKind::View) rebuilt = rebuild_base(catalog.get(c.entry.name), c, catalog, kernel, ch.sql) || rebuilt;
  if (rebuilt) ch.sql.insert(ch.sql.begin(), "PRAGMA defer_foreign_keys = ON");
  for (std::size_t i = 1; i < self.plan.steps.size(); ++i) ch.sql.push_back(self.plan.steps[i].ddl);
  for (const auto& c : recompiled) {
    std::size_t from = c.entry.kind == RelationKind::View ? 0 : 1;
    for (std::size_t i = from; i < c.plan.steps.size(); ++i) ch.sql.push_back(c.plan.steps[i].ddl);
  }
  ch.objects = self.plan.objects();
  ch.written.push_back(stmt.name);
  ch.written.insert(ch.written.end(), dependents.begin(), dependents.end());
  ch.after = std::move(next);
  return ch;
}

Change compile_drop(std::string_view name, bool is_view, DropMode mode, const Catalog& catalog) {
  const CatalogEntry& e = catalog.get(name);
  if (is_view != (e.kind == RelationKind::View))
    throw Error(Errc::Unsupported,
                std::string(name) + (is_view ? " is not a view; use Drop Table" : " is a view; use Drop View"),
                {std::string(name)});
  std::vector<std::string> direct = catalog.dependents_of(e.name);
  if (e.kind == RelationKind::Sir)
    for (const auto& d : catalog.dependents_of(e.base_object())) push_unique(direct, d);
  std::erase_if(direct, [&](const std::string& d) { return iequals(d, e.name); });
  if (mode == DropMode::Restrict && !direct.empty()) {
    std::string list;
    for (const auto& d : direct) list += (list.empty() ? "" : ", ") + d;
    throw Error(Errc::DependentsExist, std::string(name) + " is read by " + list, direct);
  }
  Change ch;
  ch.target = e.name;
  ch.after = catalog;
  auto dependents = catalog.transitive_dependents(e.name);
  for (auto it = dependents.rbegin(); it != dependents.rend(); ++it) {
    drop_entry(catalog.get(*it), ch.sql);
    ch.after.erase(*it);
    ch.removed.push_back(*it);
  }
  drop_entry(e, ch.sql);
  ch.after.erase(e.name);
  ch.removed.push_back(e.name);
  return ch;
}

Change compile_index(const CreateIndex& stmt, const Catalog& catalog) {
  const CatalogEntry& e = catalog.get(stmt.table);
  if (e.kind == RelationKind::View)
    throw Error(Errc::Unsupported, "cannot index view " + stmt.table, {stmt.table});
  for (const auto& c : stmt.columns) {
    const AttrMeta* a = e.attr(c);
    if (!a) throw Error(Errc::UnknownColumn, "no column " + stmt.table + "." + c, {c});
    if (a->is_inherited)
      throw Error(Errc::IndexOnInheritedAttribute, c + " is inherited; indexes apply to the base only", {c});
  }
  CreateIndex k = stmt;
  k.table = e.base_object();
  Change ch;
  ch.target = e.name;
  ch.after = catalog;
  ch.sql.push_back(render(StatementNode{k}, kKernel));
  ch.objects.push_back(stmt.name);
  return ch;
}

}  // namespace sirsql
