#include "sirsql/catalog.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <json.hpp>

#include "sirsql/ident.hpp"
#include "sirsql/parser.hpp"
#include "sirsql/render.hpp"

namespace sirsql {

std::string_view relation_kind_name(RelationKind k) noexcept {
  switch (k) {
    case RelationKind::Stored: return "stored";
    case RelationKind::View: return "view";
    case RelationKind::Sir: return "sir";
  }
  return "?";
}

namespace {

std::optional<RelationKind> parse_kind(std::string_view s) {
  if (s == "stored") return RelationKind::Stored;
  if (s == "view") return RelationKind::View;
  if (s == "sir") return RelationKind::Sir;
  return std::nullopt;
}

std::string lit(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  return out + "'";
}

bool is_stage_name(std::string_view name, std::string_view owner) {
  if (name.size() < owner.size() + 2) return false;
  if (!iequals(name.substr(0, owner.size()), owner) || name[owner.size()] != '_') return false;
  auto digits = name.substr(owner.size() + 1);
  return std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; });
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(Errc::CorruptCatalog, why); }

}  // namespace

std::vector<std::string> CatalogEntry::columns() const {
  std::vector<std::string> out;
  for (const auto& a : attrs) out.push_back(a.name);
  return out;
}

std::vector<std::string> CatalogEntry::stored_columns() const {
  std::vector<std::string> out;
  for (const auto& a : attrs)
    if (!a.is_inherited) out.push_back(a.name);
  return out;
}

std::vector<std::string> CatalogEntry::key_columns() const {
  std::vector<std::string> out;
  for (const auto& a : attrs)
    if (a.is_key) out.push_back(a.name);
  return out;
}

const AttrMeta* CatalogEntry::attr(std::string_view column) const {
  for (const auto& a : attrs)
    if (iequals(a.name, column)) return &a;
  return nullptr;
}

const CatalogEntry* Catalog::find(std::string_view name) const {
  for (const auto& e : entries_)
    if (iequals(e.name, name)) return &e;
  return nullptr;
}

const CatalogEntry& Catalog::get(std::string_view name) const {
  if (const auto* e = find(name)) return *e;
  throw Error(Errc::UnknownRelation, "no relation named " + std::string(name), {std::string(name)});
}

const CatalogEntry* Catalog::base_owner(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.kind == RelationKind::Sir && !e.kernel_objects.empty() && iequals(e.base_object(), name))
      return &e;
  return nullptr;
}

const CatalogEntry* Catalog::object_owner(std::string_view name) const {
  for (const auto& e : entries_)
    if (contains_ci(e.kernel_objects, name)) return &e;
  return nullptr;
}

std::optional<std::vector<std::string>> Catalog::columns_of(std::string_view name) const {
  if (const auto* e = find(name)) return e->columns();
  if (const auto* e = base_owner(name)) return e->stored_columns();
  return std::nullopt;
}

void Catalog::put(CatalogEntry entry) {
  for (auto& e : entries_) {
    if (iequals(e.name, entry.name)) {
      e = std::move(entry);
      return;
    }
  }
  entries_.push_back(std::move(entry));
}

void Catalog::erase(std::string_view name) {
  std::erase_if(entries_, [&](const CatalogEntry& e) { return iequals(e.name, name); });
}

void Catalog::register_entry(CatalogEntry entry) {
  const std::string& name = entry.name;
  if (name.size() >= 4 && iequals(name.substr(0, 4), "sir_"))
    throw Error(Errc::NameCollision, "names starting with sir_ are reserved: " + name, {name});
  if (ends_with_ci(name, "_B"))
    throw Error(Errc::NameCollision, "names ending in _B are reserved for bases: " + name, {name});
  for (const auto& e : entries_) {
    if (e.kind == RelationKind::Sir && is_stage_name(name, e.name))
      throw Error(Errc::NameCollision, name + " is reserved for a view stage of " + e.name, {name});
    if (entry.kind == RelationKind::Sir && contains_ci(e.kernel_objects, name + "_B"))
      throw Error(Errc::NameCollision, name + "_B already exists", {name + "_B"});
  }
  if (find(name) || object_owner(name))
    throw Error(Errc::DuplicateName, "relation " + name + " already exists", {name});
  for (const auto& d : entry.deps) {
    if (iequals(d, name)) continue;
    if (!find(d) && !base_owner(d))
      throw Error(Errc::UnknownRelation, "no relation named " + d, {d});
  }
  if (entry.kind == RelationKind::Sir) {
    if (entry.stored_columns().empty())
      throw Error(Errc::InvariantViolation, name + " has no stored attribute", {"B non-empty"});
  }
  Catalog next = *this;
  next.put(entry);
  if (auto cycle = next.find_cycle(name)) {
    std::string path;
    for (const auto& n : *cycle) path += n + " -> ";
    path += cycle->front();
    throw Error(Errc::CircularReference, "circular reference " + path, *cycle);
  }
  *this = std::move(next);
}

std::vector<std::string> Catalog::dependents_of(std::string_view name) const {
  if (!find(name) && !base_owner(name)) get(name);
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (iequals(e.name, name)) continue;
    if (contains_ci(e.deps, name)) out.push_back(e.name);
  }
  return out;
}

std::vector<std::string> Catalog::transitive_dependents(std::string_view name) const {
  const CatalogEntry& root = get(name);
  auto reads = [&](const CatalogEntry& e, const CatalogEntry& target) {
    if (iequals(e.name, target.name)) return false;
    for (const auto& d : e.deps) {
      if (iequals(d, target.name)) return true;
      if (target.kind == RelationKind::Sir && iequals(d, target.base_object())) return true;
    }
    return false;
  };
  std::vector<const CatalogEntry*> found;
  std::vector<const CatalogEntry*> frontier{&root};
  while (!frontier.empty()) {
    const CatalogEntry* t = frontier.back();
    frontier.pop_back();
    for (const auto& e : entries_) {
      if (&e == &root || std::find(found.begin(), found.end(), &e) != found.end()) continue;
      if (reads(e, *t)) {
        found.push_back(&e);
        frontier.push_back(&e);
      }
    }
  }
  // Kahn over the found set, registration order breaking ties.
  std::vector<const CatalogEntry*> pending;
  for (const auto& e : entries_)
    if (std::find(found.begin(), found.end(), &e) != found.end()) pending.push_back(&e);
  std::vector<std::string> out;
  while (!pending.empty()) {
    auto it = std::find_if(pending.begin(), pending.end(), [&](const CatalogEntry* e) {
      return std::none_of(pending.begin(), pending.end(),
                          [&](const CatalogEntry* other) { return other != e && reads(*e, *other); });
    });
    if (it == pending.end()) it = pending.begin();
    out.push_back((*it)->name);
    pending.erase(it);
  }
  return out;
}

std::optional<std::vector<std::string>> Catalog::find_cycle(std::string_view start) const {
  std::map<std::string, int, ILess> color;
  std::vector<std::string> path;
  std::optional<std::vector<std::string>> cycle;

  std::function<void(const CatalogEntry&)> dfs = [&](const CatalogEntry& e) {
    color[e.name] = 1;
    path.push_back(e.name);
    for (const auto& d : e.deps) {
      if (cycle) return;
      if (iequals(d, e.name)) continue;
      const CatalogEntry* next = find(d);
      if (!next) continue;  // bases and unknown names are leaves
      int c = color[next->name];
      if (c == 1) {
        auto it = std::find_if(path.begin(), path.end(),
                               [&](const std::string& n) { return iequals(n, next->name); });
        cycle = std::vector<std::string>(it, path.end());
        return;
      }
      if (c == 0) dfs(*next);
    }
    if (cycle) return;
    path.pop_back();
    color[e.name] = 2;
  };

  if (!start.empty())
    if (const auto* s = find(start)) dfs(*s);
  for (const auto& e : entries_) {
    if (cycle) break;
    if (color[e.name] == 0) dfs(e);
  }
  return cycle;
}

std::int64_t Catalog::next_sequence() const {
  std::int64_t m = 0;
  for (const auto& e : entries_) m = std::max(m, e.created_at);
  return m + 1;
}

void Catalog::ensure_meta_tables(Kernel& kernel) {
  kernel.execute(
      "CREATE TABLE IF NOT EXISTS sir_relations (name TEXT PRIMARY KEY, kind TEXT NOT NULL, "
      "created_at INTEGER NOT NULL, kernel_objects TEXT NOT NULL, source_text TEXT NOT NULL);"
      "CREATE TABLE IF NOT EXISTS sir_attrs (rel TEXT NOT NULL, ordinal INTEGER NOT NULL, "
      "name TEXT NOT NULL, sql_type TEXT, is_key INTEGER NOT NULL, is_inherited INTEGER NOT NULL, "
      "ie_name TEXT, PRIMARY KEY (rel, ordinal));"
      "CREATE TABLE IF NOT EXISTS sir_ies (rel TEXT NOT NULL, ordinal INTEGER NOT NULL, "
      "name TEXT NOT NULL, source_text TEXT NOT NULL, canonical_text TEXT NOT NULL, "
      "PRIMARY KEY (rel, ordinal));"
      "CREATE TABLE IF NOT EXISTS sir_deps (src TEXT NOT NULL, dst TEXT NOT NULL, "
      "PRIMARY KEY (src, dst));");
}

bool Catalog::has_meta_tables(Kernel& kernel) {
  return kernel.exists("sir_relations") && kernel.exists("sir_attrs") &&
         kernel.exists("sir_ies") && kernel.exists("sir_deps");
}

void Catalog::unpersist(Kernel& kernel, std::string_view name) {
  std::string n = lit(name);
  kernel.execute("DELETE FROM sir_relations WHERE name = " + n + ";DELETE FROM sir_attrs WHERE rel = " +
                 n + ";DELETE FROM sir_ies WHERE rel = " + n + ";DELETE FROM sir_deps WHERE src = " + n);
}

void Catalog::persist(Kernel& kernel, const CatalogEntry& e) const {
  unpersist(kernel, e.name);
  std::string n = lit(e.name);
  std::string sql = "INSERT INTO sir_relations VALUES (" + n + ", " +
                    lit(relation_kind_name(e.kind)) + ", " + std::to_string(e.created_at) + ", " +
                    lit(nlohmann::json(e.kernel_objects).dump()) + ", " +
                    lit(render_sir(e.definition)) +
                    ");";
  for (std::size_t i = 0; i < e.attrs.size(); ++i) {
    const auto& a = e.attrs[i];
    sql += "INSERT INTO sir_attrs VALUES (" + n + ", " + std::to_string(i) + ", " + lit(a.name) + ", " +
           lit(a.sql_type) + ", " + (a.is_key ? "1" : "0") + ", " + (a.is_inherited ? "1" : "0") +
           ", " + (a.ie_name.empty() ? "NULL" : lit(a.ie_name)) + ");";
  }
  for (std::size_t i = 0; i < e.ies.size(); ++i) {
    const auto& ie = e.ies[i];
    sql += "INSERT INTO sir_ies VALUES (" + n + ", " + std::to_string(i) + ", " + lit(ie.name) + ", " +
           lit(ie.source_text) + ", " + lit(ie.canonical_text) + ");";
  }
  std::set<std::string, ILess> seen;
  for (const auto& d : e.deps)
    if (seen.insert(d).second)
      sql += "INSERT INTO sir_deps VALUES (" + n + ", " + lit(d) + ");";
  kernel.execute(sql);
}

Catalog Catalog::load(Kernel& kernel) {
  Catalog cat;
  if (!has_meta_tables(kernel)) {
    if (kernel.exists("sir_relations") || kernel.exists("sir_attrs") || kernel.exists("sir_ies") ||
        kernel.exists("sir_deps"))
      corrupt("meta-tables are incomplete");
    return cat;
  }
  RowSet rels = kernel.query(
      "SELECT name, kind, created_at, kernel_objects, source_text FROM sir_relations "
      "ORDER BY created_at, name");
  for (const auto& row : rels.rows) {
    CatalogEntry e;
    e.name = row[0].to_string();
    auto kind = parse_kind(row[1].to_string());
    if (!kind) corrupt("relation " + e.name + " has unknown kind " + row[1].to_string());
    e.kind = *kind;
    if (row[2].type != Value::Type::Integer) corrupt("relation " + e.name + " has no sequence");
    e.created_at = row[2].integer;
    try {
      auto objs = nlohmann::json::parse(row[3].to_string());
      e.kernel_objects = objs.get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
      corrupt("relation " + e.name + " has an unreadable object list");
    }
    try {
      e.definition = parse_statement(row[4].to_string()).node;
    } catch (const Error& err) {
      corrupt("relation " + e.name + " has unparsable source: " + err.what());
    }
    bool is_table = std::holds_alternative<ast::CreateTable>(e.definition);
    bool is_view = std::holds_alternative<ast::CreateView>(e.definition);
    if ((e.kind == RelationKind::View) != is_view || (e.kind != RelationKind::View && !is_table))
      corrupt("relation " + e.name + " source does not match its kind");
    if (is_table && (ast::is_sir(e.table()) != (e.kind == RelationKind::Sir)))
      corrupt("relation " + e.name + " source does not match its kind");

    RowSet attrs = kernel.query(
        "SELECT name, sql_type, is_key, is_inherited, ie_name FROM sir_attrs WHERE rel = " +
        lit(e.name) + " ORDER BY ordinal");
    for (const auto& a : attrs.rows) {
      AttrMeta m;
      m.name = a[0].to_string();
      m.sql_type = a[1].is_null() ? "" : a[1].to_string();
      m.is_key = a[2].integer != 0;
      m.is_inherited = a[3].integer != 0;
      m.ie_name = a[4].is_null() ? "" : a[4].to_string();
      e.attrs.push_back(std::move(m));
    }
    RowSet ies = kernel.query("SELECT name, source_text, canonical_text FROM sir_ies WHERE rel = " +
                              lit(e.name) + " ORDER BY ordinal");
    for (const auto& r : ies.rows)
      e.ies.push_back({r[0].to_string(), r[1].to_string(), r[2].to_string()});
    RowSet deps = kernel.query("SELECT dst FROM sir_deps WHERE src = " + lit(e.name) + " ORDER BY rowid");
    for (const auto& r : deps.rows) e.deps.push_back(r[0].to_string());

    if (e.kernel_objects.empty()) corrupt("relation " + e.name + " has no kernel objects");
    for (const auto& obj : e.kernel_objects)
      if (!kernel.exists(obj)) corrupt("kernel object " + obj + " of " + e.name + " is missing");
    if (e.attrs.empty()) corrupt("relation " + e.name + " has no attributes");

    if (is_table) {
      std::vector<std::string> declared_sas, declared_ies;
      for (const auto& el : e.table().elements) {
        if (const auto* a = std::get_if<ast::AttributeDecl>(&el)) declared_sas.push_back(a->name);
        if (const auto* ie = std::get_if<ast::IeDecl>(&el)) declared_ies.push_back(ie->name);
      }
      auto sas = e.stored_columns();
      if (sas.size() != declared_sas.size() ||
          !std::equal(sas.begin(), sas.end(), declared_sas.begin(), [](auto& a, auto& b) { return iequals(a, b); }))
        corrupt("stored attributes of " + e.name + " disagree with its source");
      if (e.ies.size() != declared_ies.size())
        corrupt("inheritance expressions of " + e.name + " disagree with its source");
      for (std::size_t i = 0; i < e.ies.size(); ++i)
        if (!iequals(e.ies[i].name, declared_ies[i]))
          corrupt("inheritance expressions of " + e.name + " disagree with its source");
      for (const auto& a : e.attrs)
        if (a.is_inherited && !contains_ci(declared_ies, a.ie_name))
          corrupt("attribute " + a.name + " of " + e.name + " names an unknown IE");
    }
    if (cat.find(e.name)) corrupt("relation " + e.name + " is registered twice");
    cat.entries_.push_back(std::move(e));
  }
  for (const auto& e : cat.entries_) {
    for (const auto& d : e.deps)
      if (!iequals(d, e.name) && !cat.find(d) && !cat.base_owner(d))
        corrupt("relation " + e.name + " depends on unknown " + d);
  }
  if (auto cycle = cat.find_cycle()) corrupt("dependency graph has a cycle through " + cycle->front());
  return cat;
}

}  // namespace sirsql
