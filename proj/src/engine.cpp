#include "sirsql/engine.hpp"

#include "sirsql/ident.hpp"
#include "sirsql/render.hpp"

namespace sirsql {

using namespace ast;

Engine::Engine(Kernel& kernel, EngineOptions options) : kernel_(kernel), options_(options) {
  if (Catalog::has_meta_tables(kernel_)) catalog_ = Catalog::load(kernel_);
}

Outcome Engine::apply(Change change) {
  kernel_.within_transaction([&] {
    Catalog::ensure_meta_tables(kernel_);
    for (const auto& sql : change.sql) kernel_.execute(sql);
    for (const auto& r : change.removed) Catalog::unpersist(kernel_, r);
    for (const auto& w : change.written) change.after.persist(kernel_, change.after.get(w));
  });
  catalog_ = std::move(change.after);
  Outcome out;
  out.target = change.target;
  out.objects = std::move(change.objects);
  out.removed = std::move(change.removed);
  return out;
}

Outcome Engine::write(const StatementNode& node) {
  Routed r = route(node, catalog_);
  Outcome out;
  out.kind = Outcome::Kind::Write;
  out.target = r.target;
  const CatalogEntry* sir = catalog_.find(r.target);
  bool strict = options_.strict_integrity && std::holds_alternative<Insert>(node) && sir &&
                sir->kind == RelationKind::Sir;
  kernel_.within_transaction([&] {
    std::int64_t last = 0;
    if (strict) {
      RowSet m = kernel_.query("SELECT COALESCE(MAX(" + kernel_.row_id() + "), 0) FROM " +
                               quote_ident(sir->base_object(), {}));
      last = m.rows.at(0).at(0).integer;
    }
    out.changed = kernel_.execute(r.sql);
    if (strict) enforce_insert_computability(*sir, catalog_, kernel_, last);
  });
  return out;
}

Outcome Engine::execute(const Statement& stmt) {
  const StatementNode& node = stmt.node;
  if (const auto* s = std::get_if<CreateTable>(&node)) return apply(compile_create(*s, catalog_, options_.compile, &kernel_));
  if (const auto* s = std::get_if<CreateView>(&node)) {
    if (catalog_.find(s->name) || kernel_.exists(s->name))
      throw Error(Errc::DuplicateName, "relation " + s->name + " already exists", {s->name});
    return apply(compile_create_view(*s, catalog_));
  }
  if (const auto* s = std::get_if<AlterTable>(&node)) return apply(compile_alter(*s, catalog_, options_.compile, &kernel_));
  if (const auto* s = std::get_if<DropTable>(&node)) return apply(compile_drop(s->name, false, s->mode, catalog_));
  if (const auto* s = std::get_if<DropView>(&node)) return apply(compile_drop(s->name, true, s->mode, catalog_));
  if (const auto* s = std::get_if<CreateIndex>(&node)) {
    if (kernel_.exists(s->name))
      throw Error(Errc::NameCollision, "kernel object " + s->name + " already exists", {s->name});
    return apply(compile_index(*s, catalog_));
  }
  if (const auto* s = std::get_if<Select>(&node)) {
    for (const auto& t : referenced_tables(*s))
      if (!catalog_.find(t) && !catalog_.base_owner(t) && !kernel_.exists(t))
        throw Error(Errc::UnknownRelation, "no relation named " + t, {t});
    Outcome out;
    out.kind = Outcome::Kind::Query;
    out.rows = kernel_.query(route(node, catalog_).sql);
    return out;
  }
  return write(node);
}

std::vector<Outcome> Engine::execute_script(std::string_view source, std::vector<Diagnostic>* warnings) {
  ParseResult parsed = parse_script(source);
  if (warnings) *warnings = parsed.warnings;
  std::vector<Outcome> out;
  for (const auto& s : parsed.statements) out.push_back(execute(s));
  return out;
}

RowSet Engine::query(std::string_view sql) {
  Outcome o = execute(parse_statement(sql));
  if (o.kind != Outcome::Kind::Query) throw Error(Errc::Unsupported, "not a query: " + std::string(sql));
  return o.rows;
}

std::vector<std::string> Engine::explain(std::string_view relation) {
  const CatalogEntry& e = catalog_.get(relation);
  std::vector<std::string> out;
  for (const auto& obj : e.kernel_objects) {
    auto ddl = kernel_.object_definition(obj);
    if (!ddl) throw Error(Errc::CorruptCatalog, "kernel object " + obj + " of " + e.name + " is missing", {obj});
    out.push_back(*ddl);
  }
  return out;
}

std::vector<IeViolation> Engine::check(std::string_view relation) {
  return check_ie_integrity(catalog_.get(relation), catalog_, kernel_);
}

}  // namespace sirsql
