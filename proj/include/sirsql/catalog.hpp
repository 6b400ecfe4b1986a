#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sirsql/ast.hpp"
#include "sirsql/kernel.hpp"

namespace sirsql {

enum class RelationKind { Stored, View, Sir };

std::string_view relation_kind_name(RelationKind k) noexcept;

struct AttrMeta {
  std::string name;
  std::string sql_type;
  bool is_key = false;
  bool is_inherited = false;
  std::string ie_name;  // producing IE, inherited attributes only
  bool operator==(const AttrMeta&) const = default;
};

struct IeMeta {
  std::string name;
  std::string source_text;     // as declared, extended dialect
  std::string canonical_text;  // canonical form, extended dialect
  bool operator==(const IeMeta&) const = default;
};

struct CatalogEntry {
  std::string name;
  RelationKind kind = RelationKind::Stored;
  std::int64_t created_at = 0;
  ast::StatementNode definition;        // CreateTable, or CreateView for views
  std::vector<AttrMeta> attrs;          // declared left-to-right order
  std::vector<IeMeta> ies;              // declaration order
  std::vector<std::string> kernel_objects;  // plan order: base table first
  std::vector<std::string> deps;        // relations (or bases) the definition reads

  std::vector<std::string> columns() const;
  std::vector<std::string> stored_columns() const;
  std::vector<std::string> key_columns() const;
  const AttrMeta* attr(std::string_view column) const;
  const std::string& base_object() const { return kernel_objects.front(); }
  const ast::CreateTable& table() const { return std::get<ast::CreateTable>(definition); }

  bool operator==(const CatalogEntry&) const = default;
};

/// SIR-layer metadata: registered relations and the inheritance dependency
/// graph. Value type; mutations are staged on copies and swapped in after
/// the kernel commits.
class Catalog {
 public:
  const CatalogEntry* find(std::string_view name) const;
  /// Throws UnknownRelation.
  const CatalogEntry& get(std::string_view name) const;
  const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// The Sir whose base table is `name` (X for X_B), if any.
  const CatalogEntry* base_owner(std::string_view name) const;
  /// The entry owning kernel object `name`, if any.
  const CatalogEntry* object_owner(std::string_view name) const;
  /// Columns readable under `name`: a relation, or the base X_B of a Sir X.
  std::optional<std::vector<std::string>> columns_of(std::string_view name) const;

  /// Validates the scheme-level rules and the acyclicity of the result,
  /// then inserts or replaces the entry. Registration order is kept for
  /// replaced entries.
  void register_entry(CatalogEntry entry);
  /// Inserts or replaces without validation.
  void put(CatalogEntry entry);
  void erase(std::string_view name);

  /// Relations whose definitions read `name` directly, in registration order.
  std::vector<std::string> dependents_of(std::string_view name) const;
  /// All relations reaching `name` (or its base), each listed after every
  /// relation it reads.
  std::vector<std::string> transitive_dependents(std::string_view name) const;
  /// A dependency cycle through the graph, if any, as a relation path.
  std::optional<std::vector<std::string>> find_cycle(std::string_view start = {}) const;

  std::int64_t next_sequence() const;

  /// Meta-table persistence.
  static void ensure_meta_tables(Kernel& kernel);
  static bool has_meta_tables(Kernel& kernel);
  void persist(Kernel& kernel, const CatalogEntry& entry) const;
  static void unpersist(Kernel& kernel, std::string_view name);
  /// Rebuilds the catalog from the meta-tables. Throws CorruptCatalog.
  static Catalog load(Kernel& kernel);

  bool operator==(const Catalog&) const = default;

 private:
  std::vector<CatalogEntry> entries_;
};

}  // namespace sirsql
