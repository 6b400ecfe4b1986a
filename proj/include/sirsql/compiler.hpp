#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sirsql/ast.hpp"
#include "sirsql/catalog.hpp"
#include "sirsql/kernel.hpp"

namespace sirsql {

struct CompileOptions {
  bool skip_redundant_full_view = false;
  bool collapse_value_ies = false;
  bool rewrite_to_base = false;
  bool operator==(const CompileOptions&) const = default;
};

enum class IeKind { JoinForm, SubqueryForm, ValueForm };

std::string_view ie_kind_name(IeKind k) noexcept;

/// Qualifier standing for the enclosing relation until a view stage is
/// chosen for it.
inline constexpr std::string_view kSelf = "\x01self";

struct LeftJoin {
  ast::TableRef source;
  ast::Expr on;
  bool operator==(const LeftJoin&) const = default;
};

struct CanonicalIE {
  std::string name;
  IeKind kind = IeKind::ValueForm;
  std::vector<std::string> produced;
  std::vector<ast::SelectItem> items;  // JoinForm select list A
  std::vector<LeftJoin> joins;         // JoinForm F, in nesting order
  ast::Select subquery;                // SubqueryForm
  std::vector<ast::ValueItem> values;  // ValueForm
  std::vector<std::string> reads;      // attributes of the enclosing relation it reads
  std::vector<std::string> relations;  // other relations it reads
  std::vector<std::string> join_attrs; // enclosing attributes used by recursive joins
  bool self_source = false;            // reads the enclosing relation under an alias

  bool operator==(const CanonicalIE&) const = default;
};

struct PlanStep {
  enum class Kind { Table, View };
  std::string object;
  Kind kind = Kind::View;
  std::string ddl;
  bool operator==(const PlanStep&) const = default;
};

struct KernelPlan {
  std::vector<PlanStep> steps;
  std::string final_name;

  std::vector<std::string> objects() const;
  /// One statement per line block, `;`-terminated, in plan order.
  std::string text() const;
  bool operator==(const KernelPlan&) const = default;
};

struct SourceColumns {
  std::string qualifier;
  std::vector<std::string> columns;
};

/// Columns selected by a `*`, `T.*`, `*/A` or `*/(A1, ...)` item, as
/// qualified names in source order. Throws UnknownExcludedColumn.
std::vector<ast::QualifiedName> expand_star_minus(const ast::SelectItem& item,
                                                  const std::vector<SourceColumns>& sources);

/// `sel` with every star-minus item (including those of nested selects)
/// replaced by explicit columns of its sources.
ast::Select expand_select(ast::Select sel, const Catalog& catalog);

/// The single-stage query `Select prev.*, <ie attributes> From prev ...`
/// with the enclosing relation bound to `prev`.
ast::Select stage_query(const CanonicalIE& ie, const std::string& prev);

/// Canonical form of `ie` as declared in `sir`. References to the enclosing
/// relation carry the kSelf qualifier.
CanonicalIE canonicalize(const ast::IeDecl& ie, const ast::CreateTable& sir, const Catalog& catalog);

/// Evaluation order: producers before readers, declaration order otherwise.
/// Throws IeCycle.
std::vector<CanonicalIE> order_ies(std::vector<CanonicalIE> ies);

/// Replaces references to relations that would close a dependency cycle
/// through `sir` by their bases. Throws NotRewritable.
ast::IeDecl rewrite_to_base(const ast::IeDecl& ie, const ast::CreateTable& sir, const Catalog& catalog);

struct CompiledRelation {
  CatalogEntry entry;  // created_at left at 0
  KernelPlan plan;
  std::vector<CanonicalIE> order;
};

/// Compiles a Create Table (stored relation or SIR) to its kernel plan.
CompiledRelation compile_relation(const ast::CreateTable& def, const Catalog& catalog,
                                  const CompileOptions& options, const Kernel* kernel = nullptr);
CompiledRelation compile_view(const ast::CreateView& def, const Catalog& catalog);

/// The effect of one DDL statement: kernel statements to run in order and
/// the catalog once they commit.
struct Change {
  std::vector<std::string> sql;
  Catalog after;
  std::vector<std::string> written;  // entries whose meta-rows are rewritten
  std::vector<std::string> removed;  // entries whose meta-rows are deleted
  std::vector<std::string> objects;  // kernel objects created
  std::string target;
};

Change compile_create(const ast::CreateTable& stmt, const Catalog& catalog, const CompileOptions& options,
                      const Kernel* kernel = nullptr);
Change compile_create_view(const ast::CreateView& stmt, const Catalog& catalog);
Change compile_alter(const ast::AlterTable& stmt, const Catalog& catalog, const CompileOptions& options,
                     const Kernel* kernel = nullptr);
Change compile_drop(std::string_view name, bool is_view, ast::DropMode mode, const Catalog& catalog);
Change compile_index(const ast::CreateIndex& stmt, const Catalog& catalog);

}  // namespace sirsql
