#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sirsql/kernel.hpp"

namespace sirsql {

/// Attribute set over a universe of at most 64 attributes, bit i = attribute i.
using AttrSet = std::uint64_t;

struct FunctionalDependency {
  AttrSet lhs = 0;
  AttrSet rhs = 0;
  bool operator==(const FunctionalDependency&) const = default;
};

/// A ->> B | C, with C the rest of the scheme.
struct MultivaluedDependency {
  AttrSet lhs = 0;
  AttrSet branch = 0;
  bool operator==(const MultivaluedDependency&) const = default;
};

struct Universe {
  std::string name;
  std::vector<std::string> attrs;
  std::vector<std::string> types;
  std::vector<FunctionalDependency> fds;
  std::vector<MultivaluedDependency> mvds;

  AttrSet all() const noexcept;
  AttrSet set_of(const std::vector<std::string>& names) const;
  std::vector<std::string> names(AttrSet s) const;
  std::string format(AttrSet s) const;  // "A, B"
};

/// Parses `RELATION U(A [type], ...)` followed by `A, B -> C` and
/// `A ->> B | C` lines; `--` starts a comment. Throws SyntaxError.
Universe parse_dependencies(std::string_view text);

AttrSet attribute_closure(AttrSet attrs, const std::vector<FunctionalDependency>& fds);

/// An IE of a draft: `select attrs from source where source.join = this.join`.
struct DraftIE {
  int source = -1;
  AttrSet attrs = 0;
  AttrSet join = 0;
  bool star_minus = false;  // written as `*/join`
  bool operator==(const DraftIE&) const = default;
};

struct SchemeDraft {
  int id = 0;
  std::string name;
  AttrSet stored = 0;
  std::vector<DraftIE> ies;
  AttrSet key = 0;

  AttrSet inherited() const noexcept;
  AttrSet attrs() const noexcept { return stored | inherited(); }
};

/// A minimal key of the stored attributes, dropping attributes in order.
AttrSet key_of(AttrSet stored, const std::vector<FunctionalDependency>& fds);
/// Restated BCNF: the FDs projected onto the stored attributes.
bool is_bcnf(const SchemeDraft& draft, const std::vector<FunctionalDependency>& fds);
bool is_4nf(const SchemeDraft& draft, const std::vector<FunctionalDependency>& fds,
            const std::vector<MultivaluedDependency>& mvds);

struct DecompositionStep {
  enum class Kind { Heath, Fagin };
  Kind kind = Kind::Heath;
  int input = 0;
  std::string dependency;
  std::vector<int> outputs;
  std::string note;
};

/// Drafts by id; decomposed drafts stay for the trace.
struct Normalization {
  Universe universe;
  std::vector<SchemeDraft> drafts;
  std::vector<int> final_ids;  // creation order
  std::vector<DecompositionStep> trace;

  const SchemeDraft& draft(int id) const { return drafts.at(static_cast<std::size_t>(id)); }
  std::vector<const SchemeDraft*> finals() const;
  /// `.sirsql` Create Table statements, sources before readers.
  std::string sirsql() const;
  std::string trace_text() const;
};

/// A draft holding all attributes of the universe, stored.
Normalization start(const Universe& u);
/// AB(A, B) and AB¹C(A, B¹, C) for fd A -> B. Throws NotApplicable.
DecompositionStep heath_decompose(Normalization& n, int draft, FunctionalDependency fd);
/// ABC¹(A, B, C¹) and ACB¹(A, B¹, C). Throws NotApplicable.
DecompositionStep fagin_decompose(Normalization& n, int draft, MultivaluedDependency mvd);

/// Decomposes until every draft is in restated 4NF, Fagin steps first
/// unless `heath_first`. Throws NoProgress.
Normalization normalize(const Universe& u, bool heath_first = false);

/// Projects `instance` (over the input draft's stored attributes) onto each
/// output's stored attributes and compares their natural join to it.
bool lossless_check(const Normalization& n, const DecompositionStep& step, const RowSet& instance);
/// Sum over drafts of distinct projected rows times stored attributes.
std::int64_t stored_value_count(const Normalization& n, const std::vector<const SchemeDraft*>& drafts,
                                const RowSet& instance);

}  // namespace sirsql
