#include "sirsql/normalizer.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "sirsql/ident.hpp"

namespace sirsql {

namespace {

constexpr AttrSet bit(std::size_t i) { return AttrSet{1} << i; }

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

bool superkey(AttrSet x, AttrSet stored, const std::vector<FunctionalDependency>& fds) {
  return (attribute_closure(x, fds) & stored) == stored;
}

bool subset(AttrSet a, AttrSet b) { return (a & ~b) == 0; }

/// Lexicographic comparison of attribute sets by their lowest attributes.
bool attr_order_less(AttrSet a, AttrSet b) {
  while (a && b) {
    int x = std::countr_zero(a), y = std::countr_zero(b);
    if (x != y) return x < y;
    a &= a - 1;
    b &= b - 1;
  }
  return !a && b;
}

std::optional<FunctionalDependency> heath_candidate(const SchemeDraft& d, const std::vector<FunctionalDependency>& fds) {
  std::map<AttrSet, AttrSet> declared;
  for (const auto& fd : fds) {
    if (!subset(fd.lhs, d.stored)) continue;
    AttrSet rhs = fd.rhs & d.stored & ~fd.lhs;
    if (rhs && !superkey(fd.lhs, d.stored, fds)) declared[fd.lhs] |= rhs;
  }
  std::optional<FunctionalDependency> best;
  for (const auto& [lhs, rhs] : declared) {
    if (!best || std::popcount(lhs) < std::popcount(best->lhs) ||
        (std::popcount(lhs) == std::popcount(best->lhs) && attr_order_less(lhs, best->lhs)))
      best = FunctionalDependency{lhs, rhs};
  }
  if (best) return best;

  std::vector<int> idx;
  for (AttrSet s = d.stored; s; s &= s - 1) idx.push_back(std::countr_zero(s));
  const int n = static_cast<int>(idx.size());
  for (int k = 1; k < n; ++k) {
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
      AttrSet x = 0;
      for (int p : pick) x |= bit(static_cast<std::size_t>(idx[static_cast<std::size_t>(p)]));
      AttrSet y = attribute_closure(x, fds) & d.stored & ~x;
      if (y && !superkey(x, d.stored, fds)) return FunctionalDependency{x, y};
      int i = k - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return std::nullopt;
}

struct MvdSplit {
  AttrSet a = 0, b = 0, c = 0;
};

std::optional<MvdSplit> mvd_violation(const SchemeDraft& d, const MultivaluedDependency& m,
                                      const std::vector<FunctionalDependency>& fds) {
  if (!subset(m.lhs, d.stored)) return std::nullopt;
  MvdSplit s{m.lhs, m.branch & d.stored & ~m.lhs, 0};
  s.c = d.stored & ~s.a & ~s.b;
  if (!s.b || !s.c || superkey(s.a, d.stored, fds)) return std::nullopt;
  return s;
}

int add_draft(Normalization& n, AttrSet stored, std::vector<DraftIE> ies) {
  SchemeDraft d;
  d.id = static_cast<int>(n.drafts.size());
  d.stored = stored;
  d.ies = std::move(ies);
  d.key = key_of(stored, n.universe.fds);
  n.drafts.push_back(std::move(d));
  return n.drafts.back().id;
}

/// Points IEs reading `from` at the first of `to` holding their attributes.
void redirect(Normalization& n, int from, const std::vector<int>& to) {
  for (int f : n.final_ids) {
    for (auto& ie : n.drafts[static_cast<std::size_t>(f)].ies) {
      if (ie.source != from) continue;
      ie.source = to.back();
      for (int t : to)
        if (subset(ie.attrs | ie.join, n.draft(t).attrs())) {
          ie.source = t;
          break;
        }
    }
  }
}

void replace_final(Normalization& n, int id, const std::vector<int>& with) {
  auto it = std::find(n.final_ids.begin(), n.final_ids.end(), id);
  it = n.final_ids.erase(it);
  n.final_ids.insert(it, with.begin(), with.end());
}

std::string format_fd(const Universe& u, const FunctionalDependency& fd) {
  return u.format(fd.lhs) + " -> " + u.format(fd.rhs);
}

std::string stem(const std::string& attr) {
  if (ends_with_ci(attr, "#")) return attr.substr(0, attr.size() - 1);
  return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(attr[0]))));
}

std::string rule_name(const Universe& u, const SchemeDraft& d) {
  std::string out;
  AttrSet all = d.attrs();
  bool all_stored = true;
  for (std::size_t i = 0; i < u.attrs.size(); ++i)
    if ((all & bit(i)) && ends_with_ci(u.attrs[i], "#")) {
      out += stem(u.attrs[i]);
      all_stored = all_stored && (d.stored & bit(i));
    }
  if (!all_stored) return out + "_PRIME";
  for (std::size_t i = 0; i < u.attrs.size(); ++i)
    if ((d.key & bit(i)) && !ends_with_ci(u.attrs[i], "#")) out += stem(u.attrs[i]);
  return out.empty() ? "R" : out;
}

void assign_names(Normalization& n) {
  std::set<std::string, ILess> used;
  auto unique = [&](std::string base) {
    std::string name = base;
    for (int i = 2; used.count(name); ++i) name = base + "_V" + std::to_string(i);
    used.insert(name);
    return name;
  };
  for (int id : n.final_ids) {
    auto& d = n.drafts[static_cast<std::size_t>(id)];
    d.name = (id == 0) ? unique(n.universe.name) : unique(rule_name(n.universe, d));
  }
  for (auto& d : n.drafts) {
    if (!d.name.empty()) continue;
    d.name = d.id == 0 ? n.universe.name : unique(rule_name(n.universe, d) + "_V" + std::to_string(d.id));
  }
}

std::vector<std::string> ie_names(const Normalization& n, const SchemeDraft& d) {
  std::vector<std::string> out;
  for (const auto& ie : d.ies) {
    std::string base = "I_" + n.draft(ie.source).name;
    std::string name = base;
    for (int i = 2; contains_ci(out, name); ++i) name = base + "_V" + std::to_string(i);
    out.push_back(name);
  }
  return out;
}

std::string ie_text(const Normalization& n, const SchemeDraft& d, const DraftIE& ie, const std::string& name) {
  const Universe& u = n.universe;
  const std::string& src = n.draft(ie.source).name;
  std::string list;
  if (ie.star_minus) {
    auto j = u.names(ie.join);
    list = "*/";
    if (j.size() == 1) {
      list += src + "." + j[0];
    } else {
      std::string inner;
      for (const auto& a : j) inner += (inner.empty() ? "" : ", ") + src + "." + a;
      list += "(" + inner + ")";
    }
  } else {
    list = u.format(ie.attrs);
  }
  std::string where;
  for (const auto& a : u.names(ie.join))
    where += (where.empty() ? "" : " And ") + src + "." + a + " = " + d.name + "." + a;
  // a join short of the source key matches many tuples carrying the same values
  bool distinct = (n.draft(ie.source).key & ~ie.join) != 0;
  return name + " (Select " + (distinct ? "Distinct " : "") + list + " From " + src + " Where " + where + ")";
}

}  // namespace

AttrSet Universe::all() const noexcept { return attrs.size() >= 64 ? ~AttrSet{0} : bit(attrs.size()) - 1; }

AttrSet Universe::set_of(const std::vector<std::string>& names) const {
  AttrSet out = 0;
  for (const auto& n : names) {
    auto it = std::find_if(attrs.begin(), attrs.end(), [&](const std::string& a) { return iequals(a, n); });
    if (it == attrs.end()) throw Error(Errc::SchemaMismatch, "no attribute " + n + " in " + name, {n});
    out |= bit(static_cast<std::size_t>(it - attrs.begin()));
  }
  return out;
}

std::vector<std::string> Universe::names(AttrSet s) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < attrs.size(); ++i)
    if (s & bit(i)) out.push_back(attrs[i]);
  return out;
}

std::string Universe::format(AttrSet s) const {
  std::string out;
  for (const auto& n : names(s)) out += (out.empty() ? "" : ", ") + n;
  return out;
}

Universe parse_dependencies(std::string_view text) {
  Universe u;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  bool header = false;
  auto fail = [&](const std::string& msg, int col = 1) -> void {
    throw SyntaxError(Errc::SyntaxError, msg, line_no, col);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find("--"));
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line.size() < 8 || !iequals(line.substr(0, 8), "RELATION"))
        fail("dependency file must start with RELATION name(attributes)");
      auto open = line.find('('), close = line.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open)
        fail("expected RELATION name(attr, ...)");
      u.name = trim(line.substr(8, open - 8));
      if (u.name.empty()) fail("missing relation name", 9);
      for (const auto& part : split(std::string_view(line).substr(open + 1, close - open - 1), ',')) {
        if (part.empty()) fail("empty attribute name", static_cast<int>(open) + 2);
        auto sp = part.find_first_of(" \t");
        std::string name = sp == std::string::npos ? part : part.substr(0, sp);
        std::string type = sp == std::string::npos ? "Char" : trim(part.substr(sp));
        if (contains_ci(u.attrs, name)) fail("attribute " + name + " listed twice");
        u.attrs.push_back(name);
        u.types.push_back(type);
      }
      if (u.attrs.size() > 64) fail("at most 64 attributes are supported");
      header = true;
      continue;
    }
    auto names = [&](std::string_view s) {
      std::vector<std::string> out;
      for (const auto& p : split(s, ','))
        if (!p.empty()) out.push_back(p);
      if (out.empty()) fail("expected attribute names");
      try {
        return u.set_of(out);
      } catch (const Error& e) {
        fail(e.what());
      }
      return AttrSet{0};
    };
    if (auto p = line.find("->>"); p != std::string::npos) {
      auto bar = line.find('|', p);
      std::string branch = line.substr(p + 3, bar == std::string::npos ? std::string::npos : bar - p - 3);
      MultivaluedDependency m{names(line.substr(0, p)), names(branch)};
      m.branch &= ~m.lhs;
      if (!m.branch || !(u.all() & ~m.lhs & ~m.branch)) fail("trivial multivalued dependency", static_cast<int>(p) + 1);
      if (bar != std::string::npos) {
        AttrSet rest = names(line.substr(bar + 1));
        if (rest != (u.all() & ~m.lhs & ~m.branch))
          fail("the part after | must be the remaining attributes", static_cast<int>(bar) + 1);
      }
      u.mvds.push_back(m);
    } else if (auto q = line.find("->"); q != std::string::npos) {
      u.fds.push_back({names(line.substr(0, q)), names(line.substr(q + 2))});
    } else {
      fail("expected `A -> B` or `A ->> B | C`");
    }
  }
  if (!header) throw SyntaxError(Errc::SyntaxError, "missing RELATION header", line_no, 1);
  return u;
}

AttrSet attribute_closure(AttrSet attrs, const std::vector<FunctionalDependency>& fds) {
  AttrSet out = attrs;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& fd : fds) {
      if (subset(fd.lhs, out) && !subset(fd.rhs, out)) {
        out |= fd.rhs;
        changed = true;
      }
    }
  }
  return out;
}

AttrSet SchemeDraft::inherited() const noexcept {
  AttrSet out = 0;
  for (const auto& ie : ies) out |= ie.attrs;
  return out;
}

AttrSet key_of(AttrSet stored, const std::vector<FunctionalDependency>& fds) {
  AttrSet key = stored;
  for (AttrSet s = stored; s; s &= s - 1) {
    AttrSet without = key & ~(s & -s);
    if (superkey(without, stored, fds)) key = without;
  }
  return key;
}

bool is_bcnf(const SchemeDraft& draft, const std::vector<FunctionalDependency>& fds) {
  return !heath_candidate(draft, fds);
}

bool is_4nf(const SchemeDraft& draft, const std::vector<FunctionalDependency>& fds,
            const std::vector<MultivaluedDependency>& mvds) {
  if (!is_bcnf(draft, fds)) return false;
  for (const auto& m : mvds)
    if (mvd_violation(draft, m, fds)) return false;
  return true;
}

std::vector<const SchemeDraft*> Normalization::finals() const {
  std::vector<const SchemeDraft*> out;
  for (int id : final_ids) out.push_back(&draft(id));
  return out;
}

Normalization start(const Universe& u) {
  Normalization n;
  n.universe = u;
  add_draft(n, u.all(), {});
  n.final_ids.push_back(0);
  assign_names(n);
  return n;
}

DecompositionStep heath_decompose(Normalization& n, int id, FunctionalDependency fd) {
  const SchemeDraft d = n.draft(id);
  const AttrSet a = fd.lhs, b = fd.rhs & d.stored & ~fd.lhs;
  if (!subset(a, d.stored) || !b || superkey(a, d.stored, n.universe.fds))
    throw Error(Errc::NotApplicable,
                "Heath step needs a non-key left side and new stored attributes: " + format_fd(n.universe, fd));
  std::vector<DraftIE> ab_ies;
  for (const auto& ie : d.ies)
    if (subset(ie.join, a | b)) ab_ies.push_back(ie);
  bool plain_ab = ab_ies.empty();
  int ab = add_draft(n, a | b, std::move(ab_ies));
  std::vector<DraftIE> rest = d.ies;
  rest.push_back({ab, b, a, plain_ab && std::popcount(b) > 1});
  int abc = add_draft(n, d.stored & ~b, std::move(rest));
  replace_final(n, id, {ab, abc});
  redirect(n, id, {abc, ab});

  DecompositionStep step;
  step.kind = DecompositionStep::Kind::Heath;
  step.input = id;
  step.dependency = n.universe.format(a) + " -> " + n.universe.format(b);
  step.outputs = {ab, abc};
  n.trace.push_back(step);
  for (auto& x : n.drafts) x.name.clear();
  assign_names(n);
  return step;
}

DecompositionStep fagin_decompose(Normalization& n, int id, MultivaluedDependency mvd) {
  const SchemeDraft d = n.draft(id);
  auto split_sets = mvd_violation(d, mvd, n.universe.fds);
  if (!split_sets)
    throw Error(Errc::NotApplicable, "multivalued dependency on " + n.universe.format(mvd.lhs) +
                                         " is trivial or implied by a key here");
  auto [a, b, c] = *split_sets;
  AttrSet cl = attribute_closure(a, n.universe.fds);
  AttrSet b1 = b & cl, c1 = c & cl;

  std::string note;
  std::vector<DraftIE> left, right;
  for (const auto& ie : d.ies) {
    bool l = subset(ie.join, a | b), r = subset(ie.join, a | c);
    if (l) left.push_back(ie);
    if (r) right.push_back(ie);
    if (!l && !r) note += "IE on " + n.universe.format(ie.join) + " fits neither side and is dropped. ";
  }
  int abc = add_draft(n, a | b, left);
  int acb = add_draft(n, a | c, right);
  if (c1) n.drafts[static_cast<std::size_t>(abc)].ies.push_back({acb, c1, a, false});
  if (b1) n.drafts[static_cast<std::size_t>(acb)].ies.push_back({abc, b1, a, false});
  if (b1 && c1) note += "B' and C' are both non-empty: the two schemes inherit from each other (use rewrite-to-base).";
  replace_final(n, id, {abc, acb});
  redirect(n, id, {acb, abc});

  DecompositionStep step;
  step.kind = DecompositionStep::Kind::Fagin;
  step.input = id;
  step.dependency = n.universe.format(a) + " ->> " + n.universe.format(b) + " | " + n.universe.format(c);
  step.outputs = {abc, acb};
  step.note = trim(note);
  n.trace.push_back(step);
  for (auto& x : n.drafts) x.name.clear();
  assign_names(n);
  return step;
}

Normalization normalize(const Universe& u, bool heath_first) {
  Normalization n = start(u);
  const std::size_t limit = 4 * u.attrs.size() + 4;
  while (true) {
    int target = -1;
    for (int id : n.final_ids)
      if (!is_4nf(n.draft(id), u.fds, u.mvds)) {
        target = id;
        break;
      }
    if (target < 0) break;
    if (n.trace.size() >= limit)
      throw Error(Errc::NoProgress, "decomposition did not converge after " + std::to_string(limit) + " steps");
    const SchemeDraft& d = n.draft(target);
    auto fd = heath_candidate(d, u.fds);
    std::optional<MultivaluedDependency> mvd;
    for (const auto& m : u.mvds)
      if (mvd_violation(d, m, u.fds)) {
        mvd = m;
        break;
      }
    if (mvd && (!heath_first || !fd))
      fagin_decompose(n, target, *mvd);
    else if (fd)
      heath_decompose(n, target, *fd);
    else
      throw Error(Errc::NoProgress, "no applicable dependency for " + d.name);
  }
  return n;
}

std::string Normalization::sirsql() const {
  std::vector<int> order;
  std::vector<int> pending = final_ids;
  while (!pending.empty()) {
    auto ready = std::find_if(pending.begin(), pending.end(), [&](int id) {
      for (const auto& ie : draft(id).ies)
        if (ie.source != id && std::find(pending.begin(), pending.end(), ie.source) != pending.end()) return false;
      return true;
    });
    if (ready == pending.end()) ready = pending.begin();
    order.push_back(*ready);
    pending.erase(ready);
  }
  std::string out;
  for (int id : order) {
    const SchemeDraft& d = draft(id);
    out += "Create Table " + d.name + " (\n";
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < universe.attrs.size(); ++i)
      if (d.stored & bit(i)) lines.push_back(universe.attrs[i] + " " + universe.types[i]);
    auto names = ie_names(*this, d);
    for (std::size_t i = 0; i < d.ies.size(); ++i) lines.push_back(ie_text(*this, d, d.ies[i], names[i]));
    lines.push_back("Primary Key (" + universe.format(d.key) + ")");
    for (std::size_t i = 0; i < lines.size(); ++i) out += "  " + lines[i] + (i + 1 < lines.size() ? ",\n" : "\n");
    out += ");\n";
  }
  return out;
}

std::string Normalization::trace_text() const {
  std::string out;
  auto describe = [&](const SchemeDraft& d) {
    std::string s = d.name + "(" + universe.format(d.stored);
    for (const auto& n : ie_names(*this, d)) s += ", " + n;
    return s + ")";
  };
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& st = trace[i];
    out += std::to_string(i + 1) + ". " + (st.kind == DecompositionStep::Kind::Heath ? "Heath" : "Fagin") + " on " +
           draft(st.input).name + " by " + st.dependency + ": " + describe(draft(st.outputs[0])) + ", " +
           describe(draft(st.outputs[1])) + "\n";
    if (!st.note.empty()) out += "   " + st.note + "\n";
  }
  return out;
}

namespace {

std::vector<std::size_t> column_indices(const RowSet& instance, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) {
    auto it = std::find_if(instance.columns.begin(), instance.columns.end(),
                           [&](const std::string& c) { return iequals(c, n); });
    if (it == instance.columns.end())
      throw Error(Errc::SchemaMismatch, "instance has no column " + n, {n});
    out.push_back(static_cast<std::size_t>(it - instance.columns.begin()));
  }
  return out;
}

std::set<Row> project(const RowSet& instance, const std::vector<std::size_t>& cols) {
  std::set<Row> out;
  for (const auto& r : instance.rows) {
    Row p;
    for (auto c : cols) p.push_back(r.at(c));
    out.insert(std::move(p));
  }
  return out;
}

}  // namespace

bool lossless_check(const Normalization& n, const DecompositionStep& step, const RowSet& instance) {
  const Universe& u = n.universe;
  AttrSet in = n.draft(step.input).stored;
  if (instance.columns.size() != static_cast<std::size_t>(std::popcount(in)))
    throw Error(Errc::SchemaMismatch, "instance columns do not match " + n.draft(step.input).name);
  auto all = u.names(in);
  auto original = project(instance, column_indices(instance, all));

  AttrSet ls = n.draft(step.outputs[0]).stored, rs = n.draft(step.outputs[1]).stored;
  auto left = project(instance, column_indices(instance, u.names(ls)));
  auto right = project(instance, column_indices(instance, u.names(rs)));
  auto lnames = u.names(ls), rnames = u.names(rs);
  auto pos = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
  };
  std::set<Row> joined;
  for (const auto& l : left) {
    for (const auto& r : right) {
      bool match = true;
      for (const auto& a : u.names(ls & rs)) match = match && l[pos(lnames, a)] == r[pos(rnames, a)];
      if (!match) continue;
      Row out;
      for (const auto& a : all) out.push_back(contains_ci(lnames, a) ? l[pos(lnames, a)] : r[pos(rnames, a)]);
      joined.insert(std::move(out));
    }
  }
  return joined == original;
}

std::int64_t stored_value_count(const Normalization& n, const std::vector<const SchemeDraft*>& drafts,
                                const RowSet& instance) {
  std::int64_t total = 0;
  for (const auto* d : drafts) {
    auto cols = column_indices(instance, n.universe.names(d->stored));
    total += static_cast<std::int64_t>(project(instance, cols).size()) * static_cast<std::int64_t>(cols.size());
  }
  return total;
}

}  // namespace sirsql
