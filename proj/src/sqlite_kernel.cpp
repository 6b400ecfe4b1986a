#include "sirsql/sqlite_kernel.hpp"

#include <sqlite3.h>

#include <cmath>
#include <cstdio>

#include "sirsql/ident.hpp"

namespace sirsql {

std::string Value::to_string() const {
  switch (type) {
    case Type::Null:
      return "NULL";
    case Type::Integer:
      return std::to_string(integer);
    case Type::Real: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.15g", real);
      return buf;
    }
    case Type::Text:
      return text;
  }
  return {};
}

namespace {

int rank(const Value& v) {
  switch (v.type) {
    case Value::Type::Null: return 0;
    case Value::Type::Integer:
    case Value::Type::Real: return 1;
    case Value::Type::Text: return 2;
  }
  return 0;
}

double numeric(const Value& v) {
  return v.type == Value::Type::Integer ? static_cast<double>(v.integer) : v.real;
}

}  // namespace

bool operator==(const Value& a, const Value& b) noexcept {
  if (rank(a) != rank(b)) return false;
  switch (rank(a)) {
    case 0: return true;
    case 1:
      if (a.type == Value::Type::Integer && b.type == Value::Type::Integer)
        return a.integer == b.integer;
      return numeric(a) == numeric(b);
    default: return a.text == b.text;
  }
}

bool operator<(const Value& a, const Value& b) noexcept {
  if (rank(a) != rank(b)) return rank(a) < rank(b);
  switch (rank(a)) {
    case 0: return false;
    case 1:
      if (a.type == Value::Type::Integer && b.type == Value::Type::Integer)
        return a.integer < b.integer;
      return numeric(a) < numeric(b);
    default: return a.text < b.text;
  }
}

std::string_view capability_name(Capability c) noexcept {
  switch (c) {
    case Capability::LeftJoin: return "left-join";
    case Capability::ScalarSubquery: return "scalar-subquery";
    case Capability::StringAggregation: return "string-aggregation";
    case Capability::Conditional: return "conditional";
  }
  return "?";
}

namespace {

void int_fn(sqlite3_context* ctx, int, sqlite3_value** argv) {
  switch (sqlite3_value_numeric_type(argv[0])) {
    case SQLITE_NULL:
      sqlite3_result_null(ctx);
      return;
    case SQLITE_INTEGER:
      sqlite3_result_int64(ctx, sqlite3_value_int64(argv[0]));
      return;
    case SQLITE_FLOAT:
      sqlite3_result_int64(ctx, static_cast<sqlite3_int64>(std::trunc(sqlite3_value_double(argv[0]))));
      return;
    default:
      sqlite3_result_null(ctx);
  }
}

void round_fn(sqlite3_context* ctx, int argc, sqlite3_value** argv) {
  if (sqlite3_value_type(argv[0]) == SQLITE_NULL ||
      (argc > 1 && sqlite3_value_type(argv[1]) == SQLITE_NULL)) {
    sqlite3_result_null(ctx);
    return;
  }
  double x = sqlite3_value_double(argv[0]);
  int digits = argc > 1 ? sqlite3_value_int(argv[1]) : 0;
  if (digits < 0) digits = 0;
  if (digits > 15) digits = 15;
  double scale = std::pow(10.0, digits);
  double r = std::copysign(std::floor(std::fabs(x) * scale + 0.5), x) / scale;
  // Recover the shortest decimal form so 5.7 prints as 5.7.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, r);
  sqlite3_result_double(ctx, std::strtod(buf, nullptr));
}

struct ListState {
  std::string text;
  bool any = false;
};

void list_step(sqlite3_context* ctx, int argc, sqlite3_value** argv) {
  auto* state = static_cast<ListState**>(sqlite3_aggregate_context(ctx, sizeof(ListState*)));
  if (!state) return;
  if (!*state) *state = new ListState;
  std::string row;
  bool any = false;
  for (int i = 0; i < argc; ++i) {
    if (sqlite3_value_type(argv[i]) == SQLITE_NULL) continue;
    if (any) row += ", ";
    row += reinterpret_cast<const char*>(sqlite3_value_text(argv[i]));
    any = true;
  }
  if (!any) return;
  if ((*state)->any) (*state)->text += " ; ";
  (*state)->text += row;
  (*state)->any = true;
}

void list_final(sqlite3_context* ctx) {
  auto* state = static_cast<ListState**>(sqlite3_aggregate_context(ctx, 0));
  if (!state || !*state || !(*state)->any) {
    sqlite3_result_null(ctx);
  } else {
    sqlite3_result_text(ctx, (*state)->text.c_str(), static_cast<int>((*state)->text.size()),
                        SQLITE_TRANSIENT);
  }
  if (state) delete *state;
}

Value column_value(sqlite3_stmt* st, int i) {
  switch (sqlite3_column_type(st, i)) {
    case SQLITE_INTEGER:
      return Value::of(static_cast<std::int64_t>(sqlite3_column_int64(st, i)));
    case SQLITE_FLOAT:
      return Value::of_real(sqlite3_column_double(st, i));
    case SQLITE_NULL:
      return Value::null();
    default: {
      const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st, i));
      return Value::of(std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st, i))));
    }
  }
}

class Stmt {
 public:
  Stmt() = default;
  ~Stmt() { sqlite3_finalize(st_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;
  sqlite3_stmt** out() { return &st_; }
  sqlite3_stmt* get() const { return st_; }

 private:
  sqlite3_stmt* st_ = nullptr;
};

}  // namespace

SqliteKernel::SqliteKernel(const std::string& location, std::set<Capability> disabled) {
  if (sqlite3_open_v2(location.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) !=
      SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(Errc::KernelError, "cannot open " + location + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  auto flags = SQLITE_UTF8 | SQLITE_DETERMINISTIC;
  sqlite3_create_function_v2(db_, "INT", 1, flags, nullptr, int_fn, nullptr, nullptr, nullptr);
  sqlite3_create_function_v2(db_, "ROUND", 1, flags, nullptr, round_fn, nullptr, nullptr, nullptr);
  sqlite3_create_function_v2(db_, "ROUND", 2, flags, nullptr, round_fn, nullptr, nullptr, nullptr);
  sqlite3_create_function_v2(db_, "LIST", -1, SQLITE_UTF8, nullptr, nullptr, list_step,
                             list_final, nullptr);
  set_foreign_keys(true);
  probe(disabled);
}

SqliteKernel::~SqliteKernel() { sqlite3_close_v2(db_); }

void SqliteKernel::fail(std::string_view sql) const {
  std::string msg = sqlite3_errmsg(db_);
  throw Error(Errc::KernelError, msg + " [in: " + std::string(sql) + "]",
              {std::to_string(sqlite3_extended_errcode(db_)), msg});
}

RowSet SqliteKernel::query(std::string_view sql) {
  Stmt st;
  const char* tail = nullptr;
  if (sqlite3_prepare_v2(db_, sql.data(), static_cast<int>(sql.size()), st.out(), &tail) != SQLITE_OK)
    fail(sql);
  RowSet rs;
  if (!st.get()) return rs;
  int n = sqlite3_column_count(st.get());
  for (int i = 0; i < n; ++i) rs.columns.emplace_back(sqlite3_column_name(st.get(), i));
  for (;;) {
    int rc = sqlite3_step(st.get());
    if (rc == SQLITE_DONE) break;
    if (rc != SQLITE_ROW) fail(sql);
    Row row;
    row.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) row.push_back(column_value(st.get(), i));
    rs.rows.push_back(std::move(row));
  }
  return rs;
}

std::int64_t SqliteKernel::execute(std::string_view sql) {
  std::int64_t changes = 0;
  const char* p = sql.data();
  const char* end = sql.data() + sql.size();
  while (p < end) {
    Stmt st;
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(db_, p, static_cast<int>(end - p), st.out(), &tail) != SQLITE_OK)
      fail(sql);
    p = tail;
    if (!st.get()) continue;
    int rc;
    while ((rc = sqlite3_step(st.get())) == SQLITE_ROW) {
    }
    if (rc != SQLITE_DONE) fail(sql);
    if (!sqlite3_stmt_readonly(st.get())) changes += sqlite3_changes(db_);
  }
  return changes;
}

void SqliteKernel::begin() {
  if (in_tx_) throw Error(Errc::NestedTransaction, "a transaction is already open on this connection");
  execute("BEGIN IMMEDIATE");
  in_tx_ = true;
}

void SqliteKernel::commit() {
  execute("COMMIT");
  in_tx_ = false;
}

void SqliteKernel::rollback() {
  in_tx_ = false;
  if (!sqlite3_get_autocommit(db_)) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
}

std::vector<std::string> SqliteKernel::introspect(std::string_view object) {
  Stmt st;
  const char* sql = "SELECT name FROM pragma_table_info(?1)";
  if (sqlite3_prepare_v2(db_, sql, -1, st.out(), nullptr) != SQLITE_OK) fail(sql);
  sqlite3_bind_text(st.get(), 1, object.data(), static_cast<int>(object.size()), SQLITE_TRANSIENT);
  std::vector<std::string> cols;
  int rc;
  while ((rc = sqlite3_step(st.get())) == SQLITE_ROW)
    cols.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(st.get(), 0)));
  if (rc != SQLITE_DONE) fail(sql);
  if (cols.empty()) throw Error(Errc::UnknownObject, "no kernel object named " + std::string(object));
  return cols;
}

std::optional<std::string> SqliteKernel::object_definition(std::string_view object) {
  Stmt st;
  const char* sql = "SELECT coalesce(sql, '') FROM sqlite_master WHERE name = ?1 COLLATE NOCASE";
  if (sqlite3_prepare_v2(db_, sql, -1, st.out(), nullptr) != SQLITE_OK) fail(sql);
  sqlite3_bind_text(st.get(), 1, object.data(), static_cast<int>(object.size()), SQLITE_TRANSIENT);
  int rc = sqlite3_step(st.get());
  if (rc == SQLITE_ROW) return std::string(reinterpret_cast<const char*>(sqlite3_column_text(st.get(), 0)));
  if (rc != SQLITE_DONE) fail(sql);
  return std::nullopt;
}

std::vector<std::string> SqliteKernel::index_definitions(std::string_view table) const {
  Stmt st;
  const char* sql =
      "SELECT sql FROM sqlite_master WHERE type = 'index' AND sql IS NOT NULL AND tbl_name = ?1 COLLATE NOCASE "
      "ORDER BY rowid";
  if (sqlite3_prepare_v2(db_, sql, -1, st.out(), nullptr) != SQLITE_OK) fail(sql);
  sqlite3_bind_text(st.get(), 1, table.data(), static_cast<int>(table.size()), SQLITE_TRANSIENT);
  std::vector<std::string> out;
  int rc;
  while ((rc = sqlite3_step(st.get())) == SQLITE_ROW)
    out.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(st.get(), 0)));
  if (rc != SQLITE_DONE) fail(sql);
  return out;
}

std::vector<KernelObject> SqliteKernel::list_objects() {
  RowSet rs = query(
      "SELECT name, type FROM sqlite_master WHERE name NOT LIKE 'sqlite\\_%' ESCAPE '\\' "
      "ORDER BY rowid");
  std::vector<KernelObject> out;
  for (auto& r : rs.rows) out.push_back({r[0].text, r[1].text});
  return out;
}

void SqliteKernel::set_foreign_keys(bool on) {
  execute(on ? "PRAGMA foreign_keys = ON" : "PRAGMA foreign_keys = OFF");
}

void SqliteKernel::probe(const std::set<Capability>& disabled) {
  struct Probe {
    Capability cap;
    const char* sql;
  };
  const Probe probes[] = {
      {Capability::LeftJoin,
       "SELECT a.x, b.y FROM sirsql_probe_a a LEFT JOIN sirsql_probe_b b ON a.x = b.x"},
      {Capability::ScalarSubquery,
       "SELECT (SELECT count(*) FROM sirsql_probe_b b WHERE b.x = a.x) FROM sirsql_probe_a a"},
      {Capability::StringAggregation, "SELECT LIST(x, y) FROM sirsql_probe_b"},
      {Capability::Conditional, "SELECT iif(x > 0, 1, 0) FROM sirsql_probe_a"},
  };
  sqlite3_exec(db_, "SAVEPOINT sirsql_probe", nullptr, nullptr, nullptr);
  sqlite3_exec(db_,
               "CREATE TEMP TABLE sirsql_probe_a(x); CREATE TEMP TABLE sirsql_probe_b(x, y);"
               "INSERT INTO sirsql_probe_a VALUES (1); INSERT INTO sirsql_probe_b VALUES (1, 'a');",
               nullptr, nullptr, nullptr);
  for (const auto& p : probes) {
    if (disabled.count(p.cap)) continue;
    if (sqlite3_exec(db_, p.sql, nullptr, nullptr, nullptr) == SQLITE_OK) caps_.insert(p.cap);
  }
  sqlite3_exec(db_, "ROLLBACK TO sirsql_probe; RELEASE sirsql_probe", nullptr, nullptr, nullptr);
}

}  // namespace sirsql
