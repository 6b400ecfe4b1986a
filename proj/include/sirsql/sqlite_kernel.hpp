#pragma once

#include <memory>
#include <set>
#include <string>

#include "sirsql/kernel.hpp"

struct sqlite3;

namespace sirsql {

/// Kernel binding to a single-file SQLite database. Registers INT, ROUND
/// (half away from zero) and the LIST aggregate on the connection.
class SqliteKernel final : public Kernel {
 public:
  /// `location` is a file path or ":memory:". Capabilities named in
  /// `disabled` are reported missing even when the engine has them.
  explicit SqliteKernel(const std::string& location = ":memory:",
                        std::set<Capability> disabled = {});
  ~SqliteKernel() override;
  SqliteKernel(const SqliteKernel&) = delete;
  SqliteKernel& operator=(const SqliteKernel&) = delete;

  RowSet query(std::string_view sql) override;
  std::int64_t execute(std::string_view sql) override;

  void begin() override;
  void commit() override;
  void rollback() override;
  bool in_transaction() const override { return in_tx_; }

  std::vector<std::string> introspect(std::string_view object) override;
  std::optional<std::string> object_definition(std::string_view object) override;
  std::vector<KernelObject> list_objects() override;
  std::vector<std::string> index_definitions(std::string_view table) const override;

  bool has(Capability c) const override { return caps_.count(c) > 0; }
  std::string row_id() const override { return "rowid"; }

  /// Enables or disables kernel-side foreign key enforcement.
  void set_foreign_keys(bool on);

 private:
  void probe(const std::set<Capability>& disabled);
  [[noreturn]] void fail(std::string_view sql) const;

  sqlite3* db_ = nullptr;
  bool in_tx_ = false;
  std::set<Capability> caps_;
};

}  // namespace sirsql
