#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sirsql/engine.hpp"
#include "sirsql/sqlite_kernel.hpp"

namespace sirsql::test {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("missing file " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline std::string fixture(const std::string& name) { return read_file(std::string(SIRSQL_FIXTURES) + "/" + name); }
inline std::string fixture_path(const std::string& name) { return std::string(SIRSQL_FIXTURES) + "/" + name; }

using Table = std::vector<std::vector<std::string>>;

inline Table canon(const RowSet& rs) {
  Table out;
  for (const auto& r : rs.rows) {
    std::vector<std::string> line;
    for (const auto& v : r) line.push_back(v.to_string());
    out.push_back(std::move(line));
  }
  return out;
}

/// Pipe-separated text with a header line.
inline Table read_table(const std::string& text, std::vector<std::string>* header = nullptr) {
  Table out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, '|');) cells.push_back(c);
    if (first) {
      if (header) *header = cells;
      first = false;
      continue;
    }
    out.push_back(std::move(cells));
  }
  return out;
}

/// One in-memory kernel with the layer on top.
struct Db {
  explicit Db(EngineOptions options = {}) : engine(kernel, options) {}
  SqliteKernel kernel;
  Engine engine;

  Db& run(const std::string& script) {
    engine.execute_script(script);
    return *this;
  }
  Db& sp2(bool data = true) {
    run(fixture("sp2_schema.sirsql"));
    if (data) run(fixture("sp2_data.sirsql"));
    return *this;
  }
  Table rows(const std::string& sql) { return canon(engine.query(sql)); }
  std::int64_t count(const std::string& table) {
    return kernel.query("SELECT COUNT(*) FROM " + table).rows.at(0).at(0).integer;
  }
};

}  // namespace sirsql::test
