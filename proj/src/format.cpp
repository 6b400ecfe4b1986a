#include "sirsql/format.hpp"

#include <algorithm>

#include <json.hpp>

namespace sirsql {

namespace {

std::string cell(const Value& v) { return v.is_null() ? "NULL" : v.to_string(); }

std::string table(const RowSet& rs) {
  std::vector<std::size_t> width(rs.columns.size());
  for (std::size_t i = 0; i < rs.columns.size(); ++i) width[i] = rs.columns[i].size();
  for (const auto& r : rs.rows)
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], cell(r[i]).size());

  std::string out;
  auto line = [&](auto&& text_of) {
    std::string l;
    for (std::size_t i = 0; i < width.size(); ++i) {
      std::string t = text_of(i);
      if (i) l += " | ";
      l += t;
      if (i + 1 < width.size()) l.append(width[i] - t.size(), ' ');
    }
    out += l + "\n";
  };
  line([&](std::size_t i) { return rs.columns[i]; });
  std::string rule;
  for (std::size_t i = 0; i < width.size(); ++i) rule += (i ? "-+-" : "") + std::string(width[i], '-');
  out += rule + "\n";
  for (const auto& r : rs.rows) line([&](std::size_t i) { return i < r.size() ? cell(r[i]) : std::string(); });
  out += "(" + std::to_string(rs.rows.size()) + (rs.rows.size() == 1 ? " row)\n" : " rows)\n");
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv(const RowSet& rs) {
  std::string out;
  for (std::size_t i = 0; i < rs.columns.size(); ++i) out += (i ? "," : "") + csv_field(rs.columns[i]);
  out += "\n";
  for (const auto& r : rs.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + (r[i].is_null() ? "" : csv_field(r[i].to_string()));
    out += "\n";
  }
  return out;
}

std::string json_lines(const RowSet& rs) {
  std::string out;
  for (const auto& r : rs.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.size() && i < rs.columns.size(); ++i) {
      const Value& v = r[i];
      switch (v.type) {
        case Value::Type::Null: o[rs.columns[i]] = nullptr; break;
        case Value::Type::Integer: o[rs.columns[i]] = v.integer; break;
        case Value::Type::Real: o[rs.columns[i]] = v.real; break;
        case Value::Type::Text: o[rs.columns[i]] = v.text; break;
      }
    }
    out += o.dump() + "\n";
  }
  return out;
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json-lines") return OutputFormat::JsonLines;
  return std::nullopt;
}

std::string format_rows(const RowSet& rows, OutputFormat format) {
  switch (format) {
    case OutputFormat::Csv: return csv(rows);
    case OutputFormat::JsonLines: return json_lines(rows);
    case OutputFormat::Table: break;
  }
  return table(rows);
}

}  // namespace sirsql
