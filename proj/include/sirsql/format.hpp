#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sirsql/kernel.hpp"

namespace sirsql {

enum class OutputFormat { Table, Csv, JsonLines };

std::optional<OutputFormat> parse_format(std::string_view name);

/// Table: aligned columns under a header, NULL shown as `NULL`.
/// Csv: header line, quoted where needed, NULL as an empty field.
/// JsonLines: one object per row, keys in column order.
std::string format_rows(const RowSet& rows, OutputFormat format);

}  // namespace sirsql
