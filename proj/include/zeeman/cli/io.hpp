#pragma once

// Result files: CSV tables and JSON documents with fixed key order and
// doubles printed to 17 significant digits, so equal inputs give equal bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace zeeman::io {

using Json = nlohmann::ordered_json;

/// "%.17g"; NaN and infinities become "nan", "inf", "-inf".
std::string format_double(double v);

/// Two-space indented JSON; non-finite doubles are written as null.
std::string dump_json(const Json& j);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  void add(std::vector<Json> row);
  std::string to_csv() const;
  /// {"columns": [...], "rows": [[...], ...]}
  Json to_json() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace zeeman::io
