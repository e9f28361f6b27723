#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace weldgeom::csv {

// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

// Fixed 17-significant-digit rendering used by model files.
std::string format_exact(double value);

std::vector<std::string> split(std::string_view line, char sep = ',');

// Parses a base-10 decimal with '.' radix; the whole cell must be consumed.
bool parse_number(std::string_view cell, double& out);

std::string_view trim(std::string_view s);

// Minimal row writer. Cells are written verbatim (no quoting; none of our
// fields contain separators).
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);

  void row(const std::vector<std::string>& cells);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// `key = value` line; false for blank lines and `#` comments. Throws Error on
// a non-blank line without '='.
bool split_key_value(std::string_view line, std::string& key, std::string& value);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace weldgeom::csv
