#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cvqkd {

// Deterministic CSV emission: `# key = value` metadata lines, one header
// line, then data rows. No timestamps, locale-independent number formatting.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void metadata(std::string_view key, std::string_view value);
  void metadata(std::string_view key, double value);
  void metadata(std::string_view key, std::uint64_t value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);

  static std::string num(double value);
  static std::string num(std::uint64_t value);

 private:
  std::ostream& out_;
};

}  // namespace cvqkd
