#include "cvqkd/csv.hpp"

#include <cmath>
#include <cstdio>

namespace cvqkd {

std::string CsvWriter::num(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string CsvWriter::num(std::uint64_t value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(value));
  return buf;
}

void CsvWriter::metadata(std::string_view key, std::string_view value) {
  out_ << "# " << key << " = " << value << "\n";
}

void CsvWriter::metadata(std::string_view key, double value) { metadata(key, num(value)); }

void CsvWriter::metadata(std::string_view key, std::uint64_t value) { metadata(key, num(value)); }

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ",";
    out_ << fields[i];
  }
  out_ << "\n";
}

}  // namespace cvqkd
