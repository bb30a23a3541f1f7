#ifndef RANDHORIZON_CSV_HPP
#define RANDHORIZON_CSV_HPP

#include <optional>
#include <string>

namespace randhorizon {

// One output record under the fixed header. Absent fields print empty.
struct CsvRow {
  std::string command;
  std::optional<double> K, x, r, sigma, sigma1, sigma2, T;
  std::optional<int> n;
  std::optional<double> value, oracle, abs_err;
};

// Fixed column order shared by every subcommand.
std::string csv_header();
std::string format_csv_row(const CsvRow& row, int digits);
std::string format_jsonl_row(const CsvRow& row, int digits);

// Inverse of format_csv_row for the fixed header (round-trip support).
CsvRow parse_csv_row(const std::string& line);

std::string format_double(double v, int digits);

}  // namespace randhorizon

#endif
