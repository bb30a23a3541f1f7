#include "randhorizon/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace randhorizon {

std::string csv_header() { return "command,K,x,r,sigma,sigma1,sigma2,T,n,value,oracle,abs_err"; }

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

namespace {

std::string opt_str(const std::optional<double>& v, int digits) {
  return v ? format_double(*v, digits) : std::string();
}

}  // namespace

std::string format_csv_row(const CsvRow& row, int digits) {
  std::ostringstream os;
  os << row.command << ',' << opt_str(row.K, digits) << ',' << opt_str(row.x, digits) << ','
     << opt_str(row.r, digits) << ',' << opt_str(row.sigma, digits) << ','
     << opt_str(row.sigma1, digits) << ',' << opt_str(row.sigma2, digits) << ','
     << opt_str(row.T, digits) << ',' << (row.n ? std::to_string(*row.n) : std::string()) << ','
     << opt_str(row.value, digits) << ',' << opt_str(row.oracle, digits) << ','
     << opt_str(row.abs_err, digits);
  return os.str();
}

std::string format_jsonl_row(const CsvRow& row, int digits) {
  std::ostringstream os;
  os << "{\"command\":\"" << row.command << '"';
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) os << ",\"" << name << "\":" << format_double(*v, digits);
  };
  put("K", row.K);
  put("x", row.x);
  put("r", row.r);
  put("sigma", row.sigma);
  put("sigma1", row.sigma1);
  put("sigma2", row.sigma2);
  put("T", row.T);
  if (row.n) os << ",\"n\":" << *row.n;
  put("value", row.value);
  put("oracle", row.oracle);
  put("abs_err", row.abs_err);
  os << '}';
  return os.str();
}

CsvRow parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 12) throw std::invalid_argument("parse_csv_row: expected 12 fields");
  auto opt_d = [&](int i) -> std::optional<double> {
    if (fields[static_cast<std::size_t>(i)].empty()) return std::nullopt;
    return std::strtod(fields[static_cast<std::size_t>(i)].c_str(), nullptr);
  };
  CsvRow row;
  row.command = fields[0];
  row.K = opt_d(1);
  row.x = opt_d(2);
  row.r = opt_d(3);
  row.sigma = opt_d(4);
  row.sigma1 = opt_d(5);
  row.sigma2 = opt_d(6);
  row.T = opt_d(7);
  if (!fields[8].empty()) row.n = std::atoi(fields[8].c_str());
  row.value = opt_d(9);
  row.oracle = opt_d(10);
  row.abs_err = opt_d(11);
  return row;
}

}  // namespace randhorizon
