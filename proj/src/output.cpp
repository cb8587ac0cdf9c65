#include "parachain/output.hpp"

#include <cstdio>

#include <json.hpp>

namespace parachain {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string field_to_csv(const Field& f) {
  if (std::holds_alternative<std::monostate>(f)) return "";
  if (const auto* i = std::get_if<int64_t>(&f)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&f)) return format_double(*d);
  if (const auto* b = std::get_if<bool>(&f)) return *b ? "true" : "false";
  return std::get<std::string>(f);
}

}  // namespace

void write_csv(const SweepResult& result, std::ostream& os) {
  for (const auto& [key, value] : result.meta) os << "# " << key << " = " << value << "\n";
  for (size_t c = 0; c < result.columns.size(); ++c)
    os << (c ? "," : "") << result.columns[c];
  os << "\n";
  for (const auto& row : result.rows) {
    for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << field_to_csv(row[c]);
    os << "\n";
  }
}

void write_json(const SweepResult& result, std::ostream& os) {
  nlohmann::json doc;
  doc["meta"] = result.meta;
  doc["columns"] = result.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& f : row) {
      if (std::holds_alternative<std::monostate>(f))
        jr.push_back(nullptr);
      else if (const auto* i = std::get_if<int64_t>(&f))
        jr.push_back(*i);
      else if (const auto* d = std::get_if<double>(&f))
        jr.push_back(*d);
      else if (const auto* b = std::get_if<bool>(&f))
        jr.push_back(*b);
      else
        jr.push_back(std::get<std::string>(f));
    }
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace parachain
