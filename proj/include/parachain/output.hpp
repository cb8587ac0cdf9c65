#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace parachain {

/// One cell of a sweep row; monostate renders as an empty CSV cell / JSON null.
using Field = std::variant<std::monostate, int64_t, double, std::string, bool>;

/// Machine-readable sweep output: deterministic row order keyed by grid
/// index, plus a provenance header (config hash, version, tolerances).
struct SweepResult {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Field>> rows;
};

/// Full double precision, 17 significant digits.
std::string format_double(double v);

void write_csv(const SweepResult& result, std::ostream& os);
void write_json(const SweepResult& result, std::ostream& os);

/// FNV-1a 64-bit, used for the config provenance hash.
std::uint64_t fnv1a(const std::string& data);

}  // namespace parachain
