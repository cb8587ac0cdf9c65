#include "parachain/config.hpp"

#include <regex>

#include "parachain/output.hpp"

namespace parachain {

void Tolerances::apply_override(const std::string& key, double value) {
  if (key == "tail_tolerance")
    tail_tolerance = value;
  else if (key == "stability_tolerance")
    stability_tolerance = value;
  else if (key == "edge_threshold")
    edge_threshold = value;
  else if (key == "quad_tolerance")
    quad_tolerance = value;
  else if (key == "ode_rel_tolerance")
    ode_rel_tolerance = value;
  else if (key == "winding_k_points")
    winding_k_points = static_cast<int>(value);
  else
    throw ConfigError("unknown tolerance key: " + key);
}

std::map<std::string, std::string> Tolerances::as_meta() const {
  return {
      {"tolerance.tail_tolerance", format_double(tail_tolerance)},
      {"tolerance.stability_tolerance", format_double(stability_tolerance)},
      {"tolerance.edge_threshold", format_double(edge_threshold)},
      {"tolerance.quad_tolerance", format_double(quad_tolerance)},
      {"tolerance.ode_rel_tolerance", format_double(ode_rel_tolerance)},
      {"tolerance.winding_k_points", std::to_string(winding_k_points)},
  };
}

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + context);
  }
}

double require_number(const json& obj, const char* key, const std::string& context) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing \"") + key + "\" in " + context);
  if (!obj[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number in " + context);
  return obj[key].get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number in " + context);
  return obj[key].get<double>();
}

Complex parse_complex(const json& v, const std::string& context) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  throw ConfigError("expected number or [re, im] in " + context);
}

}  // namespace

double parse_angle(const nlohmann::json& v, const std::string& context) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    // forms like "pi", "-pi/2", "3pi/4", "0.5*pi"
    static const std::regex re(R"(^\s*([+-]?)\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]+\.?[0-9]*))?\s*$)");
    std::smatch m;
    const std::string s = v.get<std::string>();
    if (std::regex_match(s, m, re)) {
      double num = m[2].str().empty() ? 1.0 : std::stod(m[2].str());
      double den = m[3].str().empty() ? 1.0 : std::stod(m[3].str());
      double val = pi * num / den;
      return m[1].str() == "-" ? -val : val;
    }
    throw ConfigError("cannot parse angle \"" + s + "\" in " + context);
  }
  throw ConfigError("angle must be a number or \"pi/n\" string in " + context);
}

RunConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  check_keys(doc, {"version", "chain", "physical", "drive", "options"}, "config root");
  if (doc.contains("version") && doc["version"].get<int>() != 1)
    throw ConfigError("unsupported config version");
  if (!doc.contains("chain")) throw ConfigError("missing \"chain\" section");

  RunConfig cfg;
  cfg.raw = doc;

  const json& c = doc["chain"];
  check_keys(c, {"n_sites", "j_c", "delta", "g", "gamma", "delta_phi", "hopping_range"},
             "chain");
  const int n = static_cast<int>(require_number(c, "n_sites", "chain"));
  int range = -1;
  if (c.contains("hopping_range")) range = c["hopping_range"].get<int>();
  double dphi = c.contains("delta_phi") ? parse_angle(c["delta_phi"], "chain.delta_phi") : 0.0;
  try {
    cfg.chain = ChainParams(n, number_or(c, "j_c", 1.0, "chain"),
                            number_or(c, "delta", 0.0, "chain"),
                            number_or(c, "g", 0.0, "chain"),
                            number_or(c, "gamma", 0.0, "chain"), dphi, range);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (doc.contains("physical")) {
    const json& p = doc["physical"];
    check_keys(p, {"ion_mass_kg", "trap_frequency_hz", "frequency_scale_hz"}, "physical");
    try {
      cfg.physical = PhysicalParams(
          number_or(p, "ion_mass_kg", mg25_mass, "physical"),
          2.0 * pi * number_or(p, "trap_frequency_hz", 2.0e6, "physical"),
          2.0 * pi * require_number(p, "frequency_scale_hz", "physical"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (doc.contains("drive")) {
    const json& d = doc["drive"];
    check_keys(d, {"site", "amplitude", "phase", "detuning", "amplitudes"}, "drive");
    DriveSpec spec;
    spec.detuning = number_or(d, "detuning", 0.0, "drive");
    spec.amplitudes = Vector::Zero(n);
    if (d.contains("amplitudes")) {
      if (!d["amplitudes"].is_array() || static_cast<int>(d["amplitudes"].size()) != n)
        throw ConfigError("drive.amplitudes must be an array of n_sites entries");
      for (int i = 0; i < n; ++i)
        spec.amplitudes(i) = parse_complex(d["amplitudes"][i], "drive.amplitudes");
    } else {
      const int site = d.contains("site") ? d["site"].get<int>() : 1;
      if (site < 1 || site > n) throw ConfigError("drive.site out of range");
      const double amp = number_or(d, "amplitude", 1.0, "drive");
      const double phase = d.contains("phase") ? parse_angle(d["phase"], "drive.phase") : 0.0;
      spec.amplitudes(site - 1) = amp * std::exp(Complex(0.0, -phase));
    }
    cfg.drive = std::move(spec);
  }

  cfg.options = doc.contains("options") ? doc["options"] : json::object();
  if (!cfg.options.is_object()) throw ConfigError("\"options\" must be an object");
  return cfg;
}

}  // namespace parachain
