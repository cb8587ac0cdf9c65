#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parachain/config.hpp"
#include "parachain/response.hpp"
#include "parachain/runner.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("PARACHAIN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
    std::cerr << "warning: ignoring invalid PARACHAIN_THREADS\n";
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parachain: driven-dissipative parametric-chain simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv";
  int threads = default_threads();
  std::vector<std::string> overrides;

  for (const std::string& name : parachain::known_commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-override", overrides,
                    "key=value, repeatable (see header of any output for keys)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  parachain::SweepResult result;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return 2;
    }
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "error: invalid JSON: " << e.what() << "\n";
      return 2;
    }
    parachain::RunConfig cfg = parachain::parse_config(doc);
    for (const std::string& ov : overrides) {
      const auto eq = ov.find('=');
      if (eq == std::string::npos)
        throw parachain::ConfigError("tolerance override must be key=value: " + ov);
      cfg.tolerances.apply_override(ov.substr(0, eq),
                                    std::stod(ov.substr(eq + 1)));
    }
    result = parachain::run_command(command, cfg, threads);
  } catch (const parachain::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const parachain::UnstableSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }

  // Assemble fully before touching the filesystem: failures leave no file.
  std::ostringstream body;
  if (format == "json")
    parachain::write_json(result, body);
  else
    parachain::write_csv(result, body);

  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 4;
    }
    out << body.str();
  }
  return 0;
}
