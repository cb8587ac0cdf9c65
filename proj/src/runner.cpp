#include "parachain/runner.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "parachain/dynamics.hpp"
#include "parachain/response.hpp"
#include "parachain/sensing.hpp"
#include "parachain/steadystate.hpp"
#include "parachain/topology.hpp"

namespace parachain {

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  threads = std::min(std::max(threads, 1), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

using nlohmann::json;

void check_option_keys(const json& opts, std::initializer_list<const char*> allowed,
                       const std::string& command) {
  for (auto it = opts.begin(); it != opts.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown option \"" + it.key() + "\" for command " + command);
  }
}

double opt_number(const json& opts, const char* key, double fallback) {
  if (!opts.contains(key)) return fallback;
  if (!opts[key].is_number())
    throw ConfigError(std::string("option \"") + key + "\" must be a number");
  return opts[key].get<double>();
}

int opt_int(const json& opts, const char* key, int fallback) {
  if (!opts.contains(key)) return fallback;
  if (!opts[key].is_number_integer())
    throw ConfigError(std::string("option \"") + key + "\" must be an integer");
  return opts[key].get<int>();
}

bool opt_bool(const json& opts, const char* key, bool fallback) {
  if (!opts.contains(key)) return fallback;
  if (!opts[key].is_boolean())
    throw ConfigError(std::string("option \"") + key + "\" must be a boolean");
  return opts[key].get<bool>();
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i)
    out[i] = (points == 1) ? lo : lo + (hi - lo) * i / (points - 1);
  return out;
}

std::map<std::string, std::string> base_meta(const std::string& command,
                                             const RunConfig& cfg) {
  std::map<std::string, std::string> meta = cfg.tolerances.as_meta();
  meta["command"] = command;
  meta["tool_version"] = tool_version;
  const std::string canonical = cfg.raw.dump();
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, fnv1a(canonical));
  meta["config_hash"] = hash;
  meta["config"] = canonical;
  return meta;
}

SweepResult run_greens(const RunConfig& cfg, int threads) {
  check_option_keys(cfg.options, {"omega_min", "omega_max", "points"}, "greens");
  const double lo = opt_number(cfg.options, "omega_min", -4.0);
  const double hi = opt_number(cfg.options, "omega_max", 4.0);
  const std::vector<double> omegas = linspace(lo, hi, opt_int(cfg.options, "points", 801));

  const DynamicalMatrix h = build_dynamical_matrix(cfg.chain);
  const int n = cfg.chain.n_sites;

  SweepResult res;
  res.meta = base_meta("greens", cfg);
  res.columns = {"omega",    "g_n1_re",    "g_n1_im",       "gbar_n1_re",
                 "gbar_n1_im", "abs_g_n1", "abs_gbar_n1",   "chi",
                 "frobenius_gain", "status"};
  res.rows.resize(omegas.size());
  parallel_for(static_cast<int>(omegas.size()), threads, [&](int i) {
    std::vector<Field> row(res.columns.size(), std::monostate{});
    row[0] = omegas[i];
    try {
      GreensFunction gf = greens_function(h, omegas[i]);
      const Complex g = gf.signal()(n - 1, 0);
      const Complex gbar = gf.idler()(n - 1, 0);
      row[1] = g.real();
      row[2] = g.imag();
      row[3] = gbar.real();
      row[4] = gbar.imag();
      row[5] = std::abs(g);
      row[6] = std::abs(gbar);
      if (n > 1) row[7] = nonreciprocity(gf);
      row[8] = frobenius_gain(gf);
      row[9] = std::string("ok");
    } catch (const std::exception& e) {
      row[9] = std::string("error: ") + e.what();
    }
    res.rows[i] = std::move(row);
  });
  return res;
}

SweepResult run_svd(const RunConfig& cfg, int /*threads*/) {
  check_option_keys(cfg.options, {"omega"}, "svd");
  const double omega = opt_number(cfg.options, "omega", 0.0);
  const DynamicalMatrix h = build_dynamical_matrix(cfg.chain);
  SvdDiagnostics d =
      svd_of_inverse_propagator(h, omega, cfg.tolerances.edge_threshold);

  SweepResult res;
  res.meta = base_meta("svd", cfg);
  res.meta["omega"] = format_double(omega);
  res.meta["gap_ratio"] = format_double(d.gap_ratio);
  res.meta["edge_index"] =
      d.edge_index ? std::to_string(*d.edge_index + 1) : "none";
  res.meta["localization_length"] =
      d.localization_length ? format_double(*d.localization_length) : "none";
  res.meta["localization_r2"] = format_double(d.localization_r2);
  res.columns = {"n", "singular_value", "right_abs", "left_abs"};
  const int dim = static_cast<int>(d.singular_values.size());
  // right_abs / left_abs: per-component magnitudes of the pair of singular
  // vectors flagged as the edge mode (empty columns when there is none).
  for (int i = 0; i < dim; ++i) {
    std::vector<Field> row(4, std::monostate{});
    row[0] = static_cast<int64_t>(i + 1);
    row[1] = d.singular_values(i);
    if (d.edge_index) {
      row[2] = std::abs(d.right_vectors(i, *d.edge_index));
      row[3] = std::abs(d.left_vectors(i, *d.edge_index));
    }
    res.rows.push_back(std::move(row));
  }
  return res;
}

SweepResult run_winding(const RunConfig& cfg, int threads) {
  check_option_keys(cfg.options,
                    {"omega", "omega_min", "omega_max", "points", "gamma_min",
                     "gamma_max", "gamma_points", "pin_hopping_range"},
                    "winding");
  const bool pin = opt_bool(cfg.options, "pin_hopping_range", false);
  const int k_points = cfg.tolerances.winding_k_points;
  const double omega0 = opt_number(cfg.options, "omega", 0.0);

  std::vector<double> omegas{omega0};
  std::vector<double> gammas{cfg.chain.gamma};
  if (cfg.options.contains("omega_min")) {
    omegas = linspace(opt_number(cfg.options, "omega_min", 0.0),
                      opt_number(cfg.options, "omega_max", 0.0),
                      opt_int(cfg.options, "points", 101));
  } else if (cfg.options.contains("gamma_min")) {
    gammas = linspace(opt_number(cfg.options, "gamma_min", 0.0),
                      opt_number(cfg.options, "gamma_max", 0.0),
                      opt_int(cfg.options, "gamma_points", 101));
  }

  SweepResult res;
  res.meta = base_meta("winding", cfg);
  res.columns = {"omega",         "gamma",          "nu", "raw_integral",
                 "k_points_used", "max_phase_step", "status"};
  const int count = static_cast<int>(omegas.size() * gammas.size());
  res.rows.resize(count);
  parallel_for(count, threads, [&](int i) {
    const double omega = omegas[i % omegas.size()];
    const double gamma = gammas[i / omegas.size()];
    ChainParams p(cfg.chain.n_sites, cfg.chain.j_c, cfg.chain.delta, cfg.chain.g,
                  gamma, cfg.chain.delta_phi, cfg.chain.hopping_range);
    std::vector<Field> row(res.columns.size(), std::monostate{});
    row[0] = omega;
    row[1] = gamma;
    try {
      WindingResult w = winding_number(p, omega, k_points, pin);
      row[3] = w.raw_integral;
      row[4] = static_cast<int64_t>(w.k_points_used);
      row[5] = w.max_phase_step;
      if (w.quantized) {
        row[2] = static_cast<int64_t>(w.nu);
        row[6] = std::string("ok");
      } else {
        row[6] = std::string("boundary");
      }
    } catch (const GaplessPointError&) {
      row[6] = std::string("boundary");
    } catch (const std::exception& e) {
      row[6] = std::string("error: ") + e.what();
    }
    res.rows[i] = std::move(row);
  });
  return res;
}

SweepResult run_phase_diagram(const RunConfig& cfg, int threads) {
  check_option_keys(cfg.options,
                    {"gamma_min", "gamma_max", "gamma_points", "delta_phi_min",
                     "delta_phi_max", "delta_phi_points", "omega"},
                    "phase-diagram");
  const std::vector<double> gammas =
      linspace(opt_number(cfg.options, "gamma_min", 0.05),
               opt_number(cfg.options, "gamma_max", 3.0),
               opt_int(cfg.options, "gamma_points", 50));
  const double dphi_lo = cfg.options.contains("delta_phi_min")
                             ? parse_angle(cfg.options["delta_phi_min"], "delta_phi_min")
                             : -pi;
  const double dphi_hi = cfg.options.contains("delta_phi_max")
                             ? parse_angle(cfg.options["delta_phi_max"], "delta_phi_max")
                             : pi;
  const std::vector<double> dphis =
      linspace(dphi_lo, dphi_hi, opt_int(cfg.options, "delta_phi_points", 50));
  const double omega = opt_number(cfg.options, "omega", 0.0);

  SweepResult res;
  res.meta = base_meta("phase-diagram", cfg);
  res.columns = {"gamma", "delta_phi", "nu", "stable", "label"};
  const int n_dphi = static_cast<int>(dphis.size());
  const int count = static_cast<int>(gammas.size()) * n_dphi;
  res.rows.resize(count);
  parallel_for(count, threads, [&](int i) {
    const double gamma = gammas[i / n_dphi];
    const double dphi = dphis[i % n_dphi];
    std::vector<Field> row(5, std::monostate{});
    row[0] = gamma;
    row[1] = dphi;
    PhasePoint pt =
        phase_point(cfg.chain, gamma, dphi, omega, cfg.tolerances.winding_k_points);
    if (pt.label != PhasePoint::Label::Boundary) row[2] = static_cast<int64_t>(pt.nu);
    row[3] = pt.stable;
    row[4] = to_string(pt.label);
    res.rows[i] = std::move(row);
  });
  return res;
}

SweepResult run_steady(const RunConfig& cfg, int /*threads*/) {
  check_option_keys(cfg.options, {}, "steady");
  const DynamicalMatrix h = build_dynamical_matrix(cfg.chain);
  CorrelationMatrix c = lyapunov_steady_state(h, cfg.chain.gamma,
                                              cfg.tolerances.stability_tolerance);
  const Eigen::VectorXd phonons = phonon_numbers(c);

  SweepResult res;
  res.meta = base_meta("steady", cfg);
  res.meta["total_phonons"] = format_double(phonons.sum());
  res.columns = {"i", "j", "n_re", "n_im", "m_re", "m_im", "phonon"};
  const int n = cfg.chain.n_sites;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<Field> row(7, std::monostate{});
      row[0] = static_cast<int64_t>(i + 1);
      row[1] = static_cast<int64_t>(j + 1);
      const Complex nv = c.normal_block()(i, j);
      const Complex mv = c.anomalous_block()(i, j);
      row[2] = nv.real();
      row[3] = nv.imag();
      row[4] = mv.real();
      row[5] = mv.imag();
      if (i == j) row[6] = phonons(i);
      res.rows.push_back(std::move(row));
    }
  }
  return res;
}

SweepResult run_stability_scan(const RunConfig& cfg, int threads) {
  check_option_keys(cfg.options,
                    {"gamma_min", "gamma_max", "gamma_points", "n_min", "n_max",
                     "n_step"},
                    "stability-scan");
  const std::vector<double> gammas =
      linspace(opt_number(cfg.options, "gamma_min", 1.0),
               opt_number(cfg.options, "gamma_max", 2.0),
               opt_int(cfg.options, "gamma_points", 51));
  std::vector<int> sizes;
  const int n_min = opt_int(cfg.options, "n_min", cfg.chain.n_sites);
  const int n_max = opt_int(cfg.options, "n_max", n_min);
  const int n_step = opt_int(cfg.options, "n_step", 1);
  if (n_min < 1 || n_max < n_min || n_step < 1)
    throw ConfigError("stability-scan: bad n grid");
  for (int n = n_min; n <= n_max; n += n_step) sizes.push_back(n);

  SweepResult res;
  res.meta = base_meta("stability-scan", cfg);
  res.columns = {"n_sites", "gamma", "stable", "margin"};
  const int n_gamma = static_cast<int>(gammas.size());
  const int count = static_cast<int>(sizes.size()) * n_gamma;
  res.rows.resize(count);
  parallel_for(count, threads, [&](int i) {
    const int n = sizes[i / n_gamma];
    const double gamma = gammas[i % n_gamma];
    ChainParams p(n, cfg.chain.j_c, cfg.chain.delta, cfg.chain.g, gamma,
                  cfg.chain.delta_phi,
                  cfg.chain.full_range() ? -1 : cfg.chain.hopping_range);
    StabilityReport rep =
        stability(build_dynamical_matrix(p), cfg.tolerances.stability_tolerance);
    res.rows[i] = {static_cast<int64_t>(n), gamma, rep.stable, rep.margin};
  });
  return res;
}

SweepResult run_dynamics(const RunConfig& cfg, int /*threads*/) {
  check_option_keys(cfg.options, {"t_end", "sample_points", "site"}, "dynamics");
  if (!cfg.drive) throw ConfigError("dynamics requires a \"drive\" section");
  const int n = cfg.chain.n_sites;
  const int site = opt_int(cfg.options, "site", n);
  if (site < 1 || site > n) throw ConfigError("dynamics: site out of range");
  const double t_end = opt_number(cfg.options, "t_end", 50.0);
  const int samples = opt_int(cfg.options, "sample_points", 1000);
  if (samples < 2) throw ConfigError("dynamics: sample_points must be >= 2");

  const DynamicalMatrix h = build_dynamical_matrix(cfg.chain);
  Trajectory traj =
      integrate_coherences(h, *cfg.drive, t_end, Vector(),
                           cfg.tolerances.ode_rel_tolerance, t_end / (samples - 1));

  SweepResult res;
  res.meta = base_meta("dynamics", cfg);
  try {
    RelaxationResult relax = relaxation_time(h, *cfg.drive, site, -1.0,
                                             cfg.tolerances.ode_rel_tolerance);
    res.meta["tau"] = format_double(relax.tau);
    res.meta["tau_coherence"] = format_double(relax.tau_coherence);
    res.meta["envelope_window"] = format_double(relax.window);
    if (cfg.physical) {
      res.meta["tau_seconds"] =
          format_double(relax.tau / cfg.physical->frequency_scale);
    }
  } catch (const UnstableSystemError&) {
    throw;  // a relaxation time was explicitly requested of an unstable system
  } catch (const std::exception& e) {
    res.meta["tau"] = std::string("undefined (") + e.what() + ")";
  }
  res.columns = {"t", "re_a", "im_a", "abs_a"};
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const Complex a = traj.coherences[i](site - 1);
    res.rows.push_back({traj.times[i], a.real(), a.imag(), std::abs(a)});
  }
  return res;
}

SensorConfig sensor_from(const RunConfig& cfg) {
  if (!cfg.physical)
    throw ConfigError("this command requires a \"physical\" section");
  SensorConfig sc;
  sc.physical = *cfg.physical;
  sc.chain = cfg.chain;
  sc.force_detuning = cfg.drive ? cfg.drive->detuning
                                : opt_number(cfg.options, "delta_f", 0.0);
  sc.classical_noise = opt_number(cfg.options, "classical_noise_m", 0.2e-6);
  sc.sense_site = opt_int(cfg.options, "sense_site", 1);
  sc.detect_site = opt_int(cfg.options, "detect_site", 0);
  return sc;
}

SweepResult run_sense(const RunConfig& cfg, int /*threads*/) {
  check_option_keys(cfg.options,
                    {"applied_force_n", "delta_f", "delta_f_min", "delta_f_max",
                     "delta_f_points", "classical_noise_m", "sense_site",
                     "detect_site"},
                    "sense");
  SensorConfig sc = sensor_from(cfg);
  const double force = opt_number(cfg.options, "applied_force_n", 1e-24);

  SweepResult res;
  res.meta = base_meta("sense", cfg);
  if (cfg.options.contains("delta_f_min")) {
    const std::vector<double> detunings =
        linspace(opt_number(cfg.options, "delta_f_min", 0.0),
                 opt_number(cfg.options, "delta_f_max", 0.0),
                 opt_int(cfg.options, "delta_f_points", 101));
    res.columns = {"delta_f", "abs_g", "abs_gbar", "displacement_m", "snr",
                   "topological"};
    for (const FrequencyScanRow& r : frequency_scan(sc, detunings, force))
      res.rows.push_back(
          {r.delta_f, r.abs_g, r.abs_gbar, r.displacement, r.snr, r.topological});
  } else {
    SensingReport rep = sensing_report(sc, force);
    res.columns = {"delta_f",
                   "displacement_m",
                   "shot_noise_m",
                   "classical_noise_m",
                   "snr",
                   "applied_force_n",
                   "f_min_quantum_n",
                   "f_min_total_n",
                   "sensitivity_quantum_n_per_sqrthz",
                   "sensitivity_total_n_per_sqrthz",
                   "relaxation_time_s"};
    res.rows.push_back({sc.force_detuning, rep.displacement_amplitude,
                        rep.shot_noise, rep.classical_noise, rep.snr,
                        rep.applied_force, rep.f_min_quantum, rep.f_min_total,
                        rep.sensitivity_quantum, rep.sensitivity_total,
                        rep.relaxation_time});
  }
  return res;
}

SweepResult run_table1(const RunConfig& cfg, int threads) {
  check_option_keys(cfg.options,
                    {"delta_f", "applied_force_n", "classical_noise_m"},
                    "table1");
  const double delta_f = cfg.drive ? cfg.drive->detuning
                                   : opt_number(cfg.options, "delta_f", 1.19);
  const double force = opt_number(cfg.options, "applied_force_n", 1e-24);
  const double noise = opt_number(cfg.options, "classical_noise_m", 0.2e-6);
  const PhysicalParams base = cfg.physical ? *cfg.physical : PhysicalParams();

  const int sizes[] = {2, 10, 30};
  const double scales_khz[] = {0.1, 1.0, 10.0};
  const double yocto = 1e-24;

  SweepResult res;
  res.meta = base_meta("table1", cfg);
  res.columns = {"n_sites",  "j_c_khz",      "tau_s",
                 "f_min_q_yn", "s_q_yn_per_sqrthz", "f_min_qc_yn",
                 "s_qc_yn_per_sqrthz"};
  res.rows.resize(9);
  parallel_for(9, threads, [&](int i) {
    const int n = sizes[i / 3];
    const double scale_khz = scales_khz[i % 3];
    SensorConfig sc;
    sc.physical = PhysicalParams(base.ion_mass, base.trap_frequency,
                                 2.0 * pi * scale_khz * 1e3);
    sc.chain = ChainParams(n, 1.0, cfg.chain.delta, cfg.chain.g, cfg.chain.gamma,
                           cfg.chain.delta_phi);
    sc.force_detuning = delta_f;
    sc.classical_noise = noise;
    SensingReport rep = sensing_report(sc, force);
    res.rows[i] = {static_cast<int64_t>(n),       scale_khz,
                   rep.relaxation_time,           rep.f_min_quantum / yocto,
                   rep.sensitivity_quantum / yocto, rep.f_min_total / yocto,
                   rep.sensitivity_total / yocto};
  });
  return res;
}

}  // namespace

std::vector<std::string> known_commands() {
  return {"greens",  "svd",            "winding",  "phase-diagram", "steady",
          "stability-scan", "dynamics", "sense",   "table1"};
}

SweepResult run_command(const std::string& command, const RunConfig& config,
                        int threads) {
  if (command == "greens") return run_greens(config, threads);
  if (command == "svd") return run_svd(config, threads);
  if (command == "winding") return run_winding(config, threads);
  if (command == "phase-diagram") return run_phase_diagram(config, threads);
  if (command == "steady") return run_steady(config, threads);
  if (command == "stability-scan") return run_stability_scan(config, threads);
  if (command == "dynamics") return run_dynamics(config, threads);
  if (command == "sense") return run_sense(config, threads);
  if (command == "table1") return run_table1(config, threads);
  throw ConfigError("unknown command: " + command);
}

}  // namespace parachain
