#pragma once

#include <vector>

#include "parachain/dynamics.hpp"
#include "parachain/model.hpp"
#include "parachain/response.hpp"
#include "parachain/steadystate.hpp"

namespace parachain {

struct SensorConfig {
  PhysicalParams physical;
  ChainParams chain;
  double force_detuning = 0.0;   // delta_f in units of J_c
  double classical_noise = 0.2e-6;  // (dx)_c, meters
  int sense_site = 1;            // where the force acts
  int detect_site = 0;           // 0 = default to N

  int resolved_detect_site() const {
    return detect_site > 0 ? detect_site : chain.n_sites;
  }
};

/// Physical-unit sensing figures of merit for one operating point.
struct SensingReport {
  double displacement_amplitude = 0.0;  // s_N, meters
  double shot_noise = 0.0;              // (dx)_q, meters
  double classical_noise = 0.0;         // (dx)_c, meters
  double snr = 0.0;                     // at applied_force
  double applied_force = 0.0;           // newtons
  double f_min_quantum = 0.0;           // newtons
  double f_min_total = 0.0;             // newtons
  double sensitivity_quantum = 0.0;     // N / sqrt(Hz)
  double sensitivity_total = 0.0;       // N / sqrt(Hz)
  double relaxation_time = 0.0;         // seconds
};

/// |eps| = F x_0 / (2 hbar) in rad/s, returned in units of J_c; the complex
/// phase carries psi.
Complex force_to_drive(double force, const PhysicalParams& physical, double psi = 0.0);

/// Time-averaged displacement amplitude of the detector ion, meters.
/// drive_amplitude is dimensionless (units of J_c).
double displacement_amplitude(const GreensFunction& gf_at_detuning,
                              const GreensFunction& gf_at_minus_detuning,
                              Complex drive_amplitude, int sense_site, int detect_site,
                              double detuning, const PhysicalParams& physical);

/// (dx)_q = x_0 sqrt(2 Re<a^2> + 2 <adag a> + 1) from the force-free steady state.
double shot_noise(const CorrelationMatrix& c, int site, const PhysicalParams& physical);

SensingReport sensing_report(const SensorConfig& config, double applied_force);

struct FrequencyScanRow {
  double delta_f = 0.0;
  double abs_g = 0.0;      // |G_N1(delta_f)|, dimensionless
  double abs_gbar = 0.0;   // |Gbar_N1(-delta_f)|, dimensionless
  double displacement = 0.0;  // meters
  double snr = 0.0;
  bool topological = false;   // nu(delta_f) != 0
};

std::vector<FrequencyScanRow> frequency_scan(const SensorConfig& config,
                                             const std::vector<double>& detunings,
                                             double applied_force);

}  // namespace parachain
