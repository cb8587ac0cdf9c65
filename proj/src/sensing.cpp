#include "parachain/sensing.hpp"

#include <cmath>

#include "parachain/topology.hpp"

namespace parachain {

Complex force_to_drive(double force, const PhysicalParams& physical, double psi) {
  const double eps_rad = force * physical.zero_point_length() / (2.0 * hbar_si);
  return (eps_rad / physical.frequency_scale) * std::exp(Complex(0.0, -psi));
}

double displacement_amplitude(const GreensFunction& gf_at_detuning,
                              const GreensFunction& gf_at_minus_detuning,
                              Complex drive_amplitude, int sense_site, int detect_site,
                              double detuning, const PhysicalParams& physical) {
  const int i = detect_site - 1, j = sense_site - 1;
  const double x0 = physical.zero_point_length();
  const double eps = std::abs(drive_amplitude);
  if (detuning == 0.0) {
    const Complex sum = gf_at_detuning.signal()(i, j) + gf_at_detuning.idler()(i, j);
    return std::sqrt(2.0) * x0 * eps * std::abs(sum);
  }
  const double g2 = std::norm(gf_at_detuning.signal()(i, j));
  const double gbar2 = std::norm(gf_at_minus_detuning.idler()(i, j));
  return std::sqrt(2.0) * x0 * eps * std::sqrt(g2 + gbar2);
}

double shot_noise(const CorrelationMatrix& c, int site, const PhysicalParams& physical) {
  const int j = site - 1;
  // <a^2> = conj(M_jj), <adag a> = N_jj
  const double re_a2 = c.anomalous_block()(j, j).real();
  const double n_jj = c.normal_block()(j, j).real();
  const double radicand = 2.0 * re_a2 + 2.0 * n_jj + 1.0;
  if (radicand < -1e-10)
    throw std::runtime_error("shot_noise: negative radicand, inconsistent correlations");
  return physical.zero_point_length() * std::sqrt(std::max(0.0, radicand));
}

namespace {

// d s_N / d F in meters per newton
double displacement_derivative(const GreensFunction& gf_d, const GreensFunction& gf_md,
                               int sense_site, int detect_site, double detuning,
                               const PhysicalParams& ph) {
  const int i = detect_site - 1, j = sense_site - 1;
  const double x0 = ph.zero_point_length();
  double r;  // dimensionless Green's-function combination
  if (detuning == 0.0) {
    r = std::abs(gf_d.signal()(i, j) + gf_d.idler()(i, j));
  } else {
    r = std::sqrt(std::norm(gf_d.signal()(i, j)) + std::norm(gf_md.idler()(i, j)));
  }
  // from s_N = sqrt(2) x0 (F x0 / 2 hbar) (r / J_c)
  return x0 * x0 / (std::sqrt(2.0) * hbar_si) * r / ph.frequency_scale;
}

}  // namespace

SensingReport sensing_report(const SensorConfig& config, double applied_force) {
  const ChainParams& chain = config.chain;
  const PhysicalParams& ph = config.physical;
  const int n = chain.n_sites;
  const int sense = config.sense_site;
  const int detect = config.resolved_detect_site();
  if (sense < 1 || sense > n || detect < 1 || detect > n)
    throw std::invalid_argument("sensing_report: sites out of range");
  if (config.classical_noise < 0.0)
    throw std::invalid_argument("sensing_report: classical_noise must be >= 0");

  DynamicalMatrix h = build_dynamical_matrix(chain);
  StabilityReport rep = stability(h);
  if (!rep.stable) throw UnstableSystemError();

  const double df = config.force_detuning;
  const Complex eps = force_to_drive(applied_force, ph);
  GreensFunction gf_d = greens_function(h, df);
  GreensFunction gf_md = df != 0.0 ? greens_function(h, -df) : gf_d;

  SensingReport out;
  out.applied_force = applied_force;
  out.displacement_amplitude =
      displacement_amplitude(gf_d, gf_md, eps, sense, detect, df, ph);

  CorrelationMatrix c = lyapunov_steady_state(h, chain.gamma);
  out.shot_noise = shot_noise(c, detect, ph);
  out.classical_noise = config.classical_noise;

  const double noise = out.shot_noise + out.classical_noise;
  out.snr = out.displacement_amplitude / noise;

  const double dsdf = displacement_derivative(gf_d, gf_md, sense, detect, df, ph);
  out.f_min_quantum = out.shot_noise / dsdf;
  out.f_min_total = noise / dsdf;

  Vector drive = Vector::Zero(n);
  drive(sense - 1) = eps;
  RelaxationResult relax = relaxation_time(h, DriveSpec{drive, df}, detect);
  out.relaxation_time = relax.tau / ph.frequency_scale;

  out.sensitivity_quantum = out.f_min_quantum * std::sqrt(out.relaxation_time);
  out.sensitivity_total = out.f_min_total * std::sqrt(out.relaxation_time);
  return out;
}

std::vector<FrequencyScanRow> frequency_scan(const SensorConfig& config,
                                             const std::vector<double>& detunings,
                                             double applied_force) {
  const ChainParams& chain = config.chain;
  const PhysicalParams& ph = config.physical;
  const int sense = config.sense_site;
  const int detect = config.resolved_detect_site();

  DynamicalMatrix h = build_dynamical_matrix(chain);
  StabilityReport rep = stability(h);
  if (!rep.stable) throw UnstableSystemError();

  // force-free steady state is detuning-independent
  CorrelationMatrix c = lyapunov_steady_state(h, chain.gamma);
  const double dxq = shot_noise(c, detect, ph);
  const Complex eps = force_to_drive(applied_force, ph);

  std::vector<FrequencyScanRow> rows;
  rows.reserve(detunings.size());
  for (double df : detunings) {
    FrequencyScanRow row;
    row.delta_f = df;
    GreensFunction gf_d = greens_function(h, df);
    GreensFunction gf_md = df != 0.0 ? greens_function(h, -df) : gf_d;
    row.abs_g = std::abs(gf_d.signal()(detect - 1, sense - 1));
    row.abs_gbar = std::abs(gf_md.idler()(detect - 1, sense - 1));
    row.displacement = displacement_amplitude(gf_d, gf_md, eps, sense, detect, df, ph);
    row.snr = row.displacement / (dxq + config.classical_noise);
    try {
      row.topological = winding_number(chain, df).nu != 0;
    } catch (const GaplessPointError&) {
      row.topological = false;  // boundary point
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace parachain
