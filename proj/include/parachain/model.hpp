#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

namespace parachain {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar_si = 1.054571817e-34;           // J s
inline constexpr double atomic_mass_unit = 1.66053907e-27;   // kg
inline constexpr double mg25_mass = 24.985837 * atomic_mass_unit;  // kg (CODATA)

/// Dimensionless description of the parametric chain in units of J_c.
/// Sites are 1-based in all interfaces; delta_phi is stored reduced to
/// (-pi, pi]; hopping_range = n_sites - 1 means the full dipolar range.
struct ChainParams {
  int n_sites = 1;
  double j_c = 1.0;
  double delta = 0.0;
  double g = 0.0;
  double gamma = 0.0;
  double delta_phi = 0.0;
  int hopping_range = 0;

  ChainParams() = default;
  ChainParams(int n_sites, double j_c, double delta, double g, double gamma,
              double delta_phi, int hopping_range = -1);

  bool full_range() const { return hopping_range >= n_sites - 1; }
};

/// The 2N x 2N non-Hermitian Nambu matrix generating first-moment dynamics.
/// Upper-left block J + Delta - i gamma/2, off-diagonals +-g, lower-right
/// -J* - Delta - i gamma/2. Satisfies sigma_x H* sigma_x = -H.
struct DynamicalMatrix {
  Matrix entries;
  int n_sites = 0;
};

/// 2x2 Bloch counterpart of the dynamical matrix at quasi-momentum k.
struct BlochMatrix {
  double k = 0.0;
  Matrix2 entries;
  int tail_terms = 0;
};

/// Physical scales for the sensing pipeline. Everything upstream is
/// dimensionless in units of J_c; these constants restore SI units.
struct PhysicalParams {
  double ion_mass = mg25_mass;               // kg
  double trap_frequency = 2.0 * pi * 2.0e6;  // rad/s
  double frequency_scale = 2.0 * pi * 1.0e3; // J_c in rad/s

  PhysicalParams() = default;
  PhysicalParams(double ion_mass, double trap_frequency, double frequency_scale);

  double zero_point_length() const;  // x_0 = sqrt(hbar / (2 m w_t)), meters
};

/// Hermitian N x N coupling matrix, J_ij = J_c e^{+i dphi (j-i)} / |i-j|^3
/// for 0 < |i-j| <= hopping_range; the exponent sign makes delta_phi = +pi/4
/// amplify from site 1 toward site N.
Matrix build_coupling_matrix(const ChainParams& params);

DynamicalMatrix build_dynamical_matrix(const ChainParams& params);

/// Bloch matrix with the dipolar sums truncated when the 2/n^3 envelope
/// drops below tail_tolerance (and at n <= hopping_range when the params
/// carry a restricted range).
BlochMatrix build_bloch_matrix(const ChainParams& params, double k,
                               double tail_tolerance = 1e-12);

/// Same entries with the full dipolar tail evaluated in closed form via
/// the trilogarithm on the unit circle. Used by the winding integrals.
Matrix2 bloch_entries_full_tail(const ChainParams& params, double k);

/// sum_{n>=1} cos(n theta) / n^3, full tail (Re Li_3(e^{i theta})).
double dipolar_cos_sum(double theta);
/// Finite version, sum up to n_max.
double dipolar_cos_sum_truncated(double theta, int n_max);

/// Laser-cooling rate gamma = 4 g_r^2 / gamma_d, all in rad/s.
double cooling_rate(double sideband_coupling, double qubit_decay);

/// Reduce an angle to (-pi, pi].
double reduce_angle(double phi);

}  // namespace parachain
