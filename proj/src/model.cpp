#include "parachain/model.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace parachain {

double reduce_angle(double phi) {
  double r = std::fmod(phi, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  if (r > pi) r -= 2.0 * pi;
  return r;
}

ChainParams::ChainParams(int n_sites_, double j_c_, double delta_, double g_,
                         double gamma_, double delta_phi_, int hopping_range_)
    : n_sites(n_sites_),
      j_c(j_c_),
      delta(delta_),
      g(g_),
      gamma(gamma_),
      delta_phi(reduce_angle(delta_phi_)),
      hopping_range(hopping_range_ < 0 ? n_sites_ - 1 : hopping_range_) {
  if (n_sites < 1) throw std::invalid_argument("ChainParams: n_sites must be >= 1");
  if (!(j_c > 0.0)) throw std::invalid_argument("ChainParams: j_c must be > 0");
  if (gamma < 0.0) throw std::invalid_argument("ChainParams: gamma must be >= 0");
  if (n_sites >= 2) {
    if (hopping_range < 1 || hopping_range > n_sites - 1)
      throw std::invalid_argument("ChainParams: hopping_range out of [1, n_sites-1]");
  } else {
    hopping_range = 0;
  }
}

PhysicalParams::PhysicalParams(double ion_mass_, double trap_frequency_,
                               double frequency_scale_)
    : ion_mass(ion_mass_),
      trap_frequency(trap_frequency_),
      frequency_scale(frequency_scale_) {
  if (!(ion_mass > 0.0)) throw std::invalid_argument("PhysicalParams: ion_mass must be > 0");
  if (!(trap_frequency > 0.0))
    throw std::invalid_argument("PhysicalParams: trap_frequency must be > 0");
  if (!(frequency_scale > 0.0))
    throw std::invalid_argument("PhysicalParams: frequency_scale must be > 0");
  if (frequency_scale / trap_frequency > 0.01)
    std::cerr << "parachain: warning: frequency_scale / trap_frequency = "
              << frequency_scale / trap_frequency
              << " > 0.01, rotating-wave treatment degrades\n";
}

double PhysicalParams::zero_point_length() const {
  return std::sqrt(hbar_si / (2.0 * ion_mass * trap_frequency));
}

Matrix build_coupling_matrix(const ChainParams& p) {
  const int n = p.n_sites;
  Matrix j = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int jj = 0; jj < n; ++jj) {
      int d = jj - i;
      int ad = std::abs(d);
      if (ad == 0 || ad > p.hopping_range) continue;
      double inv = 1.0 / (static_cast<double>(ad) * ad * ad);
      // Exponent sign chosen so that at delta_phi = +pi/4 the gain direction
      // runs from site 1 toward site N (detector at the far end).
      j(i, jj) = p.j_c * inv * std::exp(Complex(0.0, p.delta_phi * d));
    }
  }
  return j;
}

DynamicalMatrix build_dynamical_matrix(const ChainParams& p) {
  const int n = p.n_sites;
  Matrix j = build_coupling_matrix(p);
  Matrix h = Matrix::Zero(2 * n, 2 * n);
  const Complex loss(0.0, -0.5 * p.gamma);
  h.topLeftCorner(n, n) = j + (Complex(p.delta, 0.0) + loss) * Matrix::Identity(n, n);
  h.topRightCorner(n, n) = Complex(p.g, 0.0) * Matrix::Identity(n, n);
  h.bottomLeftCorner(n, n) = Complex(-p.g, 0.0) * Matrix::Identity(n, n);
  h.bottomRightCorner(n, n) =
      -j.conjugate() + (Complex(-p.delta, 0.0) + loss) * Matrix::Identity(n, n);
  return DynamicalMatrix{std::move(h), n};
}

namespace {

// zeta(2m) for m = 1..64: partial sum to N plus the Euler-Maclaurin tail
//   N^{1-s}/(s-1) + N^{-s}/2 + s N^{-s-1}/12 - s(s+1)(s+2) N^{-s-3}/720,
// accurate to ~1e-16 for N = 40 already at s = 2.
const std::vector<double>& even_zeta_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t;
    const double N = 40.0;
    for (int m = 1; m <= 64; ++m) {
      const double s = 2.0 * m;
      double sum = 0.0;
      for (int n = static_cast<int>(N); n >= 1; --n)
        sum += std::pow(static_cast<double>(n), -s);
      sum += std::pow(N, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(N, -s);
      sum += s * std::pow(N, -s - 1.0) / 12.0;
      sum -= s * (s + 1.0) * (s + 2.0) * std::pow(N, -s - 3.0) / 720.0;
      t.push_back(sum);
    }
    return t;
  }();
  return table;
}

constexpr double zeta3 = 1.2020569031595942854;

}  // namespace

double dipolar_cos_sum(double theta) {
  double t = std::abs(reduce_angle(theta));
  if (t == 0.0) return zeta3;
  // Re Li_3(e^{i t}) from the expansion of Li_3(e^mu) around mu = 0:
  //   zeta(3) + t^2/2 (ln t - 3/2) + sum_{m>=2} zeta(3-2m) (-1)^m t^{2m} / (2m)!
  // with zeta(3-2m) rewritten through the functional equation so each term
  // is - 2 (2 pi)^2 zeta(2m-2) (t/2pi)^{2m} / ((2m-2)(2m-1)(2m)).
  double sum = zeta3 + 0.5 * t * t * (std::log(t) - 1.5);
  const auto& zeta = even_zeta_table();
  const double x2 = (t / (2.0 * pi)) * (t / (2.0 * pi));
  double xpow = x2 * x2;  // (t/2pi)^{2m} at m=2
  const double pref = 2.0 * (2.0 * pi) * (2.0 * pi);
  for (int m = 2; m < 64; ++m) {
    double term = -pref * zeta[m - 2] * xpow /
                  (static_cast<double>(2 * m - 2) * (2 * m - 1) * (2 * m));
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
    xpow *= x2;
  }
  return sum;
}

double dipolar_cos_sum_truncated(double theta, int n_max) {
  // Chebyshev recurrence for cos(n theta)
  double sum = 0.0;
  double c0 = 1.0;               // cos(0)
  double c1 = std::cos(theta);   // cos(theta)
  const double two_cos = 2.0 * c1;
  for (int n = 1; n <= n_max; ++n) {
    sum += c1 / (static_cast<double>(n) * n * n);
    double c2 = two_cos * c1 - c0;
    c0 = c1;
    c1 = c2;
  }
  return sum;
}

BlochMatrix build_bloch_matrix(const ChainParams& p, double k,
                               double tail_tolerance) {
  if (!(tail_tolerance > 0.0))
    throw std::invalid_argument("build_bloch_matrix: tail_tolerance must be > 0");
  int n_max;
  if (!p.full_range()) {
    n_max = p.hopping_range;
  } else {
    // envelope of the running term is 2 J_c / n^3 (in units of J_c: 2/n^3)
    n_max = static_cast<int>(std::ceil(std::cbrt(2.0 / tail_tolerance)));
  }
  double cm = dipolar_cos_sum_truncated(k + p.delta_phi, n_max);
  double cp = dipolar_cos_sum_truncated(k - p.delta_phi, n_max);
  const Complex loss(0.0, -0.5 * p.gamma);
  Matrix2 h;
  h(0, 0) = 2.0 * p.j_c * cm + p.delta + loss;
  h(0, 1) = p.g;
  h(1, 0) = -p.g;
  h(1, 1) = -2.0 * p.j_c * cp - p.delta + loss;
  return BlochMatrix{k, h, n_max};
}

Matrix2 bloch_entries_full_tail(const ChainParams& p, double k) {
  double cm = dipolar_cos_sum(k + p.delta_phi);
  double cp = dipolar_cos_sum(k - p.delta_phi);
  const Complex loss(0.0, -0.5 * p.gamma);
  Matrix2 h;
  h(0, 0) = 2.0 * p.j_c * cm + p.delta + loss;
  h(0, 1) = p.g;
  h(1, 0) = -p.g;
  h(1, 1) = -2.0 * p.j_c * cp - p.delta + loss;
  return h;
}

double cooling_rate(double sideband_coupling, double qubit_decay) {
  if (!(qubit_decay > 0.0))
    throw std::domain_error("cooling_rate: qubit_decay must be > 0");
  if (sideband_coupling < 0.0)
    throw std::invalid_argument("cooling_rate: sideband_coupling must be >= 0");
  if (sideband_coupling / qubit_decay > 0.3)
    std::cerr << "parachain: warning: sideband_coupling / qubit_decay = "
              << sideband_coupling / qubit_decay
              << " > 0.3, outside the perturbative cooling regime\n";
  return 4.0 * sideband_coupling * sideband_coupling / qubit_decay;
}

}  // namespace parachain
