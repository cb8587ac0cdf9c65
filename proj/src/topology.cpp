#include "parachain/topology.hpp"

#include <cmath>
#include <functional>

#include "parachain/steadystate.hpp"

namespace parachain {

namespace {

Complex bloch_det(const ChainParams& p, double omega, double k, bool pinned) {
  Matrix2 h = pinned ? build_bloch_matrix(p, k).entries
                     : bloch_entries_full_tail(p, k);
  const Complex a = omega - h(0, 0);
  const Complex d = omega - h(1, 1);
  return a * d - (-h(0, 1)) * (-h(1, 0));
}

}  // namespace

WindingResult winding_number(const ChainParams& params, double omega, int k_points,
                             bool pin_hopping_range) {
  if (k_points < 8) throw std::invalid_argument("winding_number: k_points too small");
  const double det_floor = 1e-12;
  WindingResult res;
  res.omega = omega;

  auto det = [&](double k) {
    Complex d = bloch_det(params, omega, k, pin_hopping_range);
    ++res.k_points_used;
    if (std::abs(d) < det_floor) throw GaplessPointError(std::abs(d));
    return d;
  };

  double total = 0.0;
  std::function<void(double, double, Complex, Complex, int)> accumulate =
      [&](double k0, double k1, Complex d0, Complex d1, int depth) {
        const double step = std::arg(d1 / d0);
        if (std::abs(step) <= 0.5 * pi || depth >= 20) {
          total += step;
          res.max_phase_step = std::max(res.max_phase_step, std::abs(step));
          return;
        }
        const double km = 0.5 * (k0 + k1);
        const Complex dm = det(km);
        accumulate(k0, km, d0, dm, depth + 1);
        accumulate(km, k1, dm, d1, depth + 1);
      };

  const double k_lo = -pi, k_hi = pi;
  Complex prev = det(k_lo);
  const Complex first = prev;
  for (int j = 1; j <= k_points; ++j) {
    const double k = (j == k_points) ? k_hi : k_lo + (k_hi - k_lo) * j / k_points;
    Complex cur = (j == k_points) ? first : det(k);  // H(k) is 2pi-periodic
    accumulate(k_lo + (k_hi - k_lo) * (j - 1) / k_points, k, prev, cur, 0);
    prev = cur;
  }

  res.raw_integral = total / (2.0 * pi);
  res.nu = static_cast<int>(std::lround(res.raw_integral));
  res.quantized = std::abs(res.raw_integral - res.nu) < 0.01;
  return res;
}

DoubledMatrix doubled_matrix(const DynamicalMatrix& h, double omega) {
  const int dim = static_cast<int>(h.entries.rows());
  Matrix a = Complex(omega, 0.0) * Matrix::Identity(dim, dim) - h.entries;
  Matrix m = Matrix::Zero(2 * dim, 2 * dim);
  m.topRightCorner(dim, dim) = a;
  m.bottomLeftCorner(dim, dim) = a.adjoint();
  return DoubledMatrix{omega, std::move(m)};
}

std::string to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::AIII: return "AIII";
    case SymmetryClass::BDI: return "BDI";
    case SymmetryClass::CI: return "CI";
  }
  return "?";
}

namespace {

using Matrix4 = Eigen::Matrix4cd;

// sigma (x) tau, sigma acting on the Nambu index (outer factor).
Matrix4 kron22(const Matrix2& s, const Matrix2& t) {
  Matrix4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m.block<2, 2>(2 * i, 2 * j) = s(i, j) * t;
  return m;
}

Matrix4 bloch_doubled(const ChainParams& p, double omega, double k) {
  Matrix2 h = bloch_entries_full_tail(p, k);
  Matrix2 a = omega * Matrix2::Identity() - h;
  Matrix2 tau_plus, tau_minus;
  tau_plus << 0, 1, 0, 0;
  tau_minus << 0, 0, 1, 0;
  return kron22(a, tau_plus) + kron22(a.adjoint().eval(), tau_minus);
}

const Matrix2 sigma_x = (Matrix2() << 0, 1, 1, 0).finished();
const Matrix2 sigma_y = (Matrix2() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
const Matrix2 sigma_z = (Matrix2() << 1, 0, 0, -1).finished();
const Matrix2 id2 = Matrix2::Identity();

void verify_relation(const ChainParams& p, double omega, const Matrix4& u,
                     int sign, const char* what) {
  for (double k : {0.31, -0.77, 1.45, 2.63, -2.11}) {
    Matrix4 lhs = u * bloch_doubled(p, omega, k).conjugate() * u.adjoint();
    Matrix4 rhs = static_cast<double>(sign) * bloch_doubled(p, omega, -k);
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-12)
      throw std::logic_error(std::string("symmetry_class: claimed relation failed: ") + what);
  }
}

}  // namespace

SymmetryClass symmetry_class(const ChainParams& params, double omega) {
  const double eps = 1e-12;
  const bool phi_trivial = std::abs(params.delta_phi) < eps ||
                           std::abs(std::abs(params.delta_phi) - pi) < eps;
  if (phi_trivial) {
    verify_relation(params, omega, kron22(sigma_z, sigma_x), +1, "CI time reversal");
    verify_relation(params, omega, kron22(sigma_z, sigma_y), -1, "CI charge conjugation");
    return SymmetryClass::CI;
  }
  if (std::abs(omega) < eps) {
    verify_relation(params, omega, kron22(sigma_x, sigma_z), +1, "BDI time reversal");
    verify_relation(params, omega, kron22(sigma_x, id2), -1, "BDI charge conjugation");
    return SymmetryClass::BDI;
  }
  return SymmetryClass::AIII;
}

std::string to_string(PhasePoint::Label l) {
  switch (l) {
    case PhasePoint::Label::TopologicalStable: return "topological-stable";
    case PhasePoint::Label::TopologicalUnstable: return "topological-unstable";
    case PhasePoint::Label::TrivialStable: return "trivial-stable";
    case PhasePoint::Label::TrivialUnstable: return "trivial-unstable";
    case PhasePoint::Label::Boundary: return "boundary";
  }
  return "?";
}

PhasePoint phase_point(const ChainParams& templ, double gamma, double delta_phi,
                       double omega, int k_points) {
  ChainParams p(templ.n_sites, templ.j_c, templ.delta, templ.g, gamma, delta_phi,
                templ.hopping_range);
  PhasePoint pt;
  pt.gamma = gamma;
  pt.delta_phi = p.delta_phi;
  pt.stable = stability(build_dynamical_matrix(p)).stable;
  try {
    WindingResult w = winding_number(p, omega, k_points);
    pt.nu = w.nu;
    if (!w.quantized) {
      pt.label = PhasePoint::Label::Boundary;
    } else if (pt.nu != 0) {
      pt.label = pt.stable ? PhasePoint::Label::TopologicalStable
                           : PhasePoint::Label::TopologicalUnstable;
    } else {
      pt.label = pt.stable ? PhasePoint::Label::TrivialStable
                           : PhasePoint::Label::TrivialUnstable;
    }
  } catch (const GaplessPointError&) {
    pt.label = PhasePoint::Label::Boundary;
  }
  return pt;
}

std::vector<PhasePoint> phase_diagram(const std::vector<double>& gammas,
                                      const std::vector<double>& delta_phis,
                                      const ChainParams& templ, double omega,
                                      int k_points) {
  if (gammas.empty() || delta_phis.empty())
    throw std::invalid_argument("phase_diagram: empty grid");
  std::vector<PhasePoint> out;
  out.reserve(gammas.size() * delta_phis.size());
  for (double gamma : gammas)
    for (double dphi : delta_phis)
      out.push_back(phase_point(templ, gamma, dphi, omega, k_points));
  return out;
}

}  // namespace parachain
