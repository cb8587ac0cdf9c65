#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "parachain/model.hpp"

namespace parachain {

struct GaplessPointError : std::runtime_error {
  double min_abs_det;
  explicit GaplessPointError(double d)
      : std::runtime_error("gapless point: det(w - H(k)) below threshold"),
        min_abs_det(d) {}
};

struct WindingResult {
  double omega = 0.0;
  int nu = 0;
  double raw_integral = 0.0;
  int k_points_used = 0;
  double max_phase_step = 0.0;
  bool quantized = true;
};

/// Winding of arg det(w - H(k)) over the Brillouin zone, with adaptive
/// bisection of any interval whose phase step exceeds pi/2. Uses the full
/// dipolar tail unless pin_hopping_range is set.
WindingResult winding_number(const ChainParams& params, double omega,
                             int k_points = 2048, bool pin_hopping_range = false);

/// Hermitian 4N x 4N matrix [[0, w-H], [w-Hdag, 0]], chiral-symmetric by
/// construction; its eigensystem reproduces the SVD of w - H.
struct DoubledMatrix {
  double omega = 0.0;
  Matrix entries;
};

DoubledMatrix doubled_matrix(const DynamicalMatrix& h, double omega);

enum class SymmetryClass { AIII, BDI, CI };
std::string to_string(SymmetryClass c);

/// Tenfold-way class of the Bloch doubled matrix; verifies the defining
/// U_T / U_C relations numerically on a k-sample.
SymmetryClass symmetry_class(const ChainParams& params, double omega);

struct PhasePoint {
  double gamma = 0.0;
  double delta_phi = 0.0;
  int nu = 0;
  bool stable = false;
  enum class Label {
    TopologicalStable,
    TopologicalUnstable,
    TrivialStable,
    TrivialUnstable,
    Boundary
  } label = Label::TrivialStable;
};

std::string to_string(PhasePoint::Label l);

/// Winding (Bloch, full tail) + finite-chain stability at the template's N
/// for one (gamma, delta_phi) coordinate; gapless points come back Boundary.
PhasePoint phase_point(const ChainParams& templ, double gamma, double delta_phi,
                       double omega, int k_points = 2048);

/// Per-point winding (Bloch, full tail) + finite-chain stability at the
/// template's N; gapless points come back labeled Boundary.
std::vector<PhasePoint> phase_diagram(const std::vector<double>& gammas,
                                      const std::vector<double>& delta_phis,
                                      const ChainParams& templ, double omega,
                                      int k_points = 2048);

}  // namespace parachain
