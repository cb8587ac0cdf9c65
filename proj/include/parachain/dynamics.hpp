#pragma once

#include <vector>

#include "parachain/model.hpp"
#include "parachain/steadystate.hpp"

namespace parachain {

/// Monochromatic drive in the rotating frame: eps_i e^{-i delta_f t}.
struct DriveSpec {
  Vector amplitudes;      // complex, units of J_c, phase carries psi_i
  double detuning = 0.0;  // delta_f in units of J_c
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> coherences;  // (a, adag) stacked, length 2N
  bool converged = false;
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integrates d/dt v = -i H v - (eps e^{-i d t}, eps* e^{+i d t}) from
/// `initial` (zero when empty). With sample_dt > 0 the trajectory is sampled
/// on a uniform grid, otherwise at the adaptive solver steps.
Trajectory integrate_coherences(const DynamicalMatrix& h, const DriveSpec& drive,
                                double t_end, const Vector& initial = Vector(),
                                double rel_tolerance = 1e-9,
                                double sample_dt = 0.0);

struct RelaxationResult {
  double tau = 0.0;            // position-envelope criterion (default)
  double tau_coherence = 0.0;  // |<a>|-envelope criterion
  double window = 0.0;         // averaging window used (2 pi / delta_f, or 0)
};

/// Smallest time after which the site's envelope stays within 75% of the
/// steady-state envelope. Envelopes are period-averaged over one beat period
/// when delta_f != 0.
RelaxationResult relaxation_time(const DynamicalMatrix& h, const DriveSpec& drive,
                                 int site, double t_end = -1.0,
                                 double rel_tolerance = 1e-9);

struct CorrelationTrajectory {
  std::vector<double> times;
  std::vector<double> total_phonons;  // trace of the normal block along the way
  CorrelationMatrix final;
};

/// Integrates dC/dt = i H* C - i C H^T + D from the vacuum; the slow second
/// oracle for lyapunov_steady_state.
CorrelationTrajectory integrate_correlations(const DynamicalMatrix& h, double gamma,
                                             double t_end,
                                             double rel_tolerance = 1e-9);

}  // namespace parachain
