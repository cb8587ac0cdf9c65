#pragma once

#include <optional>
#include <stdexcept>

#include "parachain/model.hpp"

namespace parachain {

/// Thrown when the resolvent is requested at a quasi-zero singular value.
struct NearSingularError : std::runtime_error {
  double smallest_singular_value;
  explicit NearSingularError(double s)
      : std::runtime_error("probe at quasi-zero singular value"),
        smallest_singular_value(s) {}
};

struct UnstableSystemError : std::runtime_error {
  UnstableSystemError() : std::runtime_error("system is not stable, steady state undefined") {}
};

/// Resolvent (w - H)^{-1} with the signal (upper-left) / idler (upper-right)
/// block views of the Nambu structure.
struct GreensFunction {
  double omega = 0.0;
  Matrix entries;
  int n_sites = 0;

  auto signal() const { return entries.topLeftCorner(n_sites, n_sites); }
  auto idler() const { return entries.topRightCorner(n_sites, n_sites); }
};

struct SvdDiagnostics {
  Eigen::VectorXd singular_values;  // descending
  Matrix left_vectors;              // U
  Matrix right_vectors;             // V
  std::optional<int> edge_index;    // index into singular_values
  double gap_ratio = 0.0;           // s_min / s_next
  std::optional<double> localization_length;
  double localization_r2 = 0.0;
};

struct SteadyResponse {
  Vector alpha;      // signal amplitudes
  Vector alpha_bar;  // idler amplitudes
  double detuning = 0.0;
};

GreensFunction greens_function(const DynamicalMatrix& h, double omega);

SvdDiagnostics svd_of_inverse_propagator(const DynamicalMatrix& h, double omega,
                                         double edge_threshold = 0.1);

/// chi = ||G_N1| - |G_1N|| / (|G_N1| + |G_1N|) on the signal block.
double nonreciprocity(const GreensFunction& gf);

/// Squared Frobenius norm of the full Green's function.
double frobenius_gain(const GreensFunction& gf);

/// Steady coherent response (alpha, alpha_bar*) = -i G(delta_f) (eps, 0).
/// Requires a stable system.
SteadyResponse steady_response(const DynamicalMatrix& h, const Vector& drive,
                               double detuning);

}  // namespace parachain
