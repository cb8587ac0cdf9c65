#pragma once

#include "parachain/model.hpp"
#include "parachain/response.hpp"

namespace parachain {

struct StabilityReport {
  Eigen::VectorXcd eigenvalues;  // the 2N eigenvalues of H
  bool stable = false;
  bool marginal = false;
  double margin = 0.0;  // max_mu Im(lambda_mu)
  double eigenvector_condition = 0.0;  // only filled when requested
};

/// Steady-state second moments C_{mu nu} = <adag_mu a_nu> in the Nambu basis,
/// with N (normal) and M (anomalous) block views.
struct CorrelationMatrix {
  Matrix entries;
  int n_sites = 0;

  auto normal_block() const { return entries.topLeftCorner(n_sites, n_sites); }
  auto anomalous_block() const { return entries.topRightCorner(n_sites, n_sites); }
};

/// with_condition additionally computes cond(V) of the eigenvector matrix
/// (an SVD, the expensive part); sweeps that only need stable/margin skip it.
StabilityReport stability(const DynamicalMatrix& h, double tolerance = 1e-10,
                          bool with_condition = false);

/// Closed-form steady state of i H* C - i C H^T + D = 0 with
/// D = diag(0, gamma 1), through the eigendecomposition of H. Falls back to a
/// Schur (Bartels-Stewart) solve when the eigenvector matrix is ill-conditioned.
CorrelationMatrix lyapunov_steady_state(const DynamicalMatrix& h, double gamma,
                                        double stability_tolerance = 1e-10,
                                        double condition_threshold = 1e8);

/// Independent oracle: C = int dw/2pi G*(w) diag(0, gamma 1) G^T(w) by adaptive
/// quadrature over [-Omega, Omega] with an analytic tail correction.
CorrelationMatrix correlation_integral_oracle(const DynamicalMatrix& h, double gamma,
                                              double omega_max,
                                              double quad_tolerance = 1e-8);

/// diag of the normal block, imaginary parts discarded after a consistency check.
Eigen::VectorXd phonon_numbers(const CorrelationMatrix& c);

}  // namespace parachain
