#include "parachain/steadystate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace parachain {

StabilityReport stability(const DynamicalMatrix& h, double tolerance,
                          bool with_condition) {
  Eigen::ComplexEigenSolver<Matrix> es(h.entries, with_condition);
  StabilityReport r;
  r.eigenvalues = es.eigenvalues();
  r.margin = r.eigenvalues.imag().maxCoeff();
  r.stable = r.margin < -tolerance;
  r.marginal = std::abs(r.margin) <= tolerance;
  if (with_condition) {
    Eigen::JacobiSVD<Matrix> svd(es.eigenvectors());
    const double s_min = svd.singularValues()(svd.singularValues().size() - 1);
    r.eigenvector_condition = s_min > 0.0 ? svd.singularValues()(0) / s_min
                                          : std::numeric_limits<double>::infinity();
  }
  return r;
}

namespace {

Matrix dissipation_matrix(int n, double gamma) {
  Matrix d = Matrix::Zero(2 * n, 2 * n);
  d.bottomRightCorner(n, n) = gamma * Matrix::Identity(n, n);
  return d;
}

// Solve A X + X B = E by complex Schur reduction of both coefficients.
Matrix sylvester_solve(const Matrix& a, const Matrix& b, const Matrix& e) {
  Eigen::ComplexSchur<Matrix> sa(a), sb(b);
  const Matrix& ta = sa.matrixT();
  const Matrix& tb = sb.matrixT();
  const Matrix& qa = sa.matrixU();
  const Matrix& qb = sb.matrixU();
  Matrix f = qa.adjoint() * e * qb;
  const int m = static_cast<int>(a.rows());
  Matrix y = Matrix::Zero(m, m);
  Matrix lhs(m, m);
  for (int j = 0; j < m; ++j) {
    Vector rhs = f.col(j);
    if (j > 0) rhs -= y.leftCols(j) * tb.block(0, j, j, 1);
    lhs = ta + tb(j, j) * Matrix::Identity(m, m);
    y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  return qa * y * qb.adjoint();
}

}  // namespace

CorrelationMatrix lyapunov_steady_state(const DynamicalMatrix& h, double gamma,
                                        double stability_tolerance,
                                        double condition_threshold) {
  const int n = h.n_sites;
  StabilityReport rep = stability(h, stability_tolerance, /*with_condition=*/true);
  if (!rep.stable) throw UnstableSystemError();

  const Matrix d = dissipation_matrix(n, gamma);
  Matrix c;
  if (rep.eigenvector_condition <= condition_threshold) {
    Eigen::ComplexEigenSolver<Matrix> es(h.entries, true);
    const Matrix& v = es.eigenvectors();
    Matrix vi = v.partialPivLu().solve(Matrix::Identity(2 * n, 2 * n));
    Matrix d_t = vi.conjugate() * d * vi.transpose();
    Matrix c_t(2 * n, 2 * n);
    for (int mu = 0; mu < 2 * n; ++mu)
      for (int nu = 0; nu < 2 * n; ++nu) {
        Complex denom = Complex(0.0, 1.0) *
                        (std::conj(es.eigenvalues()(mu)) - es.eigenvalues()(nu));
        c_t(mu, nu) = -d_t(mu, nu) / denom;
      }
    c = v.conjugate() * c_t * v.transpose();
  } else {
    // near-defective H: i H* C - i C H^T = -D as a Sylvester problem
    Matrix a = Complex(0.0, 1.0) * h.entries.conjugate();
    Matrix b = Complex(0.0, -1.0) * h.entries.transpose();
    c = sylvester_solve(a, b, -d);
  }
  c = 0.5 * (c + c.adjoint()).eval();  // exact solution is Hermitian
  return CorrelationMatrix{std::move(c), n};
}

namespace {

struct OracleIntegrand {
  const Matrix& h;
  const Matrix& d;
  int dim;

  Matrix operator()(double w) const {
    Matrix a = Complex(w, 0.0) * Matrix::Identity(dim, dim) - h;
    Matrix g = a.partialPivLu().solve(Matrix::Identity(dim, dim));
    return (g.conjugate() * d * g.transpose()) / (2.0 * pi);
  }
};

void adaptive_simpson(const OracleIntegrand& f, double a, double b, const Matrix& fa,
                      const Matrix& fm, const Matrix& fb, const Matrix& whole,
                      double tol, int depth, Matrix& acc) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  Matrix flm = f(lm), frm = f(rm);
  Matrix left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  Matrix right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  Matrix diff = left + right - whole;
  if (depth <= 0 || diff.cwiseAbs().maxCoeff() < 15.0 * tol) {
    acc += left + right + diff / 15.0;
    return;
  }
  adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc);
  adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}

}  // namespace

CorrelationMatrix correlation_integral_oracle(const DynamicalMatrix& h, double gamma,
                                              double omega_max, double quad_tolerance) {
  const int n = h.n_sites;
  const int dim = 2 * n;
  StabilityReport rep = stability(h);
  if (!rep.stable) throw UnstableSystemError();

  const double lam_max = rep.eigenvalues.cwiseAbs().maxCoeff();
  const double omega_cap = std::max(omega_max, 50.0 * std::max(lam_max, 1.0));
  const Matrix d = dissipation_matrix(n, gamma);
  OracleIntegrand f{h.entries, d, dim};

  // breakpoints at eigenvalue real parts, then geometric panels out to the cap
  std::vector<double> pts;
  for (int mu = 0; mu < dim; ++mu) pts.push_back(rep.eigenvalues(mu).real());
  const double inner = std::max(1.0, 2.0 * lam_max);
  pts.push_back(-inner);
  pts.push_back(inner);
  for (double b = 2.0 * inner; b < omega_cap; b *= 2.0) {
    pts.push_back(b);
    pts.push_back(-b);
  }
  pts.push_back(omega_cap);
  pts.push_back(-omega_cap);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  Matrix c = Matrix::Zero(dim, dim);
  const double tol_abs = quad_tolerance * std::max(1.0, gamma);
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    Matrix fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    Matrix whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(f, a, b, fa, fm, fb, whole,
                     tol_abs * (b - a) / (2.0 * omega_cap), 40, c);
  }

  // analytic tail: G(w) ~ 1/w + H/w^2 + ... gives
  //   int_{|w|>W} = D/(pi W) + (H*^2 D + H* D H^T + D H^T^2)/(3 pi W^3) + O(W^-5)
  const Matrix hc = h.entries.conjugate();
  const Matrix ht = h.entries.transpose();
  c += d / (pi * omega_cap);
  c += (hc * hc * d + hc * d * ht + d * ht * ht) /
       (3.0 * pi * omega_cap * omega_cap * omega_cap);
  Eigen::JacobiSVD<Matrix> svd(h.entries);
  const double hnorm = svd.singularValues()(0);
  const double tail_err = hnorm * hnorm * hnorm * gamma * dim /
                          (pi * std::pow(omega_cap, 4.0));
  if (tail_err > quad_tolerance * std::max(1.0, gamma))
    throw std::runtime_error("correlation_integral_oracle: tail estimate exceeds tolerance");

  c = 0.5 * (c + c.adjoint()).eval();
  return CorrelationMatrix{std::move(c), n};
}

Eigen::VectorXd phonon_numbers(const CorrelationMatrix& c) {
  const int n = c.n_sites;
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) {
    Complex v = c.normal_block()(j, j);
    if (std::abs(v.imag()) > 1e-8 * (1.0 + std::abs(v.real())))
      throw std::runtime_error("phonon_numbers: non-real phonon number");
    out(j) = v.real();
  }
  return out;
}

}  // namespace parachain
