#include "parachain/response.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "parachain/steadystate.hpp"

namespace parachain {

GreensFunction greens_function(const DynamicalMatrix& h, double omega) {
  const int dim = static_cast<int>(h.entries.rows());
  Matrix a = Complex(omega, 0.0) * Matrix::Identity(dim, dim) - h.entries;
  Eigen::JacobiSVD<Matrix> svd(a);
  const double s_max = svd.singularValues()(0);
  const double s_min = svd.singularValues()(dim - 1);
  if (s_min <= 0.0 || s_max / s_min > 1e14) throw NearSingularError(s_min);
  Matrix g = a.partialPivLu().solve(Matrix::Identity(dim, dim));
  return GreensFunction{omega, std::move(g), h.n_sites};
}

namespace {

// Least-squares fit y = a + b x; returns {a, b, r2}.
struct LineFit {
  double intercept, slope, r2;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double fit = intercept + slope * x[i];
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return {intercept, slope, r2};
}

}  // namespace

SvdDiagnostics svd_of_inverse_propagator(const DynamicalMatrix& h, double omega,
                                         double edge_threshold) {
  const int dim = static_cast<int>(h.entries.rows());
  const int n = h.n_sites;
  Matrix a = Complex(omega, 0.0) * Matrix::Identity(dim, dim) - h.entries;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);

  SvdDiagnostics d;
  d.singular_values = svd.singularValues();
  d.left_vectors = svd.matrixU();
  d.right_vectors = svd.matrixV();
  const double s_min = d.singular_values(dim - 1);
  const double s_next = d.singular_values(dim - 2);
  d.gap_ratio = s_next > 0.0 ? s_min / s_next : 1.0;
  if (d.gap_ratio < edge_threshold) d.edge_index = dim - 1;

  if (d.edge_index) {
    // Site-resolved weight of the edge right-singular vector, Nambu-summed.
    std::vector<double> weight(n);
    double head = 0.0, tail = 0.0;
    for (int i = 0; i < n; ++i) {
      weight[i] = std::sqrt(std::norm(d.right_vectors(i, dim - 1)) +
                            std::norm(d.right_vectors(i + n, dim - 1)));
      (2 * i < n ? head : tail) += weight[i];
    }
    // Exponential fit of log-weight vs distance from the heavier edge.
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
      if (weight[i] < 1e-14) continue;
      xs.push_back(static_cast<double>(head >= tail ? i : n - 1 - i));
      ys.push_back(std::log(weight[i]));
    }
    if (xs.size() >= 3) {
      LineFit f = fit_line(xs, ys);
      d.localization_r2 = f.r2;
      if (f.slope < 0.0) d.localization_length = -1.0 / f.slope;
    }
  }
  return d;
}

double nonreciprocity(const GreensFunction& gf) {
  if (gf.n_sites < 2)
    throw std::invalid_argument("nonreciprocity: needs at least two sites");
  const double gn1 = std::abs(gf.signal()(gf.n_sites - 1, 0));
  const double g1n = std::abs(gf.signal()(0, gf.n_sites - 1));
  const double denom = gn1 + g1n;
  if (denom == 0.0)
    throw std::runtime_error("nonreciprocity: both end-to-end entries vanish");
  return std::abs(gn1 - g1n) / denom;
}

double frobenius_gain(const GreensFunction& gf) {
  return gf.entries.squaredNorm();
}

SteadyResponse steady_response(const DynamicalMatrix& h, const Vector& drive,
                               double detuning) {
  const int n = h.n_sites;
  if (drive.size() != n)
    throw std::invalid_argument("steady_response: drive size must equal n_sites");
  StabilityReport rep = stability(h);
  if (!rep.stable) throw UnstableSystemError();

  GreensFunction gf = greens_function(h, detuning);
  Vector rhs = Vector::Zero(2 * n);
  rhs.head(n) = drive;
  Vector v = Complex(0.0, -1.0) * (gf.entries * rhs);
  SteadyResponse r;
  r.alpha = v.head(n);
  r.alpha_bar = v.tail(n).conjugate();
  r.detuning = detuning;
  return r;
}

}  // namespace parachain
