#include "parachain/dynamics.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "parachain/response.hpp"

namespace parachain {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::vector<Complex>;

struct CoherenceRhs {
  const Matrix& h;
  const Vector& eps;
  double detuning;

  void operator()(const State& v, State& dvdt, double t) const {
    const int dim = static_cast<int>(h.rows());
    const int n = dim / 2;
    Eigen::Map<const Vector> vm(v.data(), dim);
    Eigen::Map<Vector> dm(dvdt.data(), dim);
    dm = Complex(0.0, -1.0) * (h * vm);
    const Complex phase = std::exp(Complex(0.0, -detuning * t));
    dm.head(n) -= eps * phase;
    dm.tail(n) -= eps.conjugate() * std::conj(phase);
  }
};

}  // namespace

Trajectory integrate_coherences(const DynamicalMatrix& h, const DriveSpec& drive,
                                double t_end, const Vector& initial,
                                double rel_tolerance, double sample_dt) {
  const int n = h.n_sites;
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_coherences: t_end must be > 0");
  if (drive.amplitudes.size() != n)
    throw std::invalid_argument("integrate_coherences: drive size must equal n_sites");

  State v(2 * n, Complex(0.0, 0.0));
  if (initial.size() != 0) {
    if (initial.size() != 2 * n)
      throw std::invalid_argument("integrate_coherences: initial size must be 2N");
    Eigen::Map<Vector>(v.data(), 2 * n) = initial;
  }

  CoherenceRhs rhs{h.entries, drive.amplitudes, drive.detuning};
  Trajectory traj;
  auto observe = [&](const State& s, double t) {
    traj.times.push_back(t);
    traj.coherences.emplace_back(Eigen::Map<const Vector>(s.data(), 2 * n));
  };

  const double abs_tol = 1e-12;
  try {
    if (sample_dt > 0.0) {
      auto stepper = ode::make_dense_output(abs_tol, rel_tolerance,
                                            ode::runge_kutta_dopri5<State>());
      ode::integrate_const(stepper, rhs, v, 0.0, t_end, sample_dt, observe);
    } else {
      auto stepper = ode::make_controlled(abs_tol, rel_tolerance,
                                          ode::runge_kutta_dopri5<State>());
      ode::integrate_adaptive(stepper, rhs, v, 0.0, t_end, t_end / 1024.0, observe);
    }
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("integrate_coherences: ") + e.what());
  }
  traj.converged = true;
  return traj;
}

namespace {

// running window means of |a| and |a|^2 via prefix sums
struct Envelope {
  std::vector<double> position;   // sqrt(2 <|a|^2>_window)
  std::vector<double> coherence;  // <|a|>_window
};

Envelope window_envelopes(const std::vector<double>& times,
                          const std::vector<Complex>& a, double window) {
  const size_t m = times.size();
  std::vector<double> p1(m + 1, 0.0), p2(m + 1, 0.0);
  for (size_t i = 0; i < m; ++i) {
    p1[i + 1] = p1[i] + std::abs(a[i]);
    p2[i + 1] = p2[i] + std::norm(a[i]);
  }
  Envelope env;
  env.position.resize(m);
  env.coherence.resize(m);
  size_t lo = 0;
  for (size_t i = 0; i < m; ++i) {
    while (lo < i && times[i] - times[lo] > window) ++lo;
    const double cnt = static_cast<double>(i - lo + 1);
    env.coherence[i] = (p1[i + 1] - p1[lo]) / cnt;
    env.position[i] = std::sqrt(2.0 * (p2[i + 1] - p2[lo]) / cnt);
  }
  return env;
}

double tau_from_envelope(const std::vector<double>& times,
                         const std::vector<double>& env, double target) {
  // smallest t after which the envelope never drops below target again
  for (size_t i = env.size(); i-- > 0;) {
    if (env[i] < target) {
      if (i + 1 >= env.size()) return -1.0;
      return times[i + 1];
    }
  }
  return times.empty() ? -1.0 : times.front();
}

}  // namespace

RelaxationResult relaxation_time(const DynamicalMatrix& h, const DriveSpec& drive,
                                 int site, double t_end, double rel_tolerance) {
  const int n = h.n_sites;
  if (site < 1 || site > n) throw std::invalid_argument("relaxation_time: bad site");
  StabilityReport rep = stability(h);
  if (!rep.stable) throw UnstableSystemError();
  if (t_end <= 0.0) t_end = 100.0 / (-rep.margin);

  SteadyResponse ss = steady_response(h, drive.amplitudes, drive.detuning);
  const Complex alpha = ss.alpha(site - 1);
  const Complex alpha_bar = ss.alpha_bar(site - 1);
  const double pos_ss = std::sqrt(2.0 * (std::norm(alpha) + std::norm(alpha_bar)));
  if (pos_ss < 1e-300)
    throw std::invalid_argument("relaxation_time: steady amplitude vanishes at site");

  const double window = drive.detuning != 0.0 ? 2.0 * pi / std::abs(drive.detuning) : 0.0;
  double dt = t_end / 4096.0;
  if (window > 0.0) dt = std::min(dt, window / 64.0);

  Trajectory traj = integrate_coherences(h, drive, t_end, Vector(), rel_tolerance, dt);
  std::vector<Complex> a(traj.times.size());
  for (size_t i = 0; i < a.size(); ++i) a[i] = traj.coherences[i](site - 1);
  Envelope env = window_envelopes(traj.times, a, window);

  // steady coherence envelope: |alpha e^{-i d t} + abar e^{i d t}| averaged
  // over one beat period
  double coh_ss;
  if (drive.detuning != 0.0) {
    double acc = 0.0;
    const int samples = 512;
    for (int s = 0; s < samples; ++s) {
      const double ph = 2.0 * pi * s / samples;
      acc += std::abs(alpha * std::exp(Complex(0.0, -ph)) +
                      alpha_bar * std::exp(Complex(0.0, ph)));
    }
    coh_ss = acc / samples;
  } else {
    coh_ss = std::abs(alpha + alpha_bar);
  }

  RelaxationResult r;
  r.window = window;
  r.tau = tau_from_envelope(traj.times, env.position, 0.75 * pos_ss);
  r.tau_coherence = tau_from_envelope(traj.times, env.coherence, 0.75 * coh_ss);
  if (r.tau < 0.0 || r.tau_coherence < 0.0)
    throw IntegrationError("relaxation_time: no convergence within t_end, last ratio " +
                           std::to_string(env.position.back() / pos_ss));
  return r;
}

namespace {

struct CorrelationRhs {
  const Matrix& hc;  // H*
  const Matrix& ht;  // H^T
  const Matrix& d;

  void operator()(const State& v, State& dvdt, double) const {
    const int dim = static_cast<int>(hc.rows());
    Eigen::Map<const Matrix> c(v.data(), dim, dim);
    Eigen::Map<Matrix> out(dvdt.data(), dim, dim);
    out = Complex(0.0, 1.0) * (hc * c) - Complex(0.0, 1.0) * (c * ht) + d;
  }
};

}  // namespace

CorrelationTrajectory integrate_correlations(const DynamicalMatrix& h, double gamma,
                                             double t_end, double rel_tolerance) {
  const int n = h.n_sites;
  const int dim = 2 * n;
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_correlations: t_end must be > 0");

  Matrix hc = h.entries.conjugate();
  Matrix ht = h.entries.transpose();
  Matrix d = Matrix::Zero(dim, dim);
  d.bottomRightCorner(n, n) = gamma * Matrix::Identity(n, n);

  State v(dim * dim, Complex(0.0, 0.0));
  {
    Eigen::Map<Matrix> c0(v.data(), dim, dim);
    c0.bottomRightCorner(n, n) = Matrix::Identity(n, n);  // vacuum
  }

  CorrelationRhs rhs{hc, ht, d};
  CorrelationTrajectory traj;
  auto observe = [&](const State& s, double t) {
    Eigen::Map<const Matrix> c(s.data(), dim, dim);
    traj.times.push_back(t);
    traj.total_phonons.push_back(c.topLeftCorner(n, n).real().trace());
  };

  try {
    auto stepper = ode::make_controlled(1e-12, rel_tolerance,
                                        ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, v, 0.0, t_end, t_end / 1024.0, observe);
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("integrate_correlations: ") + e.what());
  }

  Eigen::Map<const Matrix> cf(v.data(), dim, dim);
  traj.final = CorrelationMatrix{cf, n};
  return traj;
}

}  // namespace parachain
