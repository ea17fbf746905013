#pragma once

#include <functional>
#include <vector>

#include "bsq/expr.hpp"

namespace bsq {

struct WellConfig {
  PhasePoint seed{};
  double e_min = 0.0;
  double e_max = 0.0;
  double level_tol = 1e-8;
  double closure_tol = 1e-7;
  double max_period = 1e3;
  double rk_tol = 1e-12;
  double grad_min = 1e-8;  // |grad p0| below this on the trajectory is a critical point
};

/// Real principal symbol with precompiled gradient and Hessian.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(const Expr& p0);

  double value(PhasePoint pt) const;
  /// Hamilton vector field: (dx/dt, dxi/dt) = (d_xi p0, -d_x p0).
  PhasePoint velocity(PhasePoint pt) const;
  /// Second time derivative of the trajectory through pt.
  PhasePoint acceleration(PhasePoint pt) const;
  /// Gradient (d_x p0, d_xi p0).
  PhasePoint gradient(PhasePoint pt) const;
  Jet jet(PhasePoint pt) const { return jets_(pt); }
  const Expr& expr() const { return jets_.expr(); }

 private:
  JetEvaluator jets_;
};

struct OrbitSample {
  double t = 0.0;
  PhasePoint pt{};
  PhasePoint vel{};
  PhasePoint acc{};
};

struct QuadNode {
  double t = 0.0;
  PhasePoint pt{};
  double weight = 0.0;
};

/// One traversal of a periodic orbit on {p0 = E}, stored as accepted integrator
/// steps with a quintic Hermite interpolant on each step.
class Orbit {
 public:
  Orbit(double energy, std::vector<OrbitSample> samples, OrbitSample closing);

  double energy() const { return energy_; }
  double period() const { return closing_.t; }
  double omega() const;
  PhasePoint start() const { return samples_.front().pt; }
  /// Samples with t in [0, T).
  const std::vector<OrbitSample>& samples() const { return samples_; }
  /// The trajectory point at t = T (equal to start() up to the closure gap).
  const OrbitSample& closing() const { return closing_; }
  double closure_gap() const;

  /// Position at time t, t reduced modulo the period.
  PhasePoint at(double t) const;

  /// Gauss-Legendre nodes on every step; sums of w*f integrate over one period.
  std::vector<QuadNode> gauss_nodes(int per_step = 5) const;
  /// Uniform nodes t_k = kT/n with trapezoid weights (spectral for periodic integrands).
  std::vector<QuadNode> uniform_nodes(int n) const;

 private:
  double energy_;
  std::vector<OrbitSample> samples_;
  OrbitSample closing_;
};

/// Newton-projects cfg.seed onto {p0 = E} and traces the periodic orbit through it.
Orbit find_orbit(const Hamiltonian& p0, double E, const WellConfig& cfg);

/// Traces the orbit through a point without projecting; E = p0(start).
Orbit trace_orbit(const Hamiltonian& p0, PhasePoint start, const WellConfig& cfg);

/// Throws OrbitError(critical_point), naming the critical value, if p0 has a
/// critical point in the annulus between the orbits at cfg.e_min and cfg.e_max.
void check_no_critical_points(const Hamiltonian& p0, const WellConfig& cfg);

/// Integrates the flow for a fixed time (negative times run backwards).
PhasePoint flow(const Hamiltonian& p0, PhasePoint start, double time, double rk_tol);

/// Loop integral of xi dx over one period.
double action_S0(const Orbit& orb, int nodes_per_step = 5);

/// Integral of f over one period of the flow (not divided by T).
Complex orbit_average(const Program& f, const Orbit& orb, int nodes_per_step = 5);
Complex orbit_average(const Expr& f, const Orbit& orb, int nodes_per_step = 5);
double orbit_average(const std::function<double(PhasePoint)>& f, const Orbit& orb, int nodes_per_step = 5);

/// Default energy step for d/dE.
double default_delta_e(double e_min, double e_max);

/// Central difference with one Richardson step from the values at
/// E - delta, E - delta/2, E + delta/2, E + delta (in that order).
double richardson_derivative(const std::array<double, 4>& values, double delta);

/// d/dE of g at E; throws WindowError if E +- delta leaves [e_min, e_max].
double d_dE(const std::function<double(double)>& g, double E, double delta, double e_min, double e_max);

}  // namespace bsq
