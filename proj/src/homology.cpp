#include "bsq/homology.hpp"

#include <algorithm>
#include <cmath>

#include "bsq/error.hpp"

namespace bsq {

namespace {

double beta0_on(const Orbit& orb, const JetEvaluator& p1) {
  const double T = orb.period();
  double sum = 0.0;
  for (const QuadNode& q : orb.gauss_nodes()) sum += q.weight * (1.0 - q.t / T) * p1.partial(q.pt, 0, 0).imag();
  return sum;
}

std::pair<std::int64_t, std::int64_t> cache_key(PhasePoint p) {
  return {std::llround(p.x * 1e12), std::llround(p.xi * 1e12)};
}

}  // namespace

LoopCheck solvability_check(const std::function<double(PhasePoint)>& q, const Orbit& orb, double tol) {
  double v = orbit_average(q, orb);
  return {std::abs(v) <= tol, v};
}

LoopCheck solvability_check(const Expr& q, const Orbit& orb, double tol) {
  Program prog(q);
  return solvability_check([&](PhasePoint pt) { return prog.eval(pt).real(); }, orb, tol);
}

BetaField::BetaField(const SymbolSeries& s, WellConfig cfg, double stencil)
    : H_(s.coeff(0)), p1_(s.coeff(1), 1), cfg_(cfg), stencil_(stencil) {
  if (!(stencil > 0)) throw Error(Status::invalid_argument, "stencil step must be positive");
  im_p1_zero_ = s.coeff(1).is_real();
}

double BetaField::compute(PhasePoint rho) const {
  if (im_p1_zero_) return 0.0;
  return beta0_on(trace_orbit(H_, rho, cfg_), p1_);
}

double BetaField::value(PhasePoint rho) const {
  auto key = cache_key(rho);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  double v = compute(rho);
  std::unique_lock lock(mutex_);
  cache_.emplace(key, v);
  return v;
}

std::size_t BetaField::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

double BetaField::step_at(PhasePoint rho) const {
  PhasePoint g = H_.gradient(rho);
  return stencil_ / std::max(1.0, std::hypot(g.x, g.xi));
}

PhasePoint BetaField::gradient(PhasePoint rho) const {
  if (im_p1_zero_) return {0.0, 0.0};
  const double d = step_at(rho);
  auto partial = [&](double ex, double exi) {
    std::array<double, 4> v{};
    const double offs[4] = {-d, -d / 2, d / 2, d};
    for (int k = 0; k < 4; ++k) v[k] = value({rho.x + offs[k] * ex, rho.xi + offs[k] * exi});
    return richardson_derivative(v, d);
  };
  try {
    return {partial(1, 0), partial(0, 1)};
  } catch (const WindowError& e) {
    throw WindowError(std::string("beta0 stencil leaves the energy window: ") + e.what());
  }
}

double solve_beta0(const SymbolSeries& s, const Orbit& orb, PhasePoint rho, const WellConfig& cfg,
                   double solvability_tol) {
  JetEvaluator p1(s.coeff(1), 0);
  auto check = solvability_check([&](PhasePoint pt) { return p1.partial(pt, 0, 0).imag(); }, orb, solvability_tol);
  if (!check.pass)
    throw Error(Status::verification_failed,
                "loop integral of Im p1 is " + std::to_string(check.value) + "; beta0 does not exist");
  Hamiltonian H(s.coeff(0));
  return beta0_on(trace_orbit(H, rho, cfg), p1);
}

double double_bracket_term(const BetaField& bf, const Orbit& orb, int samples) {
  if (bf.trivial()) return 0.0;
  double sum = 0.0;
  for (const QuadNode& q : orb.uniform_nodes(samples)) {
    double qx = bf.p1().partial(q.pt, 1, 0).imag();
    double qxi = bf.p1().partial(q.pt, 0, 1).imag();
    if (qx == 0.0 && qxi == 0.0) continue;
    PhasePoint gb = bf.gradient(q.pt);
    sum += q.weight * (qxi * gb.x - qx * gb.xi);
  }
  return sum;
}

LoopCheck beta1_compat_check(const SymbolSeries& s, const BetaField& bf, const Orbit& orb, double tol,
                             int samples) {
  Program p2(s.coeff(2));
  double sum = 0.0;
  for (const QuadNode& q : orb.uniform_nodes(samples)) {
    double f = p2.eval(q.pt).imag();
    double rx = bf.p1().partial(q.pt, 1, 0).real();
    double rxi = bf.p1().partial(q.pt, 0, 1).real();
    if (rx != 0.0 || rxi != 0.0) {
      PhasePoint gb = bf.gradient(q.pt);
      f -= gb.xi * rx - gb.x * rxi;  // {beta0, Re p1}
    }
    sum += q.weight * f;
  }
  return {std::abs(sum) <= tol, sum};
}

}  // namespace bsq
