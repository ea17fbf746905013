#include "bsq/bsaction.hpp"

#include <cmath>
#include <numbers>

#include "bsq/error.hpp"

namespace bsq {

namespace {

constexpr double pi = std::numbers::pi;

Complex hessian_det(const JetEvaluator& p0, PhasePoint pt) {
  return p0.partial(pt, 2, 0) * p0.partial(pt, 0, 2) - p0.partial(pt, 1, 1) * p0.partial(pt, 1, 1);
}

struct SweepValues {
  std::array<double, 4> delta{};
  std::array<double, 4> p1_squared{};
  double imag = 0.0;
};

// Loop integrals of Delta and (Re p1)^2 on the four orbits of the Richardson
// stencil; both derivatives share the same orbits so orbit noise cancels.
SweepValues sweep(const Hamiltonian& H, const JetEvaluator& p0, const Program* p1, double E, double delta,
                  const WellConfig& well, int nps) {
  if (E - delta < well.e_min || E + delta > well.e_max)
    throw WindowError("d/dE stencil [" + std::to_string(E - delta) + ", " + std::to_string(E + delta) +
                      "] leaves the orbit window");
  SweepValues out;
  const double offs[4] = {-delta, -delta / 2, delta / 2, delta};
  for (int k = 0; k < 4; ++k) {
    Orbit o = find_orbit(H, E + offs[k], well);
    double d = 0.0, di = 0.0, q = 0.0;
    for (const QuadNode& n : o.gauss_nodes(nps)) {
      Complex det = hessian_det(p0, n.pt);
      d += n.weight * det.real();
      di += n.weight * det.imag();
      if (p1) {
        double r = p1->eval(n.pt).real();
        q += n.weight * r * r;
      }
    }
    out.delta[k] = d;
    out.p1_squared[k] = q;
    out.imag = std::max(out.imag, std::abs(di));
  }
  return out;
}

}  // namespace

double action_S1(const SymbolSeries& s, const Orbit& orb, int nodes_per_step) {
  return pi - orbit_average(s.coeff(1), orb, nodes_per_step).real();
}

double delta_term(const SymbolSeries& s, double E, const WellConfig& well, double delta_e) {
  Hamiltonian H(s.coeff(0));
  JetEvaluator p0(s.coeff(0), 2);
  SweepValues v = sweep(H, p0, nullptr, E, delta_e, well, 5);
  return richardson_derivative(v.delta, delta_e) / 24.0;
}

ActionEngine::ActionEngine(SymbolSeries s, WellConfig well, ActionOptions opt)
    : s_(std::move(s)),
      well_(well),
      opt_(opt),
      delta_(opt.delta_e > 0 ? opt.delta_e : default_delta_e(well.e_min, well.e_max)),
      H_(s_.coeff(0)),
      p0_(s_.coeff(0), 2),
      p1_(s_.coeff(1)),
      p2_(s_.coeff(2)),
      beta_(std::make_unique<BetaField>(s_, well, opt.stencil)) {}

double ActionEngine::S0_S1(double E, double h) const {
  Orbit orb = orbit(E);
  return action_S0(orb, opt_.nodes_per_step) + h * action_S1(s_, orb, opt_.nodes_per_step);
}

ActionSeries ActionEngine::series(double E) const {
  ActionSeries out;
  out.E = E;
  Orbit orb = orbit(E);
  out.period = orb.period();
  out.S0 = action_S0(orb, opt_.nodes_per_step);

  double re_p1 = 0.0, im_p1 = 0.0, im_p0 = 0.0, re_p2 = 0.0;
  for (const QuadNode& n : orb.gauss_nodes(opt_.nodes_per_step)) {
    Complex v1 = p1_.eval(n.pt);
    re_p1 += n.weight * v1.real();
    im_p1 += n.weight * v1.imag();
    im_p0 += n.weight * p0_.partial(n.pt, 0, 0).imag();
    re_p2 += n.weight * p2_.eval(n.pt).real();
  }
  if (std::abs(im_p1) > opt_.solvability_tol)
    throw Error(Status::verification_failed, "loop integral of Im p1 is " + std::to_string(im_p1) + " at E = " +
                                                 std::to_string(E) + "; beta0 does not exist");
  out.S1 = pi - re_p1;

  SweepValues sw = sweep(H_, p0_, p1_.is_constant_zero() ? nullptr : &p1_, E, delta_, well_, opt_.nodes_per_step);
  out.imag_residue = std::max({std::abs(im_p0), std::abs(im_p1), sw.imag});
  if (std::abs(im_p0) > opt_.imag_tol || sw.imag > opt_.imag_tol)
    throw DomainError("principal symbol is not real along the orbit at E = " + std::to_string(E));

  // Signs of the Delta and (Re p1)^2 terms are fixed by exact spectra: the
  // quartic oscillator and (hD)^2 + x^2 + hx = (hD)^2 + (x + h/2)^2 - h^2/4.
  out.terms.delta = -richardson_derivative(sw.delta, delta_) / 24.0;
  out.terms.p1_squared = 0.5 * richardson_derivative(sw.p1_squared, delta_);
  out.terms.double_bracket = double_bracket_term(*beta_, orb, opt_.loop_samples);
  out.terms.p2_bracket = -(re_p2 - 0.5 * out.terms.double_bracket);
  out.S2 = out.terms.delta + out.terms.p2_bracket + out.terms.p1_squared;
  out.S3 = 0.0;
  return out;
}

double action_S2(const ActionEngine& engine, double E) { return engine.S2(E); }

ActionSeries action_series(const SymbolSeries& s, double E, const WellConfig& well, const ActionOptions& opt) {
  return ActionEngine(s, well, opt).series(E);
}

}  // namespace bsq
