#include "bsq/verify.hpp"

#include <cmath>
#include <sstream>

#include "bsq/error.hpp"

namespace bsq {

using namespace moyal;

namespace {

double magnitude(const QC& c) { return std::hypot(c.re.get_d(), c.im.get_d()); }

double largest(const Residual& r) {
  double m = 0.0;
  for (const auto& o : r.offending) m = std::max(m, magnitude(o.value));
  return m;
}

CheckResult exact_check(std::string name, const std::vector<Residual>& rs) {
  CheckResult c(std::move(name));
  for (const auto& r : rs) {
    if (r.exact) continue;
    double m = largest(r);
    if (c.pass || m > c.residual) c.detail = r.report(6);
    c.pass = false;
    c.residual = std::max(c.residual, m);
  }
  return c;
}

// Residual restricted to a range of h-powers.
Residual levels(const Residual& r, int from, int to) {
  HPoly lhs(r.diff.order()), zero(r.diff.order());
  for (int j = from; j <= std::min(to, r.diff.order()); ++j) lhs[j] = r.diff[j];
  return residual(lhs, zero);
}

std::string point(PhasePoint p) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p.x << ", " << p.xi << ")";
  return os.str();
}

}  // namespace

std::vector<CheckResult> moyal_suite(const VerifyOptions& opt) {
  const Orientation o = opt.orientation;
  const int K = 4;
  std::mt19937 g(opt.seed);
  auto none = std::make_shared<const Poly>();
  auto plain = [&](const Poly& p) { return weighted(none, 0, HPoly(p, K)); };
  std::vector<CheckResult> out;

  std::vector<Residual> unit, assoc, comm;
  for (int k = 0; k < opt.instances; ++k) {
    Poly a = random_poly(g, 3), b = random_poly(g, 3), c = random_poly(g, 3);
    auto one = plain(Poly(QC(1)));
    unit.push_back(residual(star(one, plain(a), K, o).body, HPoly(a, K)));
    unit.push_back(residual(star(plain(a), one, K, o).body, HPoly(a, K)));
    assoc.push_back(residual(star(star(plain(a), plain(b), K, o), plain(c), K, o).body,
                             star(plain(a), star(plain(b), plain(c), K, o), K, o).body));
    auto gen = std::make_shared<const Poly>(random_poly(g, 2, true));
    auto A = weighted(gen, 1, HPoly(random_poly(g, 2), K));
    auto B = weighted(gen, -2, HPoly(random_poly(g, 2), K));
    auto C = weighted(gen, 1, HPoly(random_poly(g, 2), K));
    assoc.push_back(residual(star(star(A, B, K, o), C, K, o).body, star(A, star(B, C, K, o), K, o).body));
    // a#b - b#a = -ih {a,b} + O(h^3)
    HPoly lhs = star(plain(a), plain(b), K, o).body - star(plain(b), plain(a), K, o).body;
    HPoly rhs(K);
    rhs[1] = QC(0, -1) * bracket(a, b);
    comm.push_back(levels(residual(lhs, rhs), 0, 2));
  }
  out.push_back(exact_check("star_unit", unit));
  out.push_back(exact_check("star_associativity", assoc));
  out.push_back(exact_check("star_commutator_bracket", comm));

  // Hand-evaluated instance: beta0 = xi/2, p = x gives x - ih/2.
  {
    HPoly want(Poly::x(), K);
    want[1] = Poly(QC(0, mpq_class(-1, 2)));
    auto half_xi = QC(mpq_class(1, 2)) * Poly::xi();
    out.push_back(exact_check("conjugation_example", {residual(conjugate(half_xi, HPoly(Poly::x(), K), K, o), want)}));
  }

  std::vector<Residual> low, high;
  for (int k = 0; k < opt.instances; ++k) {
    Poly b = random_poly(g, 3, true);
    HPoly p(random_poly(g, 3), K);
    Residual r = check_conjugation(b, p, o);
    low.push_back(levels(r, 0, 2));
    high.push_back(levels(r, 3, 4));
  }
  out.push_back(exact_check("conjugation_h0_h2", low));
  out.push_back(exact_check("conjugation_h3_h4_R5_R8", high));

  std::vector<Residual> display;
  for (int k = 0; k < opt.instances; ++k) {
    std::array<Poly, 4> betas{random_poly(g, 2, true), random_poly(g, 2, true), random_poly(g, 2, true),
                              random_poly(g, 2, true)};
    std::array<Poly, 4> re{random_poly(g, 2, true), random_poly(g, 2, true), random_poly(g, 2, true),
                           random_poly(g, 2, true)};
    display.push_back(verify_order4_display(betas, display_instance(betas, random_poly(g, 2, true), re), o));
  }
  out.push_back(exact_check("order4_display", display));
  return out;
}

std::vector<CheckResult> problem_suite(const ActionEngine& engine, double e_lo, double e_hi,
                                       const VerifyOptions& opt) {
  const SymbolSeries& s = engine.symbol();
  const double tol = engine.options().solvability_tol;
  std::vector<CheckResult> out;

  std::vector<double> energies;
  std::vector<Orbit> orbits;
  std::vector<PhasePoint> samples;
  for (int k = 1; k <= 3; ++k) {
    double E = e_lo + k * (e_hi - e_lo) / 4;
    energies.push_back(E);
    orbits.push_back(engine.orbit(E));
    for (const auto& q : orbits.back().uniform_nodes(16)) samples.push_back(q.pt);
  }

  {
    auto r = check_principal_real(s, samples, 1e-12);
    CheckResult c("principal_real", r.pass, r.worst_imag);
    if (!r.pass) c.detail = "Im p0 at " + point(r.witness);
    out.push_back(c);
  }
  {
    auto r = check_pt_symmetry(s, samples, opt.pt_tol);
    CheckResult c("pt_symmetry", r.pass);
    for (const auto& v : r.per_coeff) {
      c.residual = std::max(c.residual, v.worst);
      if (v.worst > opt.pt_tol) {
        std::ostringstream os;
        os.precision(6);
        os << (c.detail.empty() ? "" : "; ") << "p" << v.coeff << " breaks p(-x,xi) = conj p(x,xi) by " << v.worst
           << " at " << point(v.witness);
        c.detail += os.str();
      }
    }
    out.push_back(c);
  }

  bool solvable = true;
  {
    CheckResult c("solvability");
    Program p1(s.coeff(1));
    for (std::size_t k = 0; k < orbits.size(); ++k) {
      auto r = solvability_check([&](PhasePoint pt) { return p1.eval(pt).imag(); }, orbits[k], tol);
      c.residual = std::max(c.residual, std::abs(r.value));
      if (!r.pass) {
        c.pass = false;
        std::ostringstream os;
        os.precision(6);
        os << (c.detail.empty() ? "" : "; ") << "loop integral of Im p1 = " << r.value << " at E = " << energies[k];
        c.detail += os.str();
      }
    }
    solvable = c.pass;
    out.push_back(c);
  }
  {
    CheckResult c("beta1_compatibility");
    if (!solvable) {
      c.skipped = true;
      c.detail = "needs a solvable first-order equation";
    } else {
      for (std::size_t k = 0; k < orbits.size(); ++k) {
        auto r = beta1_compat_check(s, engine.beta(), orbits[k], tol, engine.options().loop_samples);
        c.residual = std::max(c.residual, std::abs(r.value));
        if (!r.pass) {
          c.pass = false;
          std::ostringstream os;
          os.precision(6);
          os << (c.detail.empty() ? "" : "; ") << "residual " << r.value << " at E = " << energies[k];
          c.detail += os.str();
        }
      }
    }
    out.push_back(c);
  }
  {
    CheckResult c("period_identity");
    const double E = energies[1];
    double dS0 = d_dE([&](double e) { return engine.S0(e); }, E, engine.delta_e(), engine.well().e_min,
                      engine.well().e_max);
    double T = orbits[1].period();
    c.residual = std::abs(dS0 - T) / T;
    c.pass = c.residual <= opt.period_tol;
    if (!c.pass) c.detail = "S0'(E) = " + std::to_string(dS0) + ", T = " + std::to_string(T);
    out.push_back(c);
  }
  return out;
}

bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace bsq
