#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "bsq/bsaction.hpp"
#include "bsq/error.hpp"

using namespace bsq;
using std::numbers::pi;

namespace {

SymbolSeries series(std::vector<std::string> src) { return SymbolSeries::parse(src); }

WellConfig well(double lo = 0.2, double hi = 3.0) {
  WellConfig cfg;
  cfg.seed = {0, 1};
  cfg.e_min = lo;
  cfg.e_max = hi;
  return cfg;
}

ActionEngine engine(std::vector<std::string> src) {
  ActionOptions opt;
  opt.delta_e = 1e-3;
  return ActionEngine(series(src), well(), opt);
}

// Least-squares polynomial fit; returns the max residual.
double poly_fit_residual(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  Eigen::MatrixXd A(x.size(), degree + 1);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int k = 0; k <= degree; ++k) A(i, k) = std::pow(x[i], k);
    b(i) = y[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return (A * c - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("S1 is the Maslov term minus the loop integral of Re p1") {
  Hamiltonian H(parse_expr("xi^2 + x^2"));
  Orbit orb = find_orbit(H, 1.0, well());
  CHECK(action_S1(series({"xi^2 + x^2"}), orb) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(action_S1(series({"xi^2 + x^2", "i*x"}), orb) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(action_S1(series({"xi^2 + x^2", "1"}), orb) == doctest::Approx(pi - orb.period()).epsilon(1e-10));
  CHECK(action_S1(series({"xi^2 + x^2", "x"}), orb) == doctest::Approx(pi).epsilon(1e-10));
}

TEST_CASE("Delta term") {
  CHECK(std::abs(delta_term(series({"xi^2 + x^2"}), 1.0, well(), 1e-3)) < 1e-8);
  CHECK(std::abs(delta_term(series({"xi^2 + x^2"}), 2.3, well(), 1e-3)) < 1e-8);

  // xi^2 + x^4: Delta = 24 x^2. Fit the loop integral on a dense energy grid
  // and differentiate the fit.
  auto s = series({"xi^2 + x^4"});
  Hamiltonian H(s.coeff(0));
  std::vector<double> es, gs;
  for (int k = -6; k <= 6; ++k) {
    double e = 1.0 + 0.01 * k;
    Orbit o = find_orbit(H, e, well());
    es.push_back(e - 1.0);
    gs.push_back(orbit_average([](PhasePoint p) { return 24 * p.x * p.x; }, o));
  }
  Eigen::MatrixXd A(es.size(), 7);
  Eigen::VectorXd b(es.size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (int k = 0; k < 7; ++k) A(i, k) = std::pow(es[i], k);
    b(i) = gs[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  double fitted = c(1) / 24;
  // Energy scaling: the loop integral of x^2 grows like E^(1/4).
  double scaling = gs[6] / 4 / 24;
  CHECK(fitted == doctest::Approx(scaling).epsilon(1e-6));
  CHECK(delta_term(s, 1.0, well(), 1e-3) == doctest::Approx(fitted).epsilon(1e-6));
  CHECK(delta_term(s, 1.0, well(), 1e-3) == doctest::Approx(scaling).epsilon(1e-7));
}

TEST_CASE("S2 closed forms") {
  CHECK(std::abs(action_S2(engine({"xi^2 + x^2"}), 1.0)) < 1e-8);
  for (double E : {0.5, 1.0, 2.0})
    CHECK(action_S2(engine({"xi^2 + x^2", "i*x"}), E) == doctest::Approx(-pi / 4).epsilon(1e-8));
  CHECK(std::abs(action_S2(engine({"xi^2 + x^2", "1"}), 1.0)) < 1e-8);
  // Real p2 enters as minus its loop integral.
  CHECK(action_S2(engine({"xi^2 + x^2", "0", "3"}), 1.0) == doctest::Approx(-3 * pi).epsilon(1e-10));
  // Re p1 = x: (Re p1)^2 integrates to pi E / 2, giving +pi/4. This is the
  // exact action of xi^2 + (x + h/2)^2 - h^2/4 at order h^2.
  CHECK(action_S2(engine({"xi^2 + x^2", "x"}), 1.0) == doctest::Approx(pi / 4).epsilon(1e-8));
  // Quartic: S2 = -(1/24) d/dE int Delta dt.
  auto q = engine({"xi^2 + x^4"});
  CHECK(q.series(1.0).terms.delta == doctest::Approx(-delta_term(series({"xi^2 + x^4"}), 1.0, well(), 1e-3)).epsilon(1e-9));
  CHECK(q.S2(1.0) < 0);
}

TEST_CASE("action series assembly") {
  auto h = engine({"xi^2 + x^2"}).series(1.0);
  CHECK(h.S0 == doctest::Approx(pi).epsilon(1e-10));
  CHECK(h.S1 == doctest::Approx(pi).epsilon(1e-10));
  CHECK(std::abs(h.S2) < 1e-8);
  CHECK(h.S3 == 0.0);
  CHECK(h.period == doctest::Approx(pi).epsilon(1e-10));

  auto p = engine({"xi^2 + x^2", "i*x"}).series(1.0);
  CHECK(p.S0 == doctest::Approx(pi).epsilon(1e-10));
  CHECK(p.S1 == doctest::Approx(pi).epsilon(1e-10));
  CHECK(p.S2 == doctest::Approx(-pi / 4).epsilon(1e-8));
  CHECK(p.S3 == 0.0);
  CHECK(p.terms.double_bracket == doctest::Approx(-pi / 2).epsilon(1e-8));
  CHECK(std::abs(p.terms.delta) < 1e-8);
  CHECK(p.terms.delta + p.terms.p2_bracket + p.terms.p1_squared == doctest::Approx(p.S2).epsilon(1e-14));
  CHECK(p.imag_residue <= 1e-9);
}

TEST_CASE("imaginary residues stay below 1e-9 on test problems") {
  for (auto src : std::vector<std::vector<std::string>>{{"xi^2 + x^4", "i*x"},
                                                         {"xi^2 + x^2 + 0.3*x^4", "i*x^3 + 0.1*x^2", "i*x + x^2"},
                                                         {"xi^2 + 1 - cos(x)", "i*sin(x)"}}) {
    auto a = engine(src).series(0.8);
    CHECK(a.imag_residue <= 1e-9);
    CHECK(std::isfinite(a.S2));
  }
}

TEST_CASE("non-solvable Im p1 is reported") {
  try {
    engine({"xi^2 + x^2", "i*x^2"}).series(1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.status() == Status::verification_failed);
  }
}

TEST_CASE("gauge-equivalent presentations give the same action series") {
  // Q = (hD)^2 + p hD-symmetrized + q with p = 0.2 cos x, q = x^2, against
  // P = (hD)^2 + q - p^2/4 + ih p'/2; both share p1 = i p'/2.
  auto Q = engine({"xi^2 + 0.2*cos(x)*xi + x^2", "-0.1*i*sin(x)"});
  auto P = engine({"xi^2 + x^2 - 0.01*cos(x)^2", "-0.1*i*sin(x)"});
  for (double E : {0.7, 1.0, 1.6}) {
    auto a = Q.series(E), b = P.series(E);
    CHECK(std::abs(a.S0 - b.S0) < 1e-6);
    CHECK(std::abs(a.S1 - b.S1) < 1e-6);
    CHECK(std::abs(a.S2 - b.S2) < 1e-6);
  }
}

TEST_CASE("action coefficients are smooth in E") {
  for (auto src : {std::vector<std::string>{"xi^2 + x^2", "i*x"},
                   std::vector<std::string>{"xi^2 + 0.2*cos(x)*xi + x^2", "-0.1*i*sin(x)"},
                   std::vector<std::string>{"xi^2 + x^2 + 0.1*x^4", "i*x", "0.5*cos(x)"}}) {
    CAPTURE(src[0]);
    auto eng = engine(src);
    std::vector<double> es, s0, s1, s2;
    for (int k = 0; k <= 8; ++k) {
      double e = 0.6 + 0.1 * k;
      auto a = eng.series(e);
      es.push_back(e);
      s0.push_back(a.S0);
      s1.push_back(a.S1);
      s2.push_back(a.S2);
    }
    CHECK(poly_fit_residual(es, s0, 4) <= 1e-4);
    CHECK(poly_fit_residual(es, s1, 4) <= 1e-4);
    CHECK(poly_fit_residual(es, s2, 4) <= 1e-4);
  }
}

TEST_CASE("quartic PT symbol: exact scaling of the coefficients") {
  // xi^2 + x^4 + ihx is homogeneous: S0 ~ E^{3/4}, S1 = pi, S2 ~ E^{-3/4}.
  auto eng = engine({"xi^2 + x^4", "i*x"});
  auto ref = eng.series(1.0);
  for (int k = 0; k <= 8; ++k) {
    double e = 0.6 + 0.1 * k;
    auto a = eng.series(e);
    CHECK(a.S0 == doctest::Approx(ref.S0 * std::pow(e, 0.75)).epsilon(1e-9));
    CHECK(a.S1 == doctest::Approx(pi).epsilon(1e-12));
    CHECK(a.S2 == doctest::Approx(ref.S2 * std::pow(e, -0.75)).epsilon(1e-6));
  }
}

TEST_CASE("d/dE stencil outside the window") {
  ActionOptions opt;
  opt.delta_e = 1e-2;
  ActionEngine eng(series({"xi^2 + x^2"}), well(0.2, 1.0), opt);
  CHECK_THROWS_AS(eng.series(0.995), WindowError);
}
