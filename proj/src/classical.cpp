#include "bsq/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "bsq/error.hpp"

namespace bsq {

namespace {

constexpr double pi = std::numbers::pi;

PhasePoint operator+(PhasePoint a, PhasePoint b) { return {a.x + b.x, a.xi + b.xi}; }
PhasePoint operator-(PhasePoint a, PhasePoint b) { return {a.x - b.x, a.xi - b.xi}; }
PhasePoint operator*(double s, PhasePoint a) { return {s * a.x, s * a.xi}; }
double dot(PhasePoint a, PhasePoint b) { return a.x * b.x + a.xi * b.xi; }
double norm(PhasePoint a) { return std::hypot(a.x, a.xi); }

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepResult {
  PhasePoint y;
  PhasePoint k7;  // f(y), reusable as the next step's first stage
  double err;
};

StepResult dopri_step(const Hamiltonian& H, PhasePoint y, PhasePoint k1, double h, double tol) {
  PhasePoint k2 = H.velocity(y + h * (a21 * k1));
  PhasePoint k3 = H.velocity(y + h * (a31 * k1 + a32 * k2));
  PhasePoint k4 = H.velocity(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  PhasePoint k5 = H.velocity(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  PhasePoint k6 = H.velocity(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  PhasePoint y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  PhasePoint k7 = H.velocity(y5);
  PhasePoint e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  double sx = tol + tol * std::max(std::abs(y.x), std::abs(y5.x));
  double sxi = tol + tol * std::max(std::abs(y.xi), std::abs(y5.xi));
  double err = std::max(std::abs(e.x) / sx, std::abs(e.xi) / sxi);
  return {y5, k7, err};
}

double next_step(double h, double err) {
  double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
  return h * std::clamp(fac, 0.2, 5.0);
}

double wrap_angle(double a) {
  while (a > pi) a -= 2 * pi;
  while (a <= -pi) a += 2 * pi;
  return a;
}

double angle(PhasePoint v) { return std::atan2(v.xi, v.x); }

struct Hermite {
  const OrbitSample& a;
  const OrbitSample& b;

  PhasePoint value(double t) const {
    double hh = b.t - a.t;
    double s = (t - a.t) / hh;
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    double h3 = 10 * s3 - 15 * s4 + 6 * s5;
    double h4 = -4 * s3 + 7 * s4 - 3 * s5;
    double h5 = 0.5 * (s3 - 2 * s4 + s5);
    return h0 * a.pt + (hh * h1) * a.vel + (hh * hh * h2) * a.acc + h3 * b.pt + (hh * h4) * b.vel +
           (hh * hh * h5) * b.acc;
  }

  PhasePoint derivative(double t) const {
    double hh = b.t - a.t;
    double s = (t - a.t) / hh;
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    double d0 = -30 * s2 + 60 * s3 - 30 * s4;
    double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    double d2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    double d3 = 30 * s2 - 60 * s3 + 30 * s4;
    double d4 = -12 * s2 + 28 * s3 - 15 * s4;
    double d5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
    return (d0 / hh) * a.pt + d1 * a.vel + (hh * d2) * a.acc + (d3 / hh) * b.pt + d4 * b.vel +
           (hh * d5) * b.acc;
  }
};

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // nodes mapped to [0, 1]
    x[static_cast<std::size_t>(i)] = 0.5 * (1 - z);
    w[static_cast<std::size_t>(i)] = 1.0 / ((1 - z * z) * pp * pp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

}  // namespace

// ---------------------------------------------------------------------------

Hamiltonian::Hamiltonian(const Expr& p0) : jets_(p0, 2) {}

double Hamiltonian::value(PhasePoint pt) const { return jets_.partial(pt, 0, 0).real(); }

PhasePoint Hamiltonian::gradient(PhasePoint pt) const {
  return {jets_.partial(pt, 1, 0).real(), jets_.partial(pt, 0, 1).real()};
}

PhasePoint Hamiltonian::velocity(PhasePoint pt) const {
  return {jets_.partial(pt, 0, 1).real(), -jets_.partial(pt, 1, 0).real()};
}

PhasePoint Hamiltonian::acceleration(PhasePoint pt) const {
  Jet j = jets_(pt);
  PhasePoint v{j.re(0, 1), -j.re(1, 0)};
  return {j.re(1, 1) * v.x + j.re(0, 2) * v.xi, -(j.re(2, 0) * v.x + j.re(1, 1) * v.xi)};
}

// ---------------------------------------------------------------------------

Orbit::Orbit(double energy, std::vector<OrbitSample> samples, OrbitSample closing)
    : energy_(energy), samples_(std::move(samples)), closing_(closing) {
  if (samples_.empty() || closing_.t <= 0) throw Error(Status::internal, "orbit without samples");
}

double Orbit::omega() const { return 2 * pi / period(); }

double Orbit::closure_gap() const { return norm(closing_.pt - start()); }

PhasePoint Orbit::at(double t) const {
  double T = period();
  t = std::fmod(t, T);
  if (t < 0) t += T;
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double v, const OrbitSample& s) { return v < s.t; });
  std::size_t k = static_cast<std::size_t>(it - samples_.begin()) - 1;
  const OrbitSample& b = k + 1 < samples_.size() ? samples_[k + 1] : closing_;
  return Hermite{samples_[k], b}.value(t);
}

std::vector<QuadNode> Orbit::gauss_nodes(int per_step) const {
  const auto& [xs, ws] = gauss_legendre(per_step);
  std::vector<QuadNode> nodes;
  nodes.reserve(samples_.size() * xs.size());
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const OrbitSample& a = samples_[k];
    const OrbitSample& b = k + 1 < samples_.size() ? samples_[k + 1] : closing_;
    Hermite seg{a, b};
    double hh = b.t - a.t;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      double t = a.t + hh * xs[q];
      nodes.push_back({t, seg.value(t), hh * ws[q]});
    }
  }
  return nodes;
}

std::vector<QuadNode> Orbit::uniform_nodes(int n) const {
  std::vector<QuadNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  double T = period();
  for (int k = 0; k < n; ++k) {
    double t = T * k / n;
    nodes.push_back({t, at(t), T / n});
  }
  return nodes;
}

// ---------------------------------------------------------------------------

namespace {

void check_gradient(const Hamiltonian& H, PhasePoint pt, double E, const WellConfig& cfg) {
  if (norm(H.gradient(pt)) < cfg.grad_min)
    throw OrbitError(OrbitError::Kind::critical_point, E, "critical point encountered on the trajectory");
}

OrbitSample make_sample(const Hamiltonian& H, double t, PhasePoint pt) {
  return {t, pt, H.velocity(pt), H.acceleration(pt)};
}

}  // namespace

Orbit trace_orbit(const Hamiltonian& H, PhasePoint rho0, const WellConfig& cfg) {
  const double E = H.value(rho0);
  if (E < cfg.e_min || E > cfg.e_max)
    throw WindowError("orbit energy " + std::to_string(E) + " outside the energy window");
  check_gradient(H, rho0, E, cfg);

  std::vector<OrbitSample> samples;
  samples.push_back(make_sample(H, 0.0, rho0));
  const PhasePoint v0 = samples.front().vel;
  const PhasePoint normal = (1.0 / norm(v0)) * v0;

  double t = 0.0;
  PhasePoint y = rho0;
  PhasePoint k1 = v0;
  double hs = 1e-2 * (1.0 + norm(rho0)) / norm(v0);
  double g_old = 0.0;
  bool went_negative = false;
  double max_dist = 0.0;
  double winding = 0.0;

  for (;;) {
    if (t > cfg.max_period)
      throw OrbitError(OrbitError::Kind::no_return, E, "no return to the section within max_period");
    StepResult st = dopri_step(H, y, k1, hs, cfg.rk_tol);
    if (!(st.err <= 1.0)) {
      hs = std::isfinite(st.err) ? next_step(hs, st.err) : 0.25 * hs;
      continue;
    }
    const OrbitSample& prev = samples.back();
    OrbitSample cur = make_sample(H, t + hs, st.y);
    double turn = wrap_angle(angle(cur.vel) - angle(prev.vel));
    if (std::abs(turn) > pi / 4) {
      hs *= 0.5;
      continue;
    }
    if (norm(cur.vel) < cfg.grad_min)
      throw OrbitError(OrbitError::Kind::critical_point, E, "critical point encountered on the trajectory");
    if (std::abs(H.value(cur.pt) - E) > cfg.level_tol)
      throw OrbitError(OrbitError::Kind::level_drift, E, "trajectory drifted off the energy level");

    double g_new = dot(normal, cur.pt - rho0);
    double dist = norm(cur.pt - rho0);
    if (went_negative && g_old < 0 && g_new >= 0 && dist < 0.5 * max_dist) {
      // Locate the section crossing on the interpolant, then land on it with an exact step.
      Hermite seg{prev, cur};
      double lo = prev.t, hi = cur.t;
      double glo = g_old, ghi = g_new;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        double mid = lo - glo * (hi - lo) / (ghi - glo);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        double gm = dot(normal, seg.value(mid) - rho0);
        if (gm < 0) {
          lo = mid;
          glo = gm;
          ghi *= 0.5;  // Illinois modification
        } else {
          hi = mid;
          ghi = gm;
          glo *= 0.5;
        }
        if (gm == 0) break;
      }
      double tstar = std::abs(glo) < std::abs(ghi) ? lo : hi;
      if (tstar <= prev.t) tstar = 0.5 * (prev.t + hi);
      StepResult last = dopri_step(H, prev.pt, prev.vel, tstar - prev.t, cfg.rk_tol);
      OrbitSample closing = make_sample(H, tstar, last.y);
      winding += wrap_angle(angle(closing.vel) - angle(prev.vel));
      if (std::lround(std::abs(winding) / (2 * pi)) != 1)
        throw OrbitError(OrbitError::Kind::winding, E, "orbit does not wind once around the well");
      Orbit orb(E, std::move(samples), closing);
      if (orb.closure_gap() > cfg.closure_tol)
        throw OrbitError(OrbitError::Kind::closure, E,
                         "orbit closure gap " + std::to_string(orb.closure_gap()) + " exceeds closure_tol");
      return orb;
    }
    if (g_new < 0) went_negative = true;
    max_dist = std::max(max_dist, dist);
    winding += turn;
    g_old = g_new;
    t = cur.t;
    y = st.y;
    k1 = st.k7;
    samples.push_back(cur);
    hs = next_step(hs, st.err);
  }
}

Orbit find_orbit(const Hamiltonian& H, double E, const WellConfig& cfg) {
  if (E < cfg.e_min || E > cfg.e_max)
    throw WindowError("energy " + std::to_string(E) + " outside the energy window");
  PhasePoint rho = cfg.seed;
  const double target_tol = 1e-14 * std::max(1.0, std::abs(E));
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    PhasePoint g = H.gradient(rho);
    double g2 = dot(g, g);
    if (std::sqrt(g2) < cfg.grad_min)
      throw OrbitError(OrbitError::Kind::critical_point, E, "critical point at the projection seed");
    double r = H.value(rho) - E;
    if (std::abs(r) <= target_tol) {
      converged = true;
      break;
    }
    rho = rho - (r / g2) * g;
  }
  if (!converged && std::abs(H.value(rho) - E) > 10 * target_tol)
    throw OrbitError(OrbitError::Kind::projection_failed, E, "Newton projection onto the level set failed");
  return trace_orbit(H, rho, cfg);
}

PhasePoint flow(const Hamiltonian& H, PhasePoint y, double time, double rk_tol) {
  double t = 0.0;
  double dir = time < 0 ? -1.0 : 1.0;
  double span = std::abs(time);
  PhasePoint k1 = H.velocity(y);
  double hs = 1e-2 * (1.0 + norm(y)) / std::max(norm(k1), 1e-12);
  while (t < span) {
    double step = std::min(hs, span - t);
    StepResult st = dopri_step(H, y, k1, dir * step, rk_tol);
    if (!(st.err <= 1.0)) {
      hs = std::isfinite(st.err) ? next_step(step, st.err) : 0.25 * step;
      continue;
    }
    t += step;
    y = st.y;
    k1 = st.k7;
    hs = next_step(step, st.err);
  }
  return y;
}

// ---------------------------------------------------------------------------

double action_S0(const Orbit& orb, int nodes_per_step) {
  const auto& s = orb.samples();
  const auto& [xs, ws] = gauss_legendre(nodes_per_step);
  double total = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const OrbitSample& b = k + 1 < s.size() ? s[k + 1] : orb.closing();
    Hermite seg{s[k], b};
    double hh = b.t - s[k].t;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      double t = s[k].t + hh * xs[q];
      total += hh * ws[q] * seg.value(t).xi * seg.derivative(t).x;
    }
  }
  return total;
}

Complex orbit_average(const Program& f, const Orbit& orb, int nodes_per_step) {
  Complex total{};
  for (const auto& n : orb.gauss_nodes(nodes_per_step)) total += n.weight * f.eval(n.pt);
  return total;
}

Complex orbit_average(const Expr& f, const Orbit& orb, int nodes_per_step) {
  return orbit_average(Program(f), orb, nodes_per_step);
}

double orbit_average(const std::function<double(PhasePoint)>& f, const Orbit& orb, int nodes_per_step) {
  double total = 0.0;
  for (const auto& n : orb.gauss_nodes(nodes_per_step)) total += n.weight * f(n.pt);
  return total;
}

double default_delta_e(double e_min, double e_max) { return std::max(1e-4, 1e-3 * (e_max - e_min)); }

double richardson_derivative(const std::array<double, 4>& v, double delta) {
  double coarse = (v[3] - v[0]) / (2 * delta);
  double fine = (v[2] - v[1]) / delta;
  return (4 * fine - coarse) / 3;
}

double d_dE(const std::function<double(double)>& g, double E, double delta, double e_min, double e_max) {
  if (!(delta > 0)) throw Error(Status::invalid_argument, "deltaE must be positive");
  if (E - delta < e_min || E + delta > e_max)
    throw WindowError("d/dE stencil at E = " + std::to_string(E) + " leaves the energy window");
  return richardson_derivative({g(E - delta), g(E - 0.5 * delta), g(E + 0.5 * delta), g(E + delta)}, delta);
}

namespace {

bool inside(const std::vector<PhasePoint>& poly, PhasePoint q) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto &a = poly[i], &b = poly[j];
    if ((a.xi > q.xi) != (b.xi > q.xi) && q.x < (b.x - a.x) * (q.xi - a.xi) / (b.xi - a.xi) + a.x) in = !in;
  }
  return in;
}

std::vector<PhasePoint> outline(const Orbit& orb) {
  std::vector<PhasePoint> poly;
  for (const auto& q : orb.uniform_nodes(512)) poly.push_back(q.pt);
  return poly;
}

}  // namespace

void check_no_critical_points(const Hamiltonian& p0, const WellConfig& cfg) {
  WellConfig wide = cfg;  // the projected seed may land a rounding error outside
  wide.e_min -= cfg.level_tol;
  wide.e_max += cfg.level_tol;
  auto lo = outline(find_orbit(p0, cfg.e_min, wide));
  auto hi = outline(find_orbit(p0, cfg.e_max, wide));
  double x0 = hi[0].x, x1 = x0, k0 = hi[0].xi, k1 = k0;
  for (const auto& q : hi) {
    x0 = std::min(x0, q.x), x1 = std::max(x1, q.x);
    k0 = std::min(k0, q.xi), k1 = std::max(k1, q.xi);
  }
  // Newton on grad p0 = 0 from a grid over the outer orbit's bounding box.
  const int m = 24;
  std::vector<PhasePoint> found;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      PhasePoint q{x0 + (x1 - x0) * (i + 0.5) / m, k0 + (k1 - k0) * (j + 0.5) / m};
      bool converged = false;
      for (int it = 0; it < 50 && !converged; ++it) {
        Jet jt = p0.jet(q);
        double gx = jt.re(1, 0), gk = jt.re(0, 1);
        double a = jt.re(2, 0), b = jt.re(1, 1), d = jt.re(0, 2);
        double det = a * d - b * b;
        if (!std::isfinite(det) || std::abs(det) < 1e-14) break;
        double dx = (d * gx - b * gk) / det, dk = (a * gk - b * gx) / det;
        q.x -= dx;
        q.xi -= dk;
        converged = std::hypot(dx, dk) < 1e-13 * (1 + std::hypot(q.x, q.xi));
      }
      if (!converged || std::hypot(p0.gradient(q).x, p0.gradient(q).xi) > 1e-8) continue;
      if (inside(hi, q) && !inside(lo, q)) found.push_back(q);
    }
  if (found.empty()) return;
  // Prefer a critical value inside the window (a separatrix) over, e.g., the
  // bottom of a neighbouring well enclosed by the outer orbit.
  PhasePoint worst = found.front();
  for (const auto& q : found) {
    double E = p0.value(q);
    if (E >= cfg.e_min && E <= cfg.e_max) {
      worst = q;
      break;
    }
  }
  std::ostringstream os;
  os << "critical point of p0 at (" << worst.x << ", " << worst.xi << ") inside the energy window";
  throw OrbitError(OrbitError::Kind::critical_point, p0.value(worst), os.str());
}

}  // namespace bsq
