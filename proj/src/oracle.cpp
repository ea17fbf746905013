#include "bsq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "bsq/error.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace bsq {

namespace {

constexpr Complex I{0.0, 1.0};

// Coefficients of (hD)^2 + B hD + V at one grid point.
struct Coeffs {
  Complex B, V;
};

GridOperator tridiagonal(const std::function<Coeffs(double)>& at, double h, double L, int n) {
  if (n < 64) throw Error(Status::invalid_argument, "grid needs at least 64 points");
  if (!(L > 0) || !(h > 0)) throw Error(Status::invalid_argument, "grid half-width and h must be positive");
  GridOperator g;
  g.L = L;
  g.n = n;
  g.h = h;
  const double dx = g.dx(), kin = h * h / (dx * dx);
  std::vector<Coeffs> c(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) c[k] = at(-L + k * dx);
  g.diag.resize(n);
  g.sub.resize(n - 1);
  g.super.resize(n - 1);
  for (int k = 0; k < n; ++k) g.diag[k] = 2 * kin + c[k].V;
  for (int k = 0; k + 1 < n; ++k) {
    g.super[k] = -kin - I * h * c[k].B / (2 * dx);
    g.sub[k] = -kin + I * h * c[k + 1].B / (2 * dx);
  }
  return g;
}

std::vector<Complex> in_window(std::vector<Complex> ev, double lo, double hi) {
  std::erase_if(ev, [&](Complex z) { return z.real() < lo || z.real() > hi; });
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

// Implicit QL with Wilkinson-type shifts for a complex symmetric tridiagonal
// matrix (diagonal d, off-diagonal e with e[k] coupling k and k+1).
void complex_symmetric_ql(std::vector<Complex>& d, std::vector<Complex>& e) {
  const int n = static_cast<int>(d.size());
  const double eps = std::numeric_limits<double>::epsilon();
  const int max_iter = 60;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == max_iter) throw EigenError("tridiagonal QL did not converge at index " + std::to_string(l), iter);
      Complex g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      Complex r = std::sqrt(g * g + 1.0);
      Complex denom = std::abs(g + r) >= std::abs(g - r) ? g + r : g - r;
      g = d[m] - d[l] + e[l] / denom;
      Complex s = 1.0, c = 1.0, p = 0.0;
      int i;
      bool deflated = false;
      for (i = m - 1; i >= l; --i) {
        Complex f = s * e[i], b = c * e[i];
        r = std::sqrt(f * f + g * g);
        e[i + 1] = r;
        if (std::abs(r) == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace

GridOperator build_matrix(const Expr& p, const Expr& q, double h, double L, int n) {
  Program P(p), Q(q);
  for (double x : {0.3 * L, 0.7 * L}) {
    if (std::abs(P.eval({x, 0}) - P.eval({-x, 0})) > 1e-9 || std::abs(Q.eval({x, 0}) - Q.eval({-x, 0})) > 1e-9)
      std::fprintf(stderr, "warning: Q-form coefficients are not even at x = %g\n", x);
  }
  return tridiagonal([&](double x) { return Coeffs{P.eval({x, 0}), Q.eval({x, 0})}; }, h, L, n);
}

namespace {

struct SymbolParts {
  std::vector<JetEvaluator> jets;
  double h;

  Complex total(PhasePoint pt, int a, int b) const {
    Complex sum = 0.0, hp = 1.0;
    for (const auto& j : jets) {
      sum += hp * j.partial(pt, a, b);
      hp *= h;
    }
    return sum;
  }
};

SymbolParts symbol_parts(const SymbolSeries& s, double h) {
  SymbolParts parts{{}, h};
  for (const Expr& e : s.coeffs()) parts.jets.emplace_back(e, 2);
  return parts;
}

Coeffs quadratic_coeffs(const SymbolParts& sp, double x) {
  Complex C = sp.total({x, 0}, 0, 0);
  Complex B = sp.total({x, 0}, 0, 1);
  Complex A2 = sp.total({x, 0}, 0, 2);
  Complex at2 = sp.total({x, 2}, 0, 0);
  double scale = 1 + std::abs(C) + std::abs(B);
  if (std::abs(A2 - 2.0) > 1e-9 || std::abs(at2 - (4.0 + 2.0 * B + C)) > 1e-9 * scale)
    throw DomainError("symbol is not of the form xi^2 + B(x) xi + C(x) at x = " + std::to_string(x));
  Complex dB = sp.total({x, 0}, 1, 1);
  return {B, C - I * sp.h * dB / 2.0};
}

}  // namespace

GridOperator build_from_symbol(const SymbolSeries& s, double h, double L, int n) {
  SymbolParts sp = symbol_parts(s, h);
  return tridiagonal([&](double x) { return quadratic_coeffs(sp, x); }, h, L, n);
}

double default_half_width(const SymbolSeries& s, double h, double level, double L0, int max_doublings) {
  SymbolParts sp = symbol_parts(s, h);
  double L = L0;
  for (int k = 0; k <= max_doublings; ++k, L *= 2) {
    bool ok = true;
    for (double x : {-L, L}) {
      Coeffs c = quadratic_coeffs(sp, x);
      if ((c.V - c.B * c.B / 4.0).real() < level) ok = false;
    }
    if (ok) return L;
  }
  throw DomainError("effective potential stays below " + std::to_string(level) + " up to L = " + std::to_string(L / 2));
}

std::vector<Complex> eigenvalues(const GridOperator& g, double lo, double hi) {
  std::vector<Complex> d = g.diag, e(g.n, 0.0);
  for (int k = 0; k + 1 < g.n; ++k) e[k] = std::sqrt(g.sub[k] * g.super[k]);
  complex_symmetric_ql(d, e);
  return in_window(std::move(d), lo, hi);
}

std::vector<Complex> eigenvalues_dense(const GridOperator& g, double lo, double hi) {
  const int n = g.n;
  std::vector<Complex> a(static_cast<std::size_t>(n) * n, 0.0), w(n);
  auto at = [&](int r, int c) -> Complex& { return a[static_cast<std::size_t>(c) * n + r]; };
  for (int k = 0; k < n; ++k) at(k, k) = g.diag[k];
  for (int k = 0; k + 1 < n; ++k) {
    at(k, k + 1) = g.super[k];
    at(k + 1, k) = g.sub[k];
  }
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(), nullptr, 1, nullptr, 1);
  if (info > 0) throw EigenError("zgeev QR failed", static_cast<int>(info));
  if (info < 0) throw Error(Status::internal, "zgeev argument " + std::to_string(-info) + " invalid");
  return in_window(std::move(w), lo, hi);
}

std::vector<Complex> eigenvalues_extrapolated(const SymbolSeries& s, double h, double L, int n, double hi) {
  auto coarse = eigenvalues(build_from_symbol(s, h, L, n));
  auto fine = eigenvalues(build_from_symbol(s, h, L, 2 * n - 1));
  std::vector<Complex> out;
  for (std::size_t k = 0; k < coarse.size() && k < fine.size(); ++k) {
    Complex v = (4.0 * fine[k] - coarse[k]) / 3.0;
    if (v.real() > hi) break;
    out.push_back(v);
  }
  return out;
}

SpectralMatch compare_spectra(const std::vector<QuasiEigenvalue>& bs, const std::vector<Complex>& eig) {
  SpectralMatch best;
  best.unmatched_bs = static_cast<int>(bs.size());
  double best_mean = std::numeric_limits<double>::infinity();
  for (int offset = -2; offset <= 2; ++offset) {
    SpectralMatch m;
    m.offset = offset;
    double total = 0.0;
    for (const auto& q : bs) {
      long j = static_cast<long>(q.n) + offset;
      if (j < 0 || j >= static_cast<long>(eig.size())) {
        ++m.unmatched_bs;
        continue;
      }
      Complex z = eig[static_cast<std::size_t>(j)];
      double gap = std::abs(q.E - z);
      m.pairs.push_back({q.n, q.E, z, gap});
      total += gap;
      m.max_gap = std::max(m.max_gap, gap);
      m.max_imag = std::max(m.max_imag, std::abs(z.imag()));
    }
    // A wrong offset is off by a level spacing; require half the roots matched
    // so that a shift past the end of the list cannot win on an empty set.
    if (m.pairs.empty() || 2 * m.pairs.size() < bs.size()) continue;
    double mean = total / static_cast<double>(m.pairs.size());
    if (mean < best_mean) {
      best = std::move(m);
      best_mean = mean;
    }
  }
  if (!best.pairs.empty()) {
    double lo = best.pairs.front().E_oracle.real(), hi = best.pairs.back().E_oracle.real();
    int inside = 0;
    for (Complex z : eig)
      if (z.real() >= lo && z.real() <= hi) ++inside;
    best.unmatched_oracle = inside - static_cast<int>(best.pairs.size());
  }
  return best;
}

std::string SpectralMatch::csv() const {
  std::string out = "n,E_bs,Re E_oracle,Im E_oracle,gap\n";
  char buf[160];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%d,%.15g,%.15g,%.15g,%.15g\n", p.n, p.E_bs, p.E_oracle.real(), p.E_oracle.imag(),
                  p.gap);
    out += buf;
  }
  return out;
}

bool conjugation_symmetric(const std::vector<Complex>& eig, double tol) {
  for (Complex z : eig) {
    if (std::abs(z.imag()) <= tol) continue;
    bool found = std::any_of(eig.begin(), eig.end(), [&](Complex w) { return std::abs(w - std::conj(z)) <= tol; });
    if (!found) return false;
  }
  return true;
}

}  // namespace bsq
