#include "bsq/moyal.hpp"

#include <sstream>

#include "bsq/error.hpp"

namespace bsq::moyal {

namespace {

std::string rational(const mpq_class& q) { return q.get_str(); }

mpq_class factorial(int n) {
  mpz_class f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return mpq_class(f);
}

mpq_class binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return mpq_class(r);
}

// D_x(e^{m b} P) = e^{m b}(d_x P + m b_x P), likewise for xi.
HPoly twisted(const HPoly& body, int weight, const Poly& beta_d, bool along_x) {
  HPoly out(body.order());
  const QC m(weight);
  for (int j = 0; j <= body.order(); ++j) {
    const Poly& p = body[j];
    out[j] = along_x ? p.diff(1, 0) : p.diff(0, 1);
    if (weight != 0 && !p.is_zero()) out[j] += m * (beta_d * p);
  }
  return out;
}

// Table of D_x^i D_xi^j applied to a weighted body, i + j <= K.
std::vector<std::vector<HPoly>> derivative_table(const WeightedPoly& a, int K) {
  const Poly bx = a.generator->diff(1, 0), bxi = a.generator->diff(0, 1);
  std::vector<std::vector<HPoly>> t(static_cast<std::size_t>(K) + 1);
  for (int i = 0; i <= K; ++i) {
    t[i].resize(static_cast<std::size_t>(K - i) + 1, HPoly(K));
    t[i][0] = i == 0 ? a.body : twisted(t[i - 1][0], a.weight, bx, true);
    for (int j = 1; j <= K - i; ++j) t[i][j] = twisted(t[i][j - 1], a.weight, bxi, false);
  }
  return t;
}

HPoly resize(const HPoly& p, int K) {
  HPoly out(K);
  for (int j = 0; j <= std::min(K, p.order()); ++j) out[j] = p[j];
  return out;
}

}  // namespace

// ---------------------------------------------------------------- QC / Poly

std::string QC::str() const {
  if (sgn(im) == 0) return rational(re);
  if (sgn(re) == 0) return rational(im) + "*i";
  return "(" + rational(re) + (sgn(im) > 0 ? "+" : "") + rational(im) + "*i)";
}

Poly::Poly(const QC& c) { add_term({0, 0}, c); }

Poly Poly::monomial(int a, int b, const QC& c) {
  Poly p;
  p.add_term({a, b}, c);
  return p;
}

void Poly::add_term(const Mono& m, const QC& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) return;
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

QC Poly::coeff(int a, int b) const {
  auto it = terms_.find({a, b});
  return it == terms_.end() ? QC() : it->second;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.first + m.second);
  return d;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    if (m.first) os << "*x" << (m.first > 1 ? "^" + std::to_string(m.first) : "");
    if (m.second) os << "*xi" << (m.second > 1 ? "^" + std::to_string(m.second) : "");
  }
  return os.str();
}

Poly Poly::diff(int ax, int bxi) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    if (m.first < ax || m.second < bxi) continue;
    mpz_class f = 1;
    for (int k = 0; k < ax; ++k) f *= m.first - k;
    for (int k = 0; k < bxi; ++k) f *= m.second - k;
    out.add_term({m.first - ax, m.second - bxi}, QC(mpq_class(f)) * c);
  }
  return out;
}

Poly Poly::re() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.add_term(m, QC(c.re));
  return out;
}

Poly Poly::im() const {
  Poly out;
  for (const auto& [m, c] : terms_) out.add_term(m, QC(c.im));
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator-(const Poly& a) {
  Poly out;
  for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, -c);
  return out;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term({ma.first + mb.first, ma.second + mb.second}, ca * cb);
  return out;
}

Poly operator*(const QC& s, const Poly& a) {
  Poly out;
  if (s.is_zero()) return out;
  for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, s * c);
  return out;
}

Poly bracket(const Poly& f, const Poly& g) { return f.diff(0, 1) * g.diff(1, 0) - f.diff(1, 0) * g.diff(0, 1); }

// ---------------------------------------------------------------- HPoly

bool HPoly::is_zero() const {
  for (const Poly& p : c_)
    if (!p.is_zero()) return false;
  return true;
}

HPoly& HPoly::operator+=(const HPoly& o) {
  for (int j = 0; j <= std::min(order(), o.order()); ++j) (*this)[j] += o[j];
  return *this;
}

HPoly& HPoly::operator-=(const HPoly& o) {
  for (int j = 0; j <= std::min(order(), o.order()); ++j) (*this)[j] -= o[j];
  return *this;
}

HPoly operator*(const HPoly& a, const HPoly& b) {
  const int K = std::min(a.order(), b.order());
  HPoly out(K);
  for (int i = 0; i <= K; ++i)
    for (int j = 0; i + j <= K; ++j)
      if (!a[i].is_zero() && !b[j].is_zero()) out[i + j] += a[i] * b[j];
  return out;
}

HPoly operator*(const QC& s, const HPoly& a) {
  HPoly out(a.order());
  for (int j = 0; j <= a.order(); ++j) out[j] = s * a[j];
  return out;
}

// ---------------------------------------------------------------- star

WeightedPoly weighted(std::shared_ptr<const Poly> beta0, int weight, HPoly body) {
  return {weight, std::move(body), std::move(beta0)};
}

WeightedPoly star(const WeightedPoly& a, const WeightedPoly& b, int K, Orientation o) {
  if (!a.generator || !b.generator || !(*a.generator == *b.generator))
    throw Error(Status::invalid_argument, "star product of weighted symbols with different generators");
  const auto da = derivative_table({a.weight, resize(a.body, K), a.generator}, K);
  const auto db = derivative_table({b.weight, resize(b.body, K), b.generator}, K);
  HPoly out(K);
  const QC half_ih = QC(0, mpq_class(o == Orientation::standard ? 1 : -1, 2));
  QC scale(1);  // (i h / 2)^k / k!, without the h
  for (int k = 0; k <= K; ++k) {
    if (k > 0) scale = scale * half_ih;
    const QC ck = scale * QC(1 / factorial(k));
    for (int j = 0; j <= k; ++j) {
      QC c = ck * QC(binomial(k, j) * (j % 2 ? -1 : 1));
      const HPoly& fa = da[k - j][j];
      const HPoly& fb = db[j][k - j];
      for (int la = 0; la + k <= K; ++la) {
        if (fa[la].is_zero()) continue;
        for (int lb = 0; la + lb + k <= K; ++lb)
          if (!fb[lb].is_zero()) out[la + lb + k] += c * (fa[la] * fb[lb]);
      }
    }
  }
  return {a.weight + b.weight, std::move(out), a.generator};
}

WeightedPoly star_inverse(const WeightedPoly& b, int K, Orientation o) {
  if (!(b.body[0] == Poly(QC(1))))
    throw Error(Status::invalid_argument, "star_inverse needs a symbol whose h^0 body is 1");
  HPoly one(K);
  one[0] = Poly(QC(1));
  WeightedPoly c{-b.weight, one, b.generator};
  for (int j = 1; j <= K; ++j) {
    WeightedPoly r = star(b, c, K, o);
    c.body[j] -= r.body[j];
  }
  return c;
}

HPoly conjugate(const Poly& beta0, const HPoly& p, int K, Orientation o) {
  auto gen = std::make_shared<const Poly>(beta0);
  HPoly one(K);
  one[0] = Poly(QC(1));
  WeightedPoly e = weighted(gen, 1, one);
  WeightedPoly r = star(star(e, weighted(gen, 0, resize(p, K)), K, o), star_inverse(e, K, o), K, o);
  if (r.weight != 0) throw Error(Status::internal, "conjugation left a nonzero weight");
  return r.body;
}

// ---------------------------------------------------------------- R5 / R8

Poly eval_R5(const Poly& b, const Poly& a) {
  auto d = [](const Poly& f, int i, int j) { return f.diff(i, j); };
  const Poly bx = d(b, 1, 0), bxi = d(b, 0, 1), bxx = d(b, 2, 0), bxixi = d(b, 0, 2), bxxi = d(b, 1, 1);
  const Poly ax = d(a, 1, 0), axi = d(a, 0, 1);
  const QC two(2);
  return (bxi * bxi - bxixi) * (two * (ax * bx) + a * bxx + d(a, 2, 0) + a * (bx * bx)) +
         (bx * bx - bxx) * (two * (axi * bxi) + a * bxixi + d(a, 0, 2) + a * (bxi * bxi)) -
         two * ((bx * bxi - bxxi) * (d(a, 1, 1) + axi * bx + ax * bxi + a * (bx * bxi) + a * bxxi));
}

Poly eval_R8(const Poly& b, const Poly& a) {
  auto d = [](const Poly& f, int i, int j) { return f.diff(i, j); };
  const Poly bx = d(b, 1, 0), bxi = d(b, 0, 1), bxx = d(b, 2, 0), bxixi = d(b, 0, 2), bxxi = d(b, 1, 1);
  const Poly ax = d(a, 1, 0), axi = d(a, 0, 1);
  const QC two(2), three(3);
  const Poly F5 = three * (axi * bxixi) + a * d(b, 0, 3) + three * (bxi * d(a, 0, 2)) + d(a, 0, 3) +
                  three * (axi * bxi * bxi) + three * (a * bxi * bxixi) + a * (bxi * bxi);
  const Poly F5t = three * (ax * bxx) + a * d(b, 3, 0) + three * (bx * d(a, 2, 0)) + d(a, 3, 0) +
                   three * (ax * bx * bx) + three * (a * bx * bxx) + a * (bx * bx);
  const Poly G5 = two * (bx * d(a, 1, 1)) + two * (ax * bxxi) + axi * bxx + a * d(b, 2, 1) + d(a, 2, 1) +
                  axi * bx * bx + two * (a * bx * bxxi) + (two * (ax * bx) + a * bxx + d(a, 2, 0) + a * bx * bx) * bxi;
  const Poly G5t = two * (bxi * d(a, 1, 1)) + two * (axi * bxxi) + ax * bxixi + a * d(b, 1, 2) + d(a, 1, 2) +
                   ax * bxi * bxi + two * (a * bxi * bxxi) +
                   (two * (axi * bxi) + a * bxixi + d(a, 0, 2) + a * bxi * bxi) * bx;
  return F5 * (three * (bx * bxx) - d(b, 3, 0) - bx * bx * bx) -
         F5t * (three * (bxi * bxixi) - d(b, 0, 3) - bxi * bxi * bxi) +
         three * (G5 * (two * (bxi * bxxi) - d(b, 1, 2) - bx * bxi * bxi + bx * bxixi)) -
         three * (G5t * (two * (bx * bxxi) - d(b, 2, 1) - bxi * bx * bx + bxi * bxx));
}

HPoly conjugation_expansion(const Poly& beta0, const HPoly& p, int K) {
  HPoly out(K);
  const QC i = QC::i();
  for (int j = 0; j <= std::min(K, p.order()); ++j) {
    const Poly& pj = p[j];
    if (pj.is_zero()) continue;
    const Poly alpha = bracket(beta0, pj);
    const Poly terms[5] = {pj, -(i * alpha), QC(mpq_class(1, 2)) * bracket(alpha, beta0),
                           (i * QC(mpq_class(1, 8))) * eval_R5(beta0, alpha),
                           QC(mpq_class(1, 48)) * eval_R8(beta0, alpha)};
    for (int k = 0; j + k <= K && k < 5; ++k) out[j + k] += terms[k];
  }
  return out;
}

// ---------------------------------------------------------------- residuals

int Residual::lowest_failing_order() const {
  for (int j = 0; j <= diff.order(); ++j)
    if (!diff[j].is_zero()) return j;
  return -1;
}

std::string Residual::report(std::size_t max_terms) const {
  if (exact) return "exact";
  std::ostringstream os;
  os << offending.size() << " offending monomial(s)";
  for (std::size_t k = 0; k < offending.size() && k < max_terms; ++k) {
    const auto& o = offending[k];
    os << "; h^" << o.h_power << " x^" << o.mono.first << " xi^" << o.mono.second << ": " << o.value.str();
  }
  if (offending.size() > max_terms) os << "; ...";
  return os.str();
}

Residual residual(const HPoly& lhs, const HPoly& rhs) {
  Residual r{lhs - rhs, true, {}};
  for (int j = 0; j <= r.diff.order(); ++j)
    for (const auto& [m, c] : r.diff[j].terms()) r.offending.push_back({j, m, c});
  r.exact = r.offending.empty();
  return r;
}

Poly random_poly(std::mt19937& g, int deg, bool real) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 3), coin(0, 2);
  Poly p;
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b) {
      if (coin(g) == 0) continue;
      mpq_class re(num(g), den(g)), im = real ? mpq_class(0) : mpq_class(num(g), den(g));
      re.canonicalize();
      im.canonicalize();
      p += Poly::monomial(a, b, QC(re, im));
    }
  return p;
}

Residual check_conjugation(const Poly& beta0, const HPoly& p, Orientation o) {
  return residual(conjugate(beta0, p, p.order(), o), conjugation_expansion(beta0, p, p.order()));
}

namespace {

// e^{h^j beta} as an h-series, truncated.
HPoly exp_series(const Poly& beta, int j, int K) {
  HPoly out(K), term(K);
  out[0] = term[0] = Poly(QC(1));
  HPoly step(K);
  if (j <= K) step[j] = beta;
  for (int m = 1; m * j <= K; ++m) {
    term = QC(mpq_class(1, m)) * (term * step);
    out += term;
  }
  return out;
}

}  // namespace

Residual verify_order4_display(const std::array<Poly, 4>& betas, const HPoly& p, Orientation o) {
  const int K = 4;
  HPoly lhs = conjugate(betas[0], resize(p, K), K, o);
  auto gen = std::make_shared<const Poly>(betas[0]);
  for (int j = 1; j <= 3; ++j) {
    WeightedPoly b = weighted(gen, 0, exp_series(betas[j], j, K));
    lhs = star(star(b, weighted(gen, 0, lhs), K, o), star_inverse(b, K, o), K, o).body;
  }

  const Poly& b0 = betas[0];
  const Poly& b1 = betas[1];
  const Poly p0 = p[0];
  auto re = [&](int j) { return j <= p.order() ? p[j].re() : Poly(); };
  auto im = [&](int j) { return j <= p.order() ? p[j].im() : Poly(); };
  const QC half(mpq_class(1, 2));

  HPoly rhs(K);
  rhs[0] = p0;
  rhs[1] = re(1);
  rhs[2] = re(2) - half * bracket(bracket(b0, p0), b0);
  rhs[3] = re(3) - bracket(bracket(b1, p0), b0) - half * bracket(bracket(b0, re(1)), b0);
  rhs[4] = re(4) + bracket(b0, im(3)) + bracket(b1, im(2)) + half * bracket(bracket(b0, re(2)), b0) +
           half * bracket(bracket(b1, p0), b1) + bracket(bracket(b0, re(1)), b1) -
           QC(mpq_class(1, 8)) * eval_R5(b0, bracket(b0, re(1))) +
           QC(mpq_class(1, 48)) * eval_R8(b0, bracket(b0, p0));
  return residual(lhs, rhs);
}

HPoly display_instance(const std::array<Poly, 4>& betas, const Poly& p0, const std::array<Poly, 4>& re_p) {
  const auto& [b0, b1, b2, b3] = betas;
  const QC i = QC::i(), half(mpq_class(1, 2)), eighth(mpq_class(1, 8));
  const Poly im1 = bracket(b0, p0);
  const Poly im2 = bracket(b1, p0) + bracket(b0, re_p[0]);
  const Poly im3 = bracket(b2, p0) + bracket(b0, re_p[1]) + bracket(b1, re_p[0]) -
                   half * bracket(bracket(b0, im1), b0) - eighth * eval_R5(b0, bracket(b0, p0));
  const Poly im4 = bracket(b3, p0) + bracket(b0, re_p[2]) + bracket(b1, re_p[1]) + bracket(b2, re_p[0]) -
                   half * bracket(bracket(b0, im2), b0) + half * bracket(bracket(bracket(b0, p0), b0), b1) -
                   eighth * eval_R5(b0, bracket(b0, re_p[0]));
  HPoly p(4);
  p[0] = p0;
  const Poly* ims[4] = {&im1, &im2, &im3, &im4};
  for (int j = 0; j < 4; ++j) p[j + 1] = re_p[j] + i * *ims[j];
  return p;
}

}  // namespace bsq::moyal
