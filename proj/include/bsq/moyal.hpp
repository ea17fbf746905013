#pragma once

#include <gmpxx.h>

#include <array>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace bsq::moyal {

/// Exact complex rational.
struct QC {
  mpq_class re, im;

  QC() = default;
  QC(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}
  QC(long r) : re(r), im(0) {}
  static QC i() { return {0, 1}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  QC conj() const { return {re, -im}; }
  std::string str() const;

  friend QC operator+(const QC& a, const QC& b) { return {a.re + b.re, a.im + b.im}; }
  friend QC operator-(const QC& a, const QC& b) { return {a.re - b.re, a.im - b.im}; }
  friend QC operator-(const QC& a) { return {-a.re, -a.im}; }
  friend QC operator*(const QC& a, const QC& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const QC& a, const QC& b) { return a.re == b.re && a.im == b.im; }
};

/// Monomial x^a xi^b.
using Mono = std::pair<int, int>;

/// Bivariate polynomial with exact complex coefficients; zero terms are never stored.
class Poly {
 public:
  Poly() = default;
  Poly(const QC& c);  // constant
  static Poly monomial(int a, int b, const QC& c = QC(1));
  static Poly x() { return monomial(1, 0); }
  static Poly xi() { return monomial(0, 1); }

  bool is_zero() const { return terms_.empty(); }
  QC coeff(int a, int b) const;
  const std::map<Mono, QC>& terms() const { return terms_; }
  int degree() const;
  std::string str() const;

  Poly diff(int ax, int bxi) const;
  Poly re() const;
  Poly im() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(const QC& s, const Poly& a);
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const Mono& m, const QC& c);
  std::map<Mono, QC> terms_;
};

/// Random polynomial of total degree <= deg with small rational coefficients
/// (about a third of the monomials left out); real coefficients if real.
Poly random_poly(std::mt19937& g, int deg, bool real = false);

/// {f,g} = d_xi f d_x g - d_x f d_xi g.
Poly bracket(const Poly& f, const Poly& g);

/// Polynomial in h truncated after h^K.
class HPoly {
 public:
  explicit HPoly(int K = 4) : c_(static_cast<std::size_t>(K) + 1) {}
  HPoly(const Poly& p0, int K) : HPoly(K) { c_[0] = p0; }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Poly& operator[](int j) { return c_.at(static_cast<std::size_t>(j)); }
  const Poly& operator[](int j) const { return c_.at(static_cast<std::size_t>(j)); }
  bool is_zero() const;

  HPoly& operator+=(const HPoly& o);
  HPoly& operator-=(const HPoly& o);
  friend HPoly operator+(HPoly a, const HPoly& b) { return a += b; }
  friend HPoly operator-(HPoly a, const HPoly& b) { return a -= b; }
  friend HPoly operator*(const HPoly& a, const HPoly& b);  // truncated
  friend HPoly operator*(const QC& s, const HPoly& a);
  friend bool operator==(const HPoly& a, const HPoly& b) { return a.c_ == b.c_; }

 private:
  std::vector<Poly> c_;
};

/// e^{weight * beta0} * body, all sharing one generator beta0.
struct WeightedPoly {
  int weight = 0;
  HPoly body;
  std::shared_ptr<const Poly> generator;
};

WeightedPoly weighted(std::shared_ptr<const Poly> beta0, int weight, HPoly body);

/// Sign of the h-expansion parameter: standard gives x # xi = x xi + ih/2.
enum class Orientation { standard, flipped };

/// Moyal product mod h^{K+1}. Throws Error(invalid_argument) on generator mismatch.
WeightedPoly star(const WeightedPoly& a, const WeightedPoly& b, int K, Orientation o = Orientation::standard);

/// c with b # c = 1 mod h^{K+1}; the h^0 body of b must be 1.
WeightedPoly star_inverse(const WeightedPoly& b, int K, Orientation o = Orientation::standard);

/// Symbol of e^{beta0} # p # (e^{beta0})^{-1} mod h^{K+1}.
HPoly conjugate(const Poly& beta0, const HPoly& p, int K, Orientation o = Orientation::standard);

/// Hamilton-Jacobi polynomials of the order-h^3 and h^4 conjugation terms, as printed.
Poly eval_R5(const Poly& beta0, const Poly& alpha);
Poly eval_R8(const Poly& beta0, const Poly& alpha);

/// p - ih{b,p} + h^2/2 {{b,p},b} + i h^3/8 R5(b,{b,p}) + h^4/48 R8(b,{b,p}), applied to each h-level of p.
HPoly conjugation_expansion(const Poly& beta0, const HPoly& p, int K = 4);

struct Offending {
  int h_power = 0;
  Mono mono{};
  QC value;
};

/// Difference between two HPoly computations, with the nonzero monomials listed.
struct Residual {
  HPoly diff;
  bool exact = true;
  std::vector<Offending> offending;
  int lowest_failing_order() const;
  std::string report(std::size_t max_terms = 12) const;
};

Residual residual(const HPoly& lhs, const HPoly& rhs);

/// conjugate(beta0, p) against conjugation_expansion(beta0, p).
Residual check_conjugation(const Poly& beta0, const HPoly& p, Orientation o = Orientation::standard);

/// Iterated conjugation by e^{beta0}, e^{h beta1}, e^{h^2 beta2}, e^{h^3 beta3} against
/// the closed-form order-h^4 display.
Residual verify_order4_display(const std::array<Poly, 4>& betas, const HPoly& p,
                               Orientation o = Orientation::standard);

/// Fills Im p1..Im p4 from the homological equations for the given betas, p0 and Re p_j,
/// which is the situation the order-h^4 display describes.
HPoly display_instance(const std::array<Poly, 4>& betas, const Poly& p0, const std::array<Poly, 4>& re_p);

}  // namespace bsq::moyal
