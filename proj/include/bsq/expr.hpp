#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bsq {

using Complex = std::complex<double>;

struct PhasePoint {
  double x = 0.0;
  double xi = 0.0;
};

enum class Var { x, xi };

/// Immutable expression tree over the phase-space variables x and xi.
///
/// Construction through the arithmetic operators folds constants and drops
/// additive/multiplicative identities, which keeps symbolic derivatives small.
/// It is not a simplifier beyond that.
class Expr {
 public:
  enum class Kind { constant, var_x, var_xi, add, sub, mul, div, pow, neg, sin, cos, exp };

  Expr();  // the constant 0
  static Expr constant(Complex c);
  static Expr variable(Var v);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::constant; }
  bool is_zero() const;
  bool is_one() const;
  Complex constant_value() const;
  /// No complex constants anywhere: real-valued at every real point.
  bool is_real() const;

  /// Symbolic partial derivative.
  Expr diff(Var v) const;
  Expr diff(int order_x, int order_xi) const;

  /// Throws DomainError on division by zero or a non-finite result.
  Complex eval(PhasePoint pt) const;

  /// Fully parenthesized text in the input grammar; parse(str()) evaluates identically.
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, unsigned n);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend class Program;
};

/// Parses the expression grammar (see README). Throws ParseError.
Expr parse_expr(std::string_view src);

/// Flattened postfix form of an Expr for fast repeated evaluation.
class Program {
 public:
  Program() = default;
  explicit Program(const Expr& e);
  Complex eval(PhasePoint pt) const;
  bool is_constant_zero() const { return zero_; }

 private:
  struct Op {
    Expr::Kind kind;
    Complex value;
    unsigned power;
  };
  std::vector<Op> ops_;
  std::size_t max_stack_ = 0;
  bool zero_ = true;
};

/// Value and mixed partials d^(a+b)/dx^a dxi^b up to total order 3.
struct Jet {
  static constexpr int max_order = 3;
  static constexpr int size = 10;
  static constexpr int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }

  int order = 0;
  std::array<Complex, size> d{};

  Complex value() const { return d[0]; }
  Complex operator()(int a, int b) const { return d[static_cast<std::size_t>(index(a, b))]; }
  double re(int a, int b) const { return (*this)(a, b).real(); }
  double im(int a, int b) const { return (*this)(a, b).imag(); }
};

/// Precompiled symbolic derivatives of one expression.
class JetEvaluator {
 public:
  JetEvaluator() = default;
  JetEvaluator(const Expr& e, int order);
  Jet operator()(PhasePoint pt) const;
  /// Single partial derivative, a + b <= order().
  Complex partial(PhasePoint pt, int a, int b) const { return programs_[Jet::index(a, b)].eval(pt); }
  int order() const { return order_; }
  const Expr& expr() const { return expr_; }
  bool is_zero() const { return zero_; }

 private:
  Expr expr_;
  int order_ = 0;
  bool zero_ = true;
  std::array<Program, Jet::size> programs_{};
};

Jet eval_jet(const Expr& e, PhasePoint pt, int order);

/// Weyl symbol series p0 + h p1 + h^2 p2 + ...
class SymbolSeries {
 public:
  explicit SymbolSeries(std::vector<Expr> coeffs);
  static SymbolSeries parse(std::span<const std::string> sources);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// Coefficient p_j; zero beyond the supplied order.
  const Expr& coeff(int j) const;
  std::span<const Expr> coeffs() const { return coeffs_; }

 private:
  std::vector<Expr> coeffs_;
  Expr zero_;
};

struct RealityReport {
  bool pass = true;
  double worst_imag = 0.0;
  PhasePoint witness{};
};

/// p0 must be real: worst |Im p0| over the samples.
RealityReport check_principal_real(const SymbolSeries& s, std::span<const PhasePoint> samples, double tol);

struct PtViolation {
  int coeff = 0;
  double worst = 0.0;
  PhasePoint witness{};
};

struct PtReport {
  bool pass = true;
  std::vector<PtViolation> per_coeff;  // worst |p_j(-x,xi) - conj p_j(x,xi)| per coefficient
};

PtReport check_pt_symmetry(const SymbolSeries& s, std::span<const PhasePoint> samples, double tol);

}  // namespace bsq
