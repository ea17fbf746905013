#include "bsq/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "bsq/error.hpp"

namespace bsq {

struct Expr::Node {
  Kind kind = Kind::constant;
  Complex value{};
  unsigned power = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_node(Expr::Kind kind, NodePtr a = nullptr, NodePtr b = nullptr, Complex value = {}, unsigned power = 0) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  n->power = power;
  return n;
}

Complex ipow(Complex base, unsigned n) {
  Complex r{1.0, 0.0};
  while (n) {
    if (n & 1u) r *= base;
    base *= base;
    n >>= 1u;
  }
  return r;
}

Complex checked_div(Complex num, Complex den) {
  if (den == Complex{}) throw DomainError("division by zero");
  return num / den;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0 || s[0] == '-') return "(" + s + ")";
  return s;
}

std::string format_constant(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  std::string im = c.imag() == 1.0 ? std::string("i") : format_real(c.imag()) + "*i";
  if (c.real() == 0.0) return c.imag() == 1.0 ? im : "(" + im + ")";
  return "(" + format_real(c.real()) + "+" + im + ")";
}

Complex eval_node(const Expr::Node& n, PhasePoint pt) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::constant: return n.value;
    case K::var_x: return {pt.x, 0.0};
    case K::var_xi: return {pt.xi, 0.0};
    case K::add: return eval_node(*n.a, pt) + eval_node(*n.b, pt);
    case K::sub: return eval_node(*n.a, pt) - eval_node(*n.b, pt);
    case K::mul: return eval_node(*n.a, pt) * eval_node(*n.b, pt);
    case K::div: return checked_div(eval_node(*n.a, pt), eval_node(*n.b, pt));
    case K::pow: return ipow(eval_node(*n.a, pt), n.power);
    case K::neg: return -eval_node(*n.a, pt);
    case K::sin: return std::sin(eval_node(*n.a, pt));
    case K::cos: return std::cos(eval_node(*n.a, pt));
    case K::exp: return std::exp(eval_node(*n.a, pt));
  }
  throw Error(Status::internal, "unknown expression node");
}

void check_finite(Complex v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite value");
}

std::string node_str(const Expr::Node& n) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::constant: return format_constant(n.value);
    case K::var_x: return "x";
    case K::var_xi: return "xi";
    case K::add: return "(" + node_str(*n.a) + "+" + node_str(*n.b) + ")";
    case K::sub: return "(" + node_str(*n.a) + "-" + node_str(*n.b) + ")";
    case K::mul: return "(" + node_str(*n.a) + "*" + node_str(*n.b) + ")";
    case K::div: return "(" + node_str(*n.a) + "/" + node_str(*n.b) + ")";
    case K::pow: return "(" + node_str(*n.a) + ")^" + std::to_string(n.power);
    case K::neg: return "(-(" + node_str(*n.a) + "))";
    case K::sin: return "sin(" + node_str(*n.a) + ")";
    case K::cos: return "cos(" + node_str(*n.a) + ")";
    case K::exp: return "exp(" + node_str(*n.a) + ")";
  }
  return {};
}

}  // namespace

Expr::Expr() : node_(make_node(Kind::constant)) {}

Expr Expr::constant(Complex c) { return Expr(make_node(Kind::constant, nullptr, nullptr, c)); }

Expr Expr::variable(Var v) { return Expr(make_node(v == Var::x ? Kind::var_x : Kind::var_xi)); }

Expr::Kind Expr::kind() const { return node_->kind; }

bool Expr::is_zero() const { return is_constant() && node_->value == Complex{}; }

bool Expr::is_one() const { return is_constant() && node_->value == Complex{1.0, 0.0}; }

Complex Expr::constant_value() const { return node_->value; }

bool Expr::is_real() const {
  auto rec = [](auto&& self, const Node* n) -> bool {
    if (!n) return true;
    if (n->kind == Kind::constant) return n->value.imag() == 0.0;
    return self(self, n->a.get()) && self(self, n->b.get());
  };
  return rec(rec, node_.get());
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr(make_node(Expr::Kind::add, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return Expr(make_node(Expr::Kind::sub, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
  if (a.is_zero() || b.is_zero()) return Expr{};
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return Expr(make_node(Expr::Kind::mul, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && !b.is_zero())
    return Expr::constant(a.constant_value() / b.constant_value());
  if (a.is_zero() && !b.is_zero()) return Expr{};
  if (b.is_one()) return a;
  return Expr(make_node(Expr::Kind::div, a.node_, b.node_));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.constant_value());
  if (a.kind() == Expr::Kind::neg) return Expr(a.node_->a);
  return Expr(make_node(Expr::Kind::neg, a.node_));
}

Expr pow(const Expr& base, unsigned n) {
  if (n == 0) return Expr::constant(1.0);
  if (n == 1) return base;
  if (base.is_constant()) return Expr::constant(ipow(base.constant_value(), n));
  return Expr(make_node(Expr::Kind::pow, base.node_, nullptr, {}, n));
}

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::sin(a.constant_value()));
  return Expr(make_node(Expr::Kind::sin, a.node_));
}

Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::cos(a.constant_value()));
  return Expr(make_node(Expr::Kind::cos, a.node_));
}

Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::exp(a.constant_value()));
  return Expr(make_node(Expr::Kind::exp, a.node_));
}

Expr Expr::diff(Var v) const {
  const Node& n = *node_;
  Expr a = n.a ? Expr(n.a) : Expr{};
  Expr b = n.b ? Expr(n.b) : Expr{};
  switch (n.kind) {
    case Kind::constant: return Expr{};
    case Kind::var_x: return Expr::constant(v == Var::x ? 1.0 : 0.0);
    case Kind::var_xi: return Expr::constant(v == Var::xi ? 1.0 : 0.0);
    case Kind::add: return a.diff(v) + b.diff(v);
    case Kind::sub: return a.diff(v) - b.diff(v);
    case Kind::mul: return a.diff(v) * b + a * b.diff(v);
    case Kind::div: return (a.diff(v) * b - a * b.diff(v)) / pow(b, 2);
    case Kind::pow:
      return Expr::constant(static_cast<double>(n.power)) * pow(a, n.power - 1) * a.diff(v);
    case Kind::neg: return -a.diff(v);
    case Kind::sin: return cos(a) * a.diff(v);
    case Kind::cos: return -(sin(a) * a.diff(v));
    case Kind::exp: return exp(a) * a.diff(v);
  }
  throw Error(Status::internal, "unknown expression node");
}

Expr Expr::diff(int order_x, int order_xi) const {
  Expr r = *this;
  for (int k = 0; k < order_x; ++k) r = r.diff(Var::x);
  for (int k = 0; k < order_xi; ++k) r = r.diff(Var::xi);
  return r;
}

Complex Expr::eval(PhasePoint pt) const {
  Complex v = eval_node(*node_, pt);
  check_finite(v);
  return v;
}

std::string Expr::str() const { return node_str(*node_); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) lhs = lhs + term();
      else if (accept('-')) lhs = lhs - term();
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) lhs = lhs * factor();
      else if (accept('/')) lhs = lhs / factor();
      else return lhs;
    }
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("expected unsigned integer exponent", start);
      unsigned long n = std::strtoul(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr, 10);
      if (n > 64) throw ParseError("exponent too large", start);
      return pow(b, static_cast<unsigned>(n));
    }
    return b;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return -base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string id(src_.substr(start, pos_ - start));
      if (id == "x") return Expr::variable(Var::x);
      if (id == "xi") return Expr::variable(Var::xi);
      if (id == "i") return Expr::constant({0.0, 1.0});
      if (id == "sin" || id == "cos" || id == "exp") {
        expect('(');
        Expr arg = expr();
        expect(')');
        if (id == "sin") return sin(arg);
        if (id == "cos") return cos(arg);
        return exp(arg);
      }
      throw ParseError("unknown identifier '" + id + "'", start);
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t d = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - d;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    std::string text(src_.substr(start, pos_ - start));
    return Expr::constant(std::strtod(text.c_str(), nullptr));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src) { return Parser(src).parse(); }

// ---------------------------------------------------------------------------
// Program

Program::Program(const Expr& e) {
  zero_ = e.is_zero();
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expr::Node& n) -> void {
    using K = Expr::Kind;
    switch (n.kind) {
      case K::constant:
      case K::var_x:
      case K::var_xi:
        ops_.push_back({n.kind, n.value, 0});
        ++depth;
        break;
      case K::add:
      case K::sub:
      case K::mul:
      case K::div:
        self(self, *n.a);
        self(self, *n.b);
        ops_.push_back({n.kind, {}, 0});
        --depth;
        break;
      case K::pow:
      case K::neg:
      case K::sin:
      case K::cos:
      case K::exp:
        self(self, *n.a);
        ops_.push_back({n.kind, {}, n.power});
        break;
    }
    max_stack_ = std::max(max_stack_, depth);
  };
  emit(emit, *e.node_);
}

Complex Program::eval(PhasePoint pt) const {
  constexpr std::size_t small = 64;
  std::array<Complex, small> local;
  std::vector<Complex> heap;
  Complex* st = local.data();
  if (max_stack_ > small) {
    heap.resize(max_stack_);
    st = heap.data();
  }
  std::size_t sp = 0;
  using K = Expr::Kind;
  for (const Op& op : ops_) {
    switch (op.kind) {
      case K::constant: st[sp++] = op.value; break;
      case K::var_x: st[sp++] = {pt.x, 0.0}; break;
      case K::var_xi: st[sp++] = {pt.xi, 0.0}; break;
      case K::add: --sp; st[sp - 1] += st[sp]; break;
      case K::sub: --sp; st[sp - 1] -= st[sp]; break;
      case K::mul: --sp; st[sp - 1] *= st[sp]; break;
      case K::div: --sp; st[sp - 1] = checked_div(st[sp - 1], st[sp]); break;
      case K::pow: st[sp - 1] = ipow(st[sp - 1], op.power); break;
      case K::neg: st[sp - 1] = -st[sp - 1]; break;
      case K::sin: st[sp - 1] = std::sin(st[sp - 1]); break;
      case K::cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      case K::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
    }
  }
  Complex v = sp ? st[0] : Complex{};
  check_finite(v);
  return v;
}

// ---------------------------------------------------------------------------
// Jets

JetEvaluator::JetEvaluator(const Expr& e, int order) : expr_(e), order_(order) {
  if (order < 0 || order > Jet::max_order) throw Error(Status::invalid_argument, "jet order must be in 0..3");
  std::array<Expr, Jet::size> d;
  d[0] = e;
  for (int n = 1; n <= order; ++n) {
    for (int b = 0; b <= n; ++b) {
      int a = n - b;
      d[Jet::index(a, b)] = a > 0 ? d[Jet::index(a - 1, b)].diff(Var::x) : d[Jet::index(a, b - 1)].diff(Var::xi);
    }
  }
  for (int k = 0; k < Jet::size; ++k) programs_[k] = Program(d[k]);
  zero_ = e.is_zero();
}

Jet JetEvaluator::operator()(PhasePoint pt) const {
  Jet j;
  j.order = order_;
  const int count = (order_ + 1) * (order_ + 2) / 2;
  for (int k = 0; k < count; ++k) j.d[k] = programs_[k].eval(pt);
  return j;
}

Jet eval_jet(const Expr& e, PhasePoint pt, int order) { return JetEvaluator(e, order)(pt); }

// ---------------------------------------------------------------------------
// Symbol series and symmetry checks

SymbolSeries::SymbolSeries(std::vector<Expr> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(Status::invalid_argument, "symbol series needs at least p0");
}

SymbolSeries SymbolSeries::parse(std::span<const std::string> sources) {
  std::vector<Expr> c;
  for (const auto& s : sources) c.push_back(parse_expr(s));
  return SymbolSeries(std::move(c));
}

const Expr& SymbolSeries::coeff(int j) const {
  if (j < 0 || j > order()) return zero_;
  return coeffs_[static_cast<std::size_t>(j)];
}

RealityReport check_principal_real(const SymbolSeries& s, std::span<const PhasePoint> samples, double tol) {
  RealityReport r;
  Program p0(s.coeff(0));
  for (const auto& pt : samples) {
    double im = std::abs(p0.eval(pt).imag());
    if (im > r.worst_imag) {
      r.worst_imag = im;
      r.witness = pt;
    }
  }
  r.pass = r.worst_imag <= tol;
  return r;
}

PtReport check_pt_symmetry(const SymbolSeries& s, std::span<const PhasePoint> samples, double tol) {
  if (samples.empty()) throw Error(Status::invalid_argument, "PT check needs at least one sample point");
  PtReport r;
  for (int j = 0; j <= s.order(); ++j) {
    Program p(s.coeff(j));
    PtViolation v;
    v.coeff = j;
    for (const auto& pt : samples) {
      Complex mirrored = p.eval({-pt.x, pt.xi});
      double gap = std::abs(mirrored - std::conj(p.eval(pt)));
      if (gap > v.worst) {
        v.worst = gap;
        v.witness = pt;
      }
    }
    if (v.worst > tol) r.pass = false;
    r.per_coeff.push_back(v);
  }
  return r;
}

}  // namespace bsq
