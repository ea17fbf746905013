#pragma once

#include <limits>
#include <string>
#include <vector>

#include "bsq/expr.hpp"
#include "bsq/quantize.hpp"

namespace bsq {

/// Dirichlet finite-difference discretization of (hD)^2 + B(x) hD + V(x) on
/// [-L, L]: a complex tridiagonal matrix stored by diagonals.
struct GridOperator {
  double L = 0.0;
  int n = 0;
  double h = 0.0;
  std::vector<Complex> sub, diag, super;  // sub[k] = A(k+1,k), super[k] = A(k,k+1)

  double dx() const { return 2 * L / (n - 1); }
  bool symmetric() const { return sub == super; }
};

/// Q(x, hD) = (hD)^2 + p(x) hD + q(x). Expressions in x only.
GridOperator build_matrix(const Expr& p, const Expr& q, double h, double L, int n);

/// Weyl quantization of a symbol series that is xi^2 + B(x) xi + C(x) at every
/// h-level combination: Op(B xi) = B hD - (ih/2) B'. Throws DomainError otherwise.
GridOperator build_from_symbol(const SymbolSeries& s, double h, double L, int n);

/// Smallest L in the sequence L0, 2 L0, ... with Re V(+-L) >= level (V the
/// effective potential C - B^2/4 of the symbol at ξ = 0); throws DomainError after max_doublings.
double default_half_width(const SymbolSeries& s, double h, double level, double L0 = 1.0, int max_doublings = 12);

/// Eigenvalues with real part in [lo, hi], sorted by real part. Complex
/// symmetric implicit QL after a diagonal similarity; throws EigenError.
std::vector<Complex> eigenvalues(const GridOperator& g, double lo = -std::numeric_limits<double>::infinity(),
                                 double hi = std::numeric_limits<double>::infinity());

/// Same spectrum through LAPACK zgeev on the dense matrix (cross-check; O(n^3)).
std::vector<Complex> eigenvalues_dense(const GridOperator& g, double lo = -std::numeric_limits<double>::infinity(),
                                       double hi = std::numeric_limits<double>::infinity());

/// Lowest eigenvalues after one Richardson step in dx (grids n and 2n - 1).
std::vector<Complex> eigenvalues_extrapolated(const SymbolSeries& s, double h, double L, int n, double hi);

struct SpectralPair {
  int n = 0;
  double E_bs = 0.0;
  Complex E_oracle;
  double gap = 0.0;
};

struct SpectralMatch {
  std::vector<SpectralPair> pairs;
  int offset = 0;  // oracle index = BS label + offset (oracle indices count from the bottom of the list)
  double max_gap = 0.0;
  double max_imag = 0.0;
  int unmatched_bs = 0;
  int unmatched_oracle = 0;

  std::string csv() const;
};

/// Pairs BS roots with oracle eigenvalues (sorted by real part, counted from the
/// bottom of the spectrum) under the constant index offset in [-2, 2] with the smallest mean gap.
SpectralMatch compare_spectra(const std::vector<QuasiEigenvalue>& bs, const std::vector<Complex>& eig);

/// Every eigenvalue is real or has its conjugate in the list, within tol.
bool conjugation_symmetric(const std::vector<Complex>& eig, double tol);

}  // namespace bsq
