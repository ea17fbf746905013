#pragma once

#include <vector>

#include "bsq/bsaction.hpp"

namespace bsq {

struct QuantizeOptions {
  double root_tol = 1e-10;  // on |S_h(E) - 2 pi n h|
  int max_iter = 40;
};

struct QuasiEigenvalue {
  int n = 0;
  double E = 0.0;
  double h = 0.0;
  double bs_residual = 0.0;
  int order = 2;
};

/// Roots of S0 + h S1 + h^2 S2 = 2 pi n h in [e_lo, e_hi], one per admissible n,
/// sorted by n. The engine's well window must contain [e_lo, e_hi] padded by
/// the d/dE stencil.
std::vector<QuasiEigenvalue> bs_roots(const ActionEngine& engine, double h, double e_lo, double e_hi,
                                      const QuantizeOptions& opt = {});

/// Orbit window for a search window: padded so that d/dE and the beta0 stencil
/// stay inside it at the endpoints.
WellConfig padded_well(WellConfig well, double e_lo, double e_hi, double delta_e, double stencil);

}  // namespace bsq
