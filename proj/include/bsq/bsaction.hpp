#pragma once

#include <memory>

#include "bsq/homology.hpp"

namespace bsq {

struct ActionOptions {
  double delta_e = 0.0;  // d/dE step; 0 selects default_delta_e over the well window
  double stencil = 1e-3;
  int loop_samples = 32;  // uniform nodes for the bracket integrals
  int nodes_per_step = 5;
  double solvability_tol = 1e-8;
  double imag_tol = 1e-9;
};

// Contributions to S2; they sum to S2.
struct S2Terms {
  double delta = 0.0;           // -(1/24) d/dE int Delta, i.e. -delta_term
  double p2_bracket = 0.0;      // -int (Re p2 - 1/2 {{b0,p0},b0})
  double p1_squared = 0.0;      // +(1/2) d/dE int (Re p1)^2
  double double_bracket = 0.0;  // int {{b0,p0},b0}, for diagnostics
};

struct ActionSeries {
  double E = 0.0;
  double S0 = 0.0, S1 = 0.0, S2 = 0.0;
  double S3 = 0.0;  // vanishes identically
  double period = 0.0;
  S2Terms terms;
  double imag_residue = 0.0;  // largest discarded imaginary loop integral

  double total(double h) const { return S0 + h * S1 + h * h * S2; }
};

/// pi - int Re p1 dt (Maslov term for a disc-bounded well).
double action_S1(const SymbolSeries& s, const Orbit& orb, int nodes_per_step = 5);

/// (1/24) d/dE int Delta dt, Delta = p0_xx p0_xixi - p0_xxi^2.
double delta_term(const SymbolSeries& s, double E, const WellConfig& well, double delta_e);

/// Evaluates the action series of one symbol on one well. Thread-safe.
class ActionEngine {
 public:
  ActionEngine(SymbolSeries s, WellConfig well, ActionOptions opt = {});

  const SymbolSeries& symbol() const { return s_; }
  const WellConfig& well() const { return well_; }
  const ActionOptions& options() const { return opt_; }
  const BetaField& beta() const { return *beta_; }
  double delta_e() const { return delta_; }

  Orbit orbit(double E) const { return find_orbit(H_, E, well_); }
  double S0(double E) const { return action_S0(orbit(E), opt_.nodes_per_step); }
  /// S0 + h S1 from a single orbit.
  double S0_S1(double E, double h) const;
  double S2(double E) const { return series(E).S2; }
  ActionSeries series(double E) const;

 private:
  SymbolSeries s_;
  WellConfig well_;
  ActionOptions opt_;
  double delta_;
  Hamiltonian H_;
  JetEvaluator p0_;
  Program p1_, p2_;
  std::unique_ptr<BetaField> beta_;
};

double action_S2(const ActionEngine& engine, double E);
ActionSeries action_series(const SymbolSeries& s, double E, const WellConfig& well, const ActionOptions& opt = {});

}  // namespace bsq
