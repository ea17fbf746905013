#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "bsq/classical.hpp"

namespace bsq {

struct LoopCheck {
  bool pass = true;
  double value = 0.0;  // the loop integral
};

/// The cohomological equation {b, p0} = q has a global solution on the orbit
/// iff the loop integral of q vanishes.
LoopCheck solvability_check(const std::function<double(PhasePoint)>& q, const Orbit& orb, double tol);
LoopCheck solvability_check(const Expr& q, const Orbit& orb, double tol);

/// beta0(rho) = int_0^T' (1 - t/T') Im p1(flow_t rho) dt, each point integrated
/// over its own orbit. Values are cached by rounded coordinates; lookups are
/// safe from several threads (recomputation races write identical values).
class BetaField {
 public:
  BetaField(const SymbolSeries& s, WellConfig cfg, double stencil = 1e-3);

  double value(PhasePoint rho) const;
  /// (d_x beta0, d_xi beta0) by central differences with one Richardson step.
  PhasePoint gradient(PhasePoint rho) const;
  /// Stencil step at rho: stencil / max(1, |grad p0|).
  double step_at(PhasePoint rho) const;

  bool trivial() const { return im_p1_zero_; }
  const Hamiltonian& hamiltonian() const { return H_; }
  const JetEvaluator& p1() const { return p1_; }
  const WellConfig& config() const { return cfg_; }
  double stencil() const { return stencil_; }
  std::size_t cache_size() const;

 private:
  double compute(PhasePoint rho) const;

  Hamiltonian H_;
  JetEvaluator p1_;
  WellConfig cfg_;
  double stencil_;
  bool im_p1_zero_;

  struct KeyHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const noexcept {
      return std::hash<std::int64_t>{}(k.first) * 0x9e3779b97f4a7c15ULL ^ std::hash<std::int64_t>{}(k.second);
    }
  };
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::pair<std::int64_t, std::int64_t>, double, KeyHash> cache_;
};

/// Uncached beta0 at rho. Requires the Im p1 loop integral on orb to vanish
/// (checked to solvability_tol; throws Error(verification_failed) otherwise).
double solve_beta0(const SymbolSeries& s, const Orbit& orb, PhasePoint rho, const WellConfig& cfg,
                   double solvability_tol = 1e-8);

/// Loop integral of {{beta0,p0},beta0} = {Im p1, beta0}, with
/// {f,g} = d_xi f d_x g - d_x f d_xi g.
double double_bracket_term(const BetaField& bf, const Orbit& orb, int samples = 32);

/// Loop integral of Im p2 - {beta0, Re p1}; pass iff |value| <= tol.
LoopCheck beta1_compat_check(const SymbolSeries& s, const BetaField& bf, const Orbit& orb, double tol,
                             int samples = 32);

}  // namespace bsq
