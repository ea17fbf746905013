#pragma once

#include <string>
#include <vector>

#include "bsq/bsaction.hpp"
#include "bsq/moyal.hpp"

namespace bsq {

struct CheckResult {
  explicit CheckResult(std::string n, bool ok = true, double res = 0.0)
      : name(std::move(n)), pass(ok), residual(res) {}

  std::string name;
  bool pass = true;
  bool skipped = false;
  double residual = 0.0;  // largest violation; exact checks report the largest offending |coefficient|
  std::string detail;
};

struct VerifyOptions {
  moyal::Orientation orientation = moyal::Orientation::standard;
  int instances = 4;  // random fixtures per exact identity
  unsigned seed = 1;
  double pt_tol = 1e-10;
  double period_tol = 1e-5;  // relative, S0'(E) against T(E)
};

/// Exact star-product identities and the conjugation expansion on seeded fixtures.
std::vector<CheckResult> moyal_suite(const VerifyOptions& opt = {});

/// Reality, PT symmetry, solvability and compatibility of the engine's symbol
/// on orbits at three energies inside [e_lo, e_hi].
std::vector<CheckResult> problem_suite(const ActionEngine& engine, double e_lo, double e_hi,
                                       const VerifyOptions& opt = {});

bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace bsq
