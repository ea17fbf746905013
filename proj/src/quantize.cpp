#include "bsq/quantize.hpp"

#include <cmath>
#include <numbers>

#include "bsq/error.hpp"

namespace bsq {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

// E in [lo, hi] with S0(E) = target; clamps when the target is outside the range.
double bisect_S0(const ActionEngine& eng, double target, double lo, double hi, double s_lo, double s_hi) {
  if (target <= s_lo) return lo;
  if (target >= s_hi) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (eng.S0(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

WellConfig padded_well(WellConfig well, double e_lo, double e_hi, double delta_e, double stencil) {
  double pad = 3 * delta_e + 2 * stencil;
  well.e_min = e_lo - pad;
  well.e_max = e_hi + pad;
  return well;
}

std::vector<QuasiEigenvalue> bs_roots(const ActionEngine& eng, double h, double e_lo, double e_hi,
                                      const QuantizeOptions& opt) {
  if (!(h > 0)) throw Error(Status::invalid_argument, "h must be positive");
  if (!(e_lo < e_hi)) throw Error(Status::invalid_argument, "empty energy window");

  const double sh_lo = eng.series(e_lo).total(h);
  const double sh_hi = eng.series(e_hi).total(h);
  if (!(sh_hi > sh_lo)) throw NonMonotoneError("S_h does not increase", e_lo, e_hi);
  const double s0_lo = eng.S0(e_lo), s0_hi = eng.S0(e_hi);
  if (!(s0_hi > s0_lo)) throw NonMonotoneError("S0 does not increase", e_lo, e_hi);

  const int n_first = static_cast<int>(std::ceil(sh_lo / (two_pi * h)));
  const int n_last = static_cast<int>(std::floor(sh_hi / (two_pi * h)));
  std::vector<QuasiEigenvalue> roots;
  const double delta = eng.delta_e();
  const auto& well = eng.well();

  for (int n = n_first; n <= n_last; ++n) {
    const double target = two_pi * n * h;
    double E = bisect_S0(eng, target, e_lo, e_hi, s0_lo, s0_hi);

    // G = S0 + h S1 costs one orbit; S2 costs a beta0 field sweep. Solve
    // G(E) + h^2 (S2_k + slope_k (E - E_k)) = target with chord steps on G,
    // re-evaluating S2 only in the outer (secant) loop.
    auto G = [&](double e) { return eng.S0_S1(e, h); };
    const double slope = d_dE(G, E, delta, well.e_min, well.e_max);
    if (!(slope > 0)) throw NonMonotoneError("S_h slope is not positive", E - delta, E + delta);

    double prev_E = 0.0, prev_S2 = 0.0, F = 0.0;
    bool have_prev = false;
    for (int outer = 0;; ++outer) {
      ActionSeries a = eng.series(E);
      F = a.total(h) - target;
      if (std::abs(F) <= opt.root_tol || outer >= opt.max_iter) break;
      double s2_slope = have_prev && E != prev_E ? (a.S2 - prev_S2) / (E - prev_E) : 0.0;
      prev_E = E;
      prev_S2 = a.S2;
      have_prev = true;

      const double e_k = E, s2_k = a.S2, chord = slope + h * h * s2_slope;
      double r = F;
      for (int inner = 0; inner < opt.max_iter && std::abs(r) > 0.1 * opt.root_tol; ++inner) {
        double next = std::clamp(E - r / chord, e_lo, e_hi);
        if (next == E) break;
        E = next;
        r = G(E) + h * h * (s2_k + s2_slope * (E - e_k)) - target;
      }
    }
    if (std::abs(F) > opt.root_tol)
      throw Error(Status::non_monotone, "Bohr-Sommerfeld root for n = " + std::to_string(n) +
                                            " did not converge (residual " + std::to_string(std::abs(F)) + ")");
    roots.push_back({n, E, h, std::abs(F), 2});
  }
  for (std::size_t k = 1; k < roots.size(); ++k)
    if (!(roots[k].E > roots[k - 1].E))
      throw NonMonotoneError("roots do not increase with n", roots[k - 1].E, roots[k].E);
  return roots;
}

}  // namespace bsq
