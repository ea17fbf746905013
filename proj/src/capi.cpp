#include "bsq/bsq.h"

#include <memory>
#include <new>
#include <string>

#include "bsq/error.hpp"
#include "bsq/oracle.hpp"
#include "bsq/quantize.hpp"
#include "bsq/verify.hpp"

struct bsq_problem {
  bsq::SymbolSeries symbol;
  double e_lo, e_hi;
  bsq::QuantizeOptions qopt;
  std::unique_ptr<bsq::ActionEngine> engine;
};

struct bsq_roots {
  std::vector<bsq::QuasiEigenvalue> items;
};

struct bsq_spectrum {
  std::vector<bsq::Complex> items;
  double L = 0.0;
};

struct bsq_match {
  bsq::SpectralMatch m;
};

struct bsq_report {
  std::vector<bsq::CheckResult> checks;
};

namespace {

thread_local std::string last_error;

bsq_status fail(bsq_status s, const std::string& what) {
  last_error = what;
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
bsq_status guarded(F&& f) {
  try {
    f();
    return BSQ_OK;
  } catch (const bsq::Error& e) {
    return fail(static_cast<bsq_status>(e.status()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BSQ_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BSQ_INTERNAL, e.what());
  }
}

double pick(double v, double fallback) { return v > 0 ? v : fallback; }

}  // namespace

extern "C" {

const char* bsq_version(void) { return "1.0.0"; }

const char* bsq_last_error(void) { return last_error.c_str(); }

const char* bsq_status_name(bsq_status s) {
  switch (s) {
    case BSQ_OK: return "ok";
    case BSQ_VERIFICATION_FAILED: return "verification failed";
    case BSQ_CONFIG: return "configuration error";
    case BSQ_ORBIT: return "orbit failure";
    case BSQ_EIGENSOLVER: return "eigensolver failure";
    case BSQ_PARSE: return "parse error";
    case BSQ_DOMAIN: return "domain error";
    case BSQ_INVALID_ARGUMENT: return "invalid argument";
    case BSQ_WINDOW: return "energy window error";
    case BSQ_NON_MONOTONE: return "non-monotone action";
    case BSQ_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void bsq_tolerances_default(bsq_tolerances* tol) {
  if (!tol) return;
  bsq::WellConfig w;
  bsq::ActionOptions a;
  bsq::QuantizeOptions q;
  *tol = {w.rk_tol, w.level_tol, w.closure_tol, q.root_tol, 0.0, a.stencil};
}

bsq_status bsq_problem_create(const char* const* symbols, size_t n_symbols, double seed_x, double seed_xi,
                              double e_lo, double e_hi, const bsq_tolerances* tol, bsq_problem** out) {
  if (!out) return fail(BSQ_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  if (!symbols || n_symbols == 0) return fail(BSQ_INVALID_ARGUMENT, "at least the principal symbol is required");
  for (size_t k = 0; k < n_symbols; ++k)
    if (!symbols[k]) return fail(BSQ_INVALID_ARGUMENT, "null symbol text");
  if (!(e_lo < e_hi)) return fail(BSQ_INVALID_ARGUMENT, "energy window must satisfy e_lo < e_hi");
  return guarded([&] {
    bsq_tolerances t;
    bsq_tolerances_default(&t);
    if (tol) {
      t.rk_tol = pick(tol->rk_tol, t.rk_tol);
      t.level_tol = pick(tol->level_tol, t.level_tol);
      t.closure_tol = pick(tol->closure_tol, t.closure_tol);
      t.root_tol = pick(tol->root_tol, t.root_tol);
      t.delta_e = pick(tol->delta_e, 0.0);
      t.stencil = pick(tol->stencil, t.stencil);
    }
    std::vector<std::string> src(symbols, symbols + n_symbols);
    auto p = std::unique_ptr<bsq_problem>(new bsq_problem{bsq::SymbolSeries::parse(src), e_lo, e_hi, {}, nullptr});
    p->qopt.root_tol = t.root_tol;
    bsq::WellConfig well;
    well.seed = {seed_x, seed_xi};
    well.rk_tol = t.rk_tol;
    well.level_tol = t.level_tol;
    well.closure_tol = t.closure_tol;
    bsq::WellConfig window = well;
    window.e_min = e_lo;
    window.e_max = e_hi;
    bsq::check_no_critical_points(bsq::Hamiltonian(p->symbol.coeff(0)), window);
    bsq::ActionOptions opt;
    opt.delta_e = t.delta_e > 0 ? t.delta_e : bsq::default_delta_e(e_lo, e_hi);
    opt.stencil = t.stencil;
    p->engine = std::make_unique<bsq::ActionEngine>(
        p->symbol, bsq::padded_well(well, e_lo, e_hi, opt.delta_e, opt.stencil), opt);
    *out = p.release();
  });
}

void bsq_problem_destroy(bsq_problem* p) { delete p; }

bsq_status bsq_actions_at(const bsq_problem* p, double E, bsq_actions* out) {
  if (!p || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  if (E < p->e_lo || E > p->e_hi) return fail(BSQ_WINDOW, "energy " + std::to_string(E) + " outside the window");
  return guarded([&] {
    auto s = p->engine->series(E);
    *out = {s.E, s.S0, s.S1, s.S2, s.S3, s.period, s.terms.delta, s.terms.p2_bracket, s.terms.p1_squared,
            s.terms.double_bracket, s.imag_residue};
  });
}

bsq_status bsq_quantize(const bsq_problem* p, double h, bsq_roots** out) {
  if (!p || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<bsq_roots>();
    r->items = bsq::bs_roots(*p->engine, h, p->e_lo, p->e_hi, p->qopt);
    *out = r.release();
  });
}

size_t bsq_roots_count(const bsq_roots* r) { return r ? r->items.size() : 0; }

bsq_status bsq_roots_get(const bsq_roots* r, size_t i, bsq_root* out) {
  if (!r || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  if (i >= r->items.size()) return fail(BSQ_INVALID_ARGUMENT, "root index out of range");
  const auto& q = r->items[i];
  *out = {q.n, q.E, q.h, q.bs_residual, q.order};
  return BSQ_OK;
}

void bsq_roots_destroy(bsq_roots* r) { delete r; }

bsq_status bsq_oracle_spectrum(const bsq_problem* p, double h, double L, int n, double e_hi, int extrapolate,
                               bsq_spectrum** out) {
  if (!p || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!(h > 0)) return fail(BSQ_INVALID_ARGUMENT, "h must be positive");
  return guarded([&] {
    auto s = std::make_unique<bsq_spectrum>();
    s->L = L > 0 ? L : bsq::default_half_width(p->symbol, h, e_hi + 5);
    if (extrapolate)
      s->items = bsq::eigenvalues_extrapolated(p->symbol, h, s->L, n, e_hi);
    else
      s->items = bsq::eigenvalues(bsq::build_from_symbol(p->symbol, h, s->L, n),
                                  -std::numeric_limits<double>::infinity(), e_hi);
    *out = s.release();
  });
}

size_t bsq_spectrum_count(const bsq_spectrum* s) { return s ? s->items.size() : 0; }

bsq_status bsq_spectrum_get(const bsq_spectrum* s, size_t i, double* re, double* im) {
  if (!s || !re || !im) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  if (i >= s->items.size()) return fail(BSQ_INVALID_ARGUMENT, "eigenvalue index out of range");
  *re = s->items[i].real();
  *im = s->items[i].imag();
  return BSQ_OK;
}

double bsq_spectrum_half_width(const bsq_spectrum* s) { return s ? s->L : 0.0; }

void bsq_spectrum_destroy(bsq_spectrum* s) { delete s; }

bsq_status bsq_compare(const bsq_roots* r, const bsq_spectrum* s, bsq_match** out) {
  if (!r || !s || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new bsq_match{bsq::compare_spectra(r->items, s->items)}; });
}

size_t bsq_match_count(const bsq_match* m) { return m ? m->m.pairs.size() : 0; }

bsq_status bsq_match_get(const bsq_match* m, size_t i, bsq_pair* out) {
  if (!m || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  if (i >= m->m.pairs.size()) return fail(BSQ_INVALID_ARGUMENT, "pair index out of range");
  const auto& q = m->m.pairs[i];
  *out = {q.n, q.E_bs, q.E_oracle.real(), q.E_oracle.imag(), q.gap};
  return BSQ_OK;
}

bsq_status bsq_match_summary_get(const bsq_match* m, bsq_match_summary* out) {
  if (!m || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  *out = {m->m.offset, m->m.max_gap, m->m.max_imag, m->m.unmatched_bs, m->m.unmatched_oracle};
  return BSQ_OK;
}

void bsq_match_destroy(bsq_match* m) { delete m; }

bsq_status bsq_verify(const bsq_problem* p, unsigned flags, bsq_report** out) {
  if (!out) return fail(BSQ_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  return guarded([&] {
    bsq::VerifyOptions opt;
    if (flags & BSQ_VERIFY_FLIP_STAR) opt.orientation = bsq::moyal::Orientation::flipped;
    auto r = std::make_unique<bsq_report>();
    r->checks = bsq::moyal_suite(opt);
    if (p) {
      auto more = bsq::problem_suite(*p->engine, p->e_lo, p->e_hi, opt);
      r->checks.insert(r->checks.end(), more.begin(), more.end());
    }
    *out = r.release();
  });
}

size_t bsq_report_count(const bsq_report* r) { return r ? r->checks.size() : 0; }

bsq_status bsq_report_get(const bsq_report* r, size_t i, bsq_check* out) {
  if (!r || !out) return fail(BSQ_INVALID_ARGUMENT, "null argument");
  if (i >= r->checks.size()) return fail(BSQ_INVALID_ARGUMENT, "check index out of range");
  const auto& c = r->checks[i];
  *out = {c.name.c_str(), c.pass ? 1 : 0, c.skipped ? 1 : 0, c.residual, c.detail.c_str()};
  return BSQ_OK;
}

int bsq_report_all_pass(const bsq_report* r) { return r && bsq::all_pass(r->checks) ? 1 : 0; }

void bsq_report_destroy(bsq_report* r) { delete r; }

}  // extern "C"
