/* C interface to the Bohr-Sommerfeld quantization library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions returning bsq_status store a message for the calling thread,
 * readable with bsq_last_error() until the next failing call on that thread.
 */
#ifndef BSQ_H
#define BSQ_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BSQ_API __declspec(dllexport)
#else
#define BSQ_API __attribute__((visibility("default")))
#endif

typedef enum bsq_status {
  BSQ_OK = 0,
  BSQ_VERIFICATION_FAILED = 1,
  BSQ_CONFIG = 2,
  BSQ_ORBIT = 3,
  BSQ_EIGENSOLVER = 4,
  BSQ_PARSE = 5,
  BSQ_DOMAIN = 6,
  BSQ_INVALID_ARGUMENT = 7,
  BSQ_WINDOW = 8,
  BSQ_NON_MONOTONE = 9,
  BSQ_INTERNAL = 10
} bsq_status;

typedef struct bsq_problem bsq_problem;
typedef struct bsq_roots bsq_roots;
typedef struct bsq_spectrum bsq_spectrum;
typedef struct bsq_match bsq_match;
typedef struct bsq_report bsq_report;

/* Zero or negative entries select the library default. */
typedef struct bsq_tolerances {
  double rk_tol;      /* integrator local error */
  double level_tol;   /* |p0 - E| along an orbit */
  double closure_tol; /* return-map closure */
  double root_tol;    /* |S_h(E) - 2 pi n h| */
  double delta_e;     /* d/dE step */
  double stencil;     /* beta0 gradient stencil */
} bsq_tolerances;

typedef struct bsq_actions {
  double E, S0, S1, S2, S3, period;
  double delta_term, p2_term, p1_squared_term, double_bracket;
  double imag_residue;
} bsq_actions;

typedef struct bsq_root {
  int n;
  double E, h, bs_residual;
  int order;
} bsq_root;

typedef struct bsq_pair {
  int n;
  double E_bs, re, im, gap;
} bsq_pair;

typedef struct bsq_match_summary {
  int offset;
  double max_gap, max_imag;
  int unmatched_bs, unmatched_oracle;
} bsq_match_summary;

typedef struct bsq_check {
  const char* name;
  int pass;
  int skipped;
  double residual;
  const char* detail;
} bsq_check;

#define BSQ_VERIFY_FLIP_STAR 1u

BSQ_API const char* bsq_version(void);
BSQ_API const char* bsq_last_error(void);
BSQ_API const char* bsq_status_name(bsq_status s);
BSQ_API void bsq_tolerances_default(bsq_tolerances* tol);

/* Symbol series p0 + h p1 + ... (n_symbols >= 1 expression texts), orbit seed
 * point and energy window [e_lo, e_hi]. tol may be NULL. */
BSQ_API bsq_status bsq_problem_create(const char* const* symbols, size_t n_symbols, double seed_x, double seed_xi,
                                      double e_lo, double e_hi, const bsq_tolerances* tol, bsq_problem** out);
BSQ_API void bsq_problem_destroy(bsq_problem* p);

BSQ_API bsq_status bsq_actions_at(const bsq_problem* p, double E, bsq_actions* out);

/* Quasi-eigenvalues in the problem window at one h. */
BSQ_API bsq_status bsq_quantize(const bsq_problem* p, double h, bsq_roots** out);
BSQ_API size_t bsq_roots_count(const bsq_roots* r);
BSQ_API bsq_status bsq_roots_get(const bsq_roots* r, size_t i, bsq_root* out);
BSQ_API void bsq_roots_destroy(bsq_roots* r);

/* Finite-difference eigenvalues with real part <= e_hi. L <= 0 picks the
 * half-width automatically; extrapolate != 0 adds a Richardson step in dx. */
BSQ_API bsq_status bsq_oracle_spectrum(const bsq_problem* p, double h, double L, int n, double e_hi, int extrapolate,
                                       bsq_spectrum** out);
BSQ_API size_t bsq_spectrum_count(const bsq_spectrum* s);
BSQ_API bsq_status bsq_spectrum_get(const bsq_spectrum* s, size_t i, double* re, double* im);
BSQ_API double bsq_spectrum_half_width(const bsq_spectrum* s);
BSQ_API void bsq_spectrum_destroy(bsq_spectrum* s);

BSQ_API bsq_status bsq_compare(const bsq_roots* r, const bsq_spectrum* s, bsq_match** out);
BSQ_API size_t bsq_match_count(const bsq_match* m);
BSQ_API bsq_status bsq_match_get(const bsq_match* m, size_t i, bsq_pair* out);
BSQ_API bsq_status bsq_match_summary_get(const bsq_match* m, bsq_match_summary* out);
BSQ_API void bsq_match_destroy(bsq_match* m);

/* Identity suite; p may be NULL for the symbolic fixtures only. Returns
 * BSQ_OK even when checks fail; inspect the report. */
BSQ_API bsq_status bsq_verify(const bsq_problem* p, unsigned flags, bsq_report** out);
BSQ_API size_t bsq_report_count(const bsq_report* r);
BSQ_API bsq_status bsq_report_get(const bsq_report* r, size_t i, bsq_check* out);
BSQ_API int bsq_report_all_pass(const bsq_report* r);
BSQ_API void bsq_report_destroy(bsq_report* r);

#ifdef __cplusplus
}
#endif

#endif
