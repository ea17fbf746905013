#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "bsq/bsq.h"

using std::numbers::pi;

namespace {

bsq_problem* make(std::initializer_list<const char*> symbols, double lo, double hi) {
  std::vector<const char*> src(symbols);
  bsq_problem* p = nullptr;
  REQUIRE(bsq_problem_create(src.data(), src.size(), 0, 1, lo, hi, nullptr, &p) == BSQ_OK);
  return p;
}

const bsq_check* find(std::vector<bsq_check>& checks, const std::string& name) {
  for (auto& c : checks)
    if (name == c.name) return &c;
  return nullptr;
}

std::vector<bsq_check> checks_of(const bsq_report* r) {
  std::vector<bsq_check> out(bsq_report_count(r));
  for (size_t i = 0; i < out.size(); ++i) REQUIRE(bsq_report_get(r, i, &out[i]) == BSQ_OK);
  return out;
}

}  // namespace

TEST_CASE("argument validation and error messages") {
  CHECK(std::string(bsq_version()).size() > 0);
  CHECK(std::string(bsq_status_name(BSQ_EIGENSOLVER)) == "eigensolver failure");

  bsq_problem* p = nullptr;
  CHECK(bsq_problem_create(nullptr, 0, 0, 1, 0, 1, nullptr, &p) == BSQ_INVALID_ARGUMENT);
  CHECK(p == nullptr);
  CHECK(std::string(bsq_last_error()).size() > 0);

  const char* bad[] = {"xi^2 + * x"};
  CHECK(bsq_problem_create(bad, 1, 0, 1, 0.1, 1, nullptr, &p) == BSQ_PARSE);
  CHECK(std::string(bsq_last_error()).find("position") != std::string::npos);

  const char* ok[] = {"xi^2 + x^2"};
  CHECK(bsq_problem_create(ok, 1, 0, 1, 1.0, 0.5, nullptr, &p) == BSQ_INVALID_ARGUMENT);

  // The message is per thread.
  std::string other = "unset";
  std::thread([&] { other = bsq_last_error(); }).join();
  CHECK(other.empty());

  CHECK(bsq_roots_count(nullptr) == 0);
  bsq_problem_destroy(nullptr);
  bsq_roots_destroy(nullptr);
}

TEST_CASE("action table row of the harmonic oscillator") {
  bsq_problem* p = make({"xi^2 + x^2"}, 0.5, 1.5);
  bsq_actions a;
  REQUIRE(bsq_actions_at(p, 1.0, &a) == BSQ_OK);
  CHECK(a.S0 == doctest::Approx(pi).epsilon(1e-9));
  CHECK(a.S1 == doctest::Approx(pi).epsilon(1e-12));
  CHECK(std::abs(a.S2) < 1e-7);
  CHECK(a.S3 == 0.0);
  CHECK(a.period == doctest::Approx(pi).epsilon(1e-10));
  CHECK(bsq_actions_at(p, 3.0, &a) == BSQ_WINDOW);
  bsq_problem_destroy(p);
}

TEST_CASE("critical point inside the window is an orbit failure") {
  // Double well: the window crosses the separatrix energy 1 of the saddle at the origin.
  const char* src[] = {"xi^2 + (x^2 - 1)^2"};
  bsq_problem* p = nullptr;
  CHECK(bsq_problem_create(src, 1, 1, 0.3, 0.5, 1.5, nullptr, &p) == BSQ_ORBIT);
  CHECK(p == nullptr);
  std::string msg = bsq_last_error();
  CHECK(msg.find("critical point") != std::string::npos);
  CHECK(msg.find("E = 1.0") != std::string::npos);
  // Below the separatrix the same well is fine.
  REQUIRE(bsq_problem_create(src, 1, 1, 0.3, 0.5, 0.95, nullptr, &p) == BSQ_OK);
  bsq_actions a;
  CHECK(bsq_actions_at(p, 0.9, &a) == BSQ_OK);
  bsq_problem_destroy(p);
}

TEST_CASE("quantize, oracle and comparison for the shifted PT oscillator") {
  bsq_problem* p = make({"xi^2 + x^2", "i*x"}, 0.05, 0.6);
  bsq_roots* r = nullptr;
  REQUIRE(bsq_quantize(p, 0.1, &r) == BSQ_OK);
  REQUIRE(bsq_roots_count(r) == 3);
  for (size_t k = 0; k < 3; ++k) {
    bsq_root q;
    REQUIRE(bsq_roots_get(r, k, &q) == BSQ_OK);
    CHECK(q.n == static_cast<int>(k) + 1);
    CHECK(std::abs(q.E - ((2 * q.n - 1) * 0.1 + 0.0025)) < 1e-8);
    CHECK(q.bs_residual <= 1e-10);
  }
  bsq_root none;
  CHECK(bsq_roots_get(r, 3, &none) == BSQ_INVALID_ARGUMENT);

  bsq_spectrum* s = nullptr;
  REQUIRE(bsq_oracle_spectrum(p, 0.1, 8, 2000, 0.6, 0, &s) == BSQ_OK);
  CHECK(bsq_spectrum_half_width(s) == 8);
  REQUIRE(bsq_spectrum_count(s) == 3);
  bsq_match* m = nullptr;
  REQUIRE(bsq_compare(r, s, &m) == BSQ_OK);
  bsq_match_summary sum;
  REQUIRE(bsq_match_summary_get(m, &sum) == BSQ_OK);
  CHECK(sum.offset == -1);
  CHECK(sum.max_gap <= 2e-4);
  CHECK(sum.max_imag <= 1e-6);
  CHECK(bsq_match_count(m) == 3);
  bsq_pair pr;
  REQUIRE(bsq_match_get(m, 0, &pr) == BSQ_OK);
  CHECK(pr.n == 1);
  bsq_match_destroy(m);
  bsq_spectrum_destroy(s);
  bsq_roots_destroy(r);

  bsq_spectrum* auto_width = nullptr;
  REQUIRE(bsq_oracle_spectrum(p, 0.1, 0, 500, 0.6, 0, &auto_width) == BSQ_OK);
  CHECK(bsq_spectrum_half_width(auto_width) == 4);
  bsq_spectrum_destroy(auto_width);
  bsq_problem_destroy(p);
}

TEST_CASE("empty window gives no roots") {
  bsq_problem* p = make({"xi^2 + x^2"}, 0.12, 0.28);
  bsq_roots* r = nullptr;
  REQUIRE(bsq_quantize(p, 0.1, &r) == BSQ_OK);
  CHECK(bsq_roots_count(r) == 0);
  bsq_roots_destroy(r);
  bsq_problem_destroy(p);
}

TEST_CASE("oracle rejects symbols outside the quadratic family") {
  bsq_problem* p = make({"xi^4 + x^2"}, 0.5, 1.5);
  bsq_spectrum* s = nullptr;
  CHECK(bsq_oracle_spectrum(p, 0.1, 4, 200, 2, 0, &s) == BSQ_DOMAIN);
  CHECK(s == nullptr);
  bsq_problem_destroy(p);
}

TEST_CASE("verify report distinguishes PT symmetry from solvability") {
  bsq_problem* p = make({"xi^2 + x^2", "x"}, 0.5, 1.5);
  bsq_report* r = nullptr;
  REQUIRE(bsq_verify(p, 0, &r) == BSQ_OK);
  auto checks = checks_of(r);
  REQUIRE(find(checks, "pt_symmetry"));
  REQUIRE(find(checks, "solvability"));
  CHECK(find(checks, "pt_symmetry")->pass == 0);
  CHECK(std::string(find(checks, "pt_symmetry")->detail).find("p1") != std::string::npos);
  CHECK(find(checks, "solvability")->pass == 1);
  CHECK(find(checks, "star_associativity")->pass == 1);
  CHECK(find(checks, "conjugation_h0_h2")->pass == 1);
  CHECK(bsq_report_all_pass(r) == 0);
  bsq_report_destroy(r);
}

TEST_CASE("flipped star orientation is caught by the identity suite") {
  bsq_report* r = nullptr;
  REQUIRE(bsq_verify(nullptr, BSQ_VERIFY_FLIP_STAR, &r) == BSQ_OK);
  auto checks = checks_of(r);
  CHECK(find(checks, "conjugation_h0_h2")->pass == 0);
  CHECK(find(checks, "conjugation_h0_h2")->residual > 0);
  CHECK(find(checks, "star_commutator_bracket")->pass == 0);
  CHECK(find(checks, "star_unit")->pass == 1);
  CHECK(find(checks, "pt_symmetry") == nullptr);
  bsq_report_destroy(r);
}
