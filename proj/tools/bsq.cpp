// Command-line front end. Talks to the library only through bsq/bsq.h.
#include <CLI11.hpp>
#include <json.hpp>

#include <boost/property_tree/ini_parser.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bsq/bsq.h"

namespace {

namespace pt = boost::property_tree;
using json = nlohmann::json;

enum Exit { ok = 0, verify_failed = 1, config_error = 2, orbit_error = 3, eigen_error = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure reported by the library, already mapped to an exit code.
struct RunError : std::runtime_error {
  RunError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

struct RunConfig {
  std::vector<std::string> symbols;  // p0, p1, p2
  double seed_x = 0.0, seed_xi = 1.0;
  double e_min = 0.0, e_max = 0.0;
  std::vector<double> h;
  int e_points = 11;
  bsq_tolerances tol{};
  bool has_problem = false, has_window = false, has_oracle = false;
  double L = 0.0;  // 0: automatic
  int n = 2000;
  bool extrapolate = false;
  std::string out_path;
  std::string format = "csv";
};

const std::map<std::string, std::set<std::string>> schema = {
    {"problem", {"p0", "p1", "p2", "seed"}},
    {"window", {"e_min", "e_max", "h", "h_list", "e_points"}},
    {"tolerances", {"rk_tol", "level_tol", "closure_tol", "root_tol", "deltaE", "stencil"}},
    {"oracle", {"L", "n", "extrapolate"}},
    {"output", {"path", "format"}},
};

double number(const std::string& where, const std::string& text) {
  std::istringstream is(text);
  double v;
  if (!(is >> v) || !(is >> std::ws).eof() || !std::isfinite(v)) throw ConfigError(where + ": not a number: '" + text + "'");
  return v;
}

std::vector<double> numbers(const std::string& where, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(where, item));
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

RunConfig load_config(const std::string& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  RunConfig cfg;
  bsq_tolerances_default(&cfg.tol);
  for (const auto& [section, body] : tree) {
    auto known = schema.find(section);
    if (known == schema.end()) throw ConfigError("unknown section [" + section + "]");
    if (body.empty()) throw ConfigError("'" + section + "' must be a section");
    for (const auto& [key, value] : body)
      if (!known->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    return v ? std::optional<std::string>(*v) : std::nullopt;
  };

  if (tree.count("problem")) {
    cfg.has_problem = true;
    auto p0 = get("problem.p0");
    if (!p0 || p0->empty()) throw ConfigError("[problem] needs p0");
    cfg.symbols.push_back(*p0);
    auto p1 = get("problem.p1"), p2 = get("problem.p2");
    if (p2 && !p1) throw ConfigError("[problem] p2 given without p1");
    if (p1) cfg.symbols.push_back(*p1);
    if (p2) cfg.symbols.push_back(*p2);
    if (auto s = get("problem.seed")) {
      auto v = numbers("problem.seed", *s);
      if (v.size() != 2) throw ConfigError("problem.seed: expected 'x, xi'");
      cfg.seed_x = v[0];
      cfg.seed_xi = v[1];
    }
  }
  if (tree.count("window")) {
    cfg.has_window = true;
    auto lo = get("window.e_min"), hi = get("window.e_max");
    if (!lo || !hi) throw ConfigError("[window] needs e_min and e_max");
    cfg.e_min = number("window.e_min", *lo);
    cfg.e_max = number("window.e_max", *hi);
    if (!(cfg.e_min < cfg.e_max)) throw ConfigError("[window] needs e_min < e_max");
    auto h = get("window.h"), hl = get("window.h_list");
    if (h && hl) throw ConfigError("[window] takes h or h_list, not both");
    if (h) cfg.h = {number("window.h", *h)};
    if (hl) cfg.h = numbers("window.h_list", *hl);
    for (double v : cfg.h)
      if (!(v > 0)) throw ConfigError("[window] h must be positive");
    if (auto e = get("window.e_points")) {
      double v = number("window.e_points", *e);
      if (v < 1 || v != std::floor(v)) throw ConfigError("window.e_points: expected a positive integer");
      cfg.e_points = static_cast<int>(v);
    }
  }
  auto tol = [&](const char* key, double& slot) {
    if (auto v = get(std::string("tolerances.") + key)) {
      slot = number(std::string("tolerances.") + key, *v);
      if (!(slot > 0)) throw ConfigError(std::string("tolerances.") + key + " must be positive");
    }
  };
  tol("rk_tol", cfg.tol.rk_tol);
  tol("level_tol", cfg.tol.level_tol);
  tol("closure_tol", cfg.tol.closure_tol);
  tol("root_tol", cfg.tol.root_tol);
  tol("deltaE", cfg.tol.delta_e);
  tol("stencil", cfg.tol.stencil);
  if (tree.count("oracle")) {
    cfg.has_oracle = true;
    if (auto v = get("oracle.L")) {
      cfg.L = number("oracle.L", *v);
      if (!(cfg.L > 0)) throw ConfigError("oracle.L must be positive");
    }
    if (auto v = get("oracle.n")) {
      double n = number("oracle.n", *v);
      if (n < 16 || n != std::floor(n)) throw ConfigError("oracle.n: expected an integer >= 16");
      cfg.n = static_cast<int>(n);
    }
    if (auto v = get("oracle.extrapolate")) {
      if (*v != "true" && *v != "false") throw ConfigError("oracle.extrapolate: expected true or false");
      cfg.extrapolate = *v == "true";
    }
  }
  if (auto v = get("output.path")) cfg.out_path = *v;
  if (auto v = get("output.format")) cfg.format = *v;
  return cfg;
}

int exit_code(bsq_status s, bool oracle_stage = false) {
  switch (s) {
    case BSQ_OK: return ok;
    case BSQ_VERIFICATION_FAILED: return verify_failed;
    case BSQ_CONFIG:
    case BSQ_PARSE:
    case BSQ_INVALID_ARGUMENT: return config_error;
    case BSQ_DOMAIN: return oracle_stage ? config_error : orbit_error;
    case BSQ_EIGENSOLVER: return eigen_error;
    default: return orbit_error;
  }
}

void check(bsq_status s, bool oracle_stage = false) {
  if (s != BSQ_OK) throw RunError(exit_code(s, oracle_stage), std::string(bsq_status_name(s)) + ": " + bsq_last_error());
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows = {};

  std::string csv() const {
    std::string out;
    for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        if (k) out += ",";
        if (r[k].is_number_float()) out += num(r[k].get<double>());
        else if (r[k].is_string()) out += csv_field(r[k].get<std::string>());
        else out += r[k].dump();
      }
      out += "\n";
    }
    return out;
  }

  json rows_json() const {
    json a = json::array();
    for (const auto& r : rows) {
      json o = json::object();
      for (std::size_t k = 0; k < r.size(); ++k) o[header[k]] = r[k];
      a.push_back(o);
    }
    return a;
  }
};

struct Problem {
  bsq_problem* p = nullptr;
  explicit Problem(const RunConfig& cfg) {
    std::vector<const char*> src;
    for (const auto& s : cfg.symbols) src.push_back(s.c_str());
    check(bsq_problem_create(src.data(), src.size(), cfg.seed_x, cfg.seed_xi, cfg.e_min, cfg.e_max, &cfg.tol, &p));
  }
  ~Problem() { bsq_problem_destroy(p); }
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;
};

void require_problem(const RunConfig& cfg, bool need_h) {
  if (!cfg.has_problem) throw ConfigError("missing [problem] section");
  if (!cfg.has_window) throw ConfigError("missing [window] section");
  if (need_h && cfg.h.empty()) throw ConfigError("[window] needs h or h_list");
}

struct Output {
  std::string data;       // file payload (or stdout without --out)
  std::string summary;    // human-readable lines
};

Output cmd_actions(const RunConfig& cfg, const std::string& fmt) {
  require_problem(cfg, false);
  Problem prob(cfg);
  Table t{{"E", "S0", "S1", "S2", "S3", "T"}};
  std::ostringstream sum;
  for (int k = 0; k < cfg.e_points; ++k) {
    double E = cfg.e_points == 1 ? cfg.e_min : cfg.e_min + k * (cfg.e_max - cfg.e_min) / (cfg.e_points - 1);
    bsq_actions a;
    check(bsq_actions_at(prob.p, E, &a));
    t.rows.push_back({a.E, a.S0, a.S1, a.S2, a.S3, a.period});
  }
  sum << "actions: " << t.rows.size() << " energies on [" << num(cfg.e_min) << ", " << num(cfg.e_max) << "]\n";
  if (fmt == "json") return {json{{"command", "actions"}, {"rows", t.rows_json()}}.dump(2) + "\n", sum.str()};
  return {t.csv(), sum.str()};
}

std::vector<bsq_root> roots_at(const Problem& prob, double h) {
  bsq_roots* r = nullptr;
  check(bsq_quantize(prob.p, h, &r));
  std::vector<bsq_root> out(bsq_roots_count(r));
  for (std::size_t k = 0; k < out.size(); ++k) bsq_roots_get(r, k, &out[k]);
  bsq_roots_destroy(r);
  return out;
}

Output cmd_quantize(const RunConfig& cfg, const std::string& fmt) {
  require_problem(cfg, true);
  Problem prob(cfg);
  Table t{{"h", "n", "E", "bs_residual", "order"}};
  json blocks = json::array();
  std::ostringstream sum;
  for (double h : cfg.h) {
    auto roots = roots_at(prob, h);
    Table b{{"n", "E", "bs_residual", "order"}};
    for (const auto& q : roots) {
      t.rows.push_back({h, q.n, q.E, q.bs_residual, q.order});
      b.rows.push_back({q.n, q.E, q.bs_residual, q.order});
    }
    blocks.push_back({{"h", h}, {"roots", b.rows_json()}});
    sum << "h = " << num(h) << ": " << roots.size() << " quasi-eigenvalues";
    if (!roots.empty()) sum << ", E_" << roots.front().n << " = " << num(roots.front().E);
    sum << "\n";
  }
  if (fmt == "json") return {json{{"command", "quantize"}, {"blocks", blocks}}.dump(2) + "\n", sum.str()};
  return {t.csv(), sum.str()};
}

struct VerifyOutcome {
  Output out;
  bool pass;
};

VerifyOutcome cmd_verify(const std::optional<RunConfig>& cfg, bool flip, const std::string& fmt) {
  std::optional<Problem> prob;
  if (cfg && cfg->has_problem) {
    require_problem(*cfg, false);
    prob.emplace(*cfg);
  }
  bsq_report* r = nullptr;
  check(bsq_verify(prob ? prob->p : nullptr, flip ? BSQ_VERIFY_FLIP_STAR : 0u, &r));
  Table t{{"check", "status", "residual", "detail"}};
  std::ostringstream sum;
  for (std::size_t k = 0; k < bsq_report_count(r); ++k) {
    bsq_check c;
    bsq_report_get(r, k, &c);
    std::string status = c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL";
    t.rows.push_back({c.name, status, c.residual, c.detail});
    sum << status << "  " << c.name << "  residual " << num(c.residual) << "\n";
    if (!c.pass && *c.detail) sum << "      " << c.detail << "\n";
  }
  bool pass = bsq_report_all_pass(r) != 0;
  bsq_report_destroy(r);
  sum << (pass ? "all checks passed" : "verification failed") << (flip ? " (flipped star orientation)" : "") << "\n";
  if (fmt == "json")
    return {{json{{"command", "verify"}, {"pass", pass}, {"checks", t.rows_json()}}.dump(2) + "\n", sum.str()}, pass};
  return {{t.csv(), sum.str()}, pass};
}

Output cmd_oracle(const RunConfig& cfg, const std::string& fmt) {
  require_problem(cfg, true);
  if (!cfg.has_oracle) throw ConfigError("missing [oracle] section");
  Problem prob(cfg);
  Table t{{"h", "n", "E_bs", "Re E_oracle", "Im E_oracle", "gap"}};
  json blocks = json::array();
  std::ostringstream sum;
  std::vector<double> gaps;
  const double e_hi = cfg.e_max + 0.1 * (cfg.e_max - cfg.e_min);
  for (double h : cfg.h) {
    bsq_roots* r = nullptr;
    check(bsq_quantize(prob.p, h, &r));
    bsq_spectrum* s = nullptr;
    bsq_status st = bsq_oracle_spectrum(prob.p, h, cfg.L, cfg.n, e_hi, cfg.extrapolate ? 1 : 0, &s);
    if (st != BSQ_OK) {
      bsq_roots_destroy(r);
      check(st, true);
    }
    bsq_match* m = nullptr;
    st = bsq_compare(r, s, &m);
    double L = bsq_spectrum_half_width(s);
    bsq_roots_destroy(r);
    bsq_spectrum_destroy(s);
    check(st);
    bsq_match_summary ms;
    bsq_match_summary_get(m, &ms);
    Table b{{"n", "E_bs", "Re E_oracle", "Im E_oracle", "gap"}};
    for (std::size_t k = 0; k < bsq_match_count(m); ++k) {
      bsq_pair p;
      bsq_match_get(m, k, &p);
      t.rows.push_back({h, p.n, p.E_bs, p.re, p.im, p.gap});
      b.rows.push_back({p.n, p.E_bs, p.re, p.im, p.gap});
    }
    bsq_match_destroy(m);
    gaps.push_back(ms.max_gap);
    blocks.push_back({{"h", h},
                      {"L", L},
                      {"n_grid", cfg.n},
                      {"offset", ms.offset},
                      {"max_gap", ms.max_gap},
                      {"max_imag", ms.max_imag},
                      {"unmatched_bs", ms.unmatched_bs},
                      {"unmatched_oracle", ms.unmatched_oracle},
                      {"pairs", b.rows_json()}});
    sum << "h = " << num(h) << ": " << b.rows.size() << " pairs, max_gap " << num(ms.max_gap) << ", max |Im| "
        << num(ms.max_imag) << ", offset " << ms.offset << ", L = " << num(L) << "\n";
  }
  for (std::size_t k = 1; k < gaps.size(); ++k)
    if (gaps[k] > 0)
      sum << "gap ratio h = " << num(cfg.h[k - 1]) << " -> " << num(cfg.h[k]) << ": " << num(gaps[k - 1] / gaps[k])
          << "\n";
  if (fmt == "json") return {json{{"command", "oracle"}, {"blocks", blocks}}.dump(2) + "\n", sum.str()};
  return {t.csv(), sum.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohr-Sommerfeld quasi-eigenvalues for PT-symmetric 1-D symbols"};
  app.require_subcommand(1);
  std::string config_path, format, out_path;
  bool flip = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI run configuration");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "write data here; stdout then carries only the summary");
  };
  auto* actions = app.add_subcommand("actions", "S0, S1, S2, S3 and T over an energy grid");
  auto* quantize = app.add_subcommand("quantize", "quasi-eigenvalues for each h");
  auto* verify = app.add_subcommand("verify", "identity and property suite");
  auto* oracle = app.add_subcommand("oracle", "compare against finite-difference eigenvalues");
  for (auto* s : {actions, quantize, verify, oracle}) common(s);
  actions->get_option("--config")->required();
  quantize->get_option("--config")->required();
  oracle->get_option("--config")->required();
  verify->add_flag("--debug-flip-star", flip, "negative control: reverse the star-product orientation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  try {
    std::optional<RunConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    std::string fmt = !format.empty() ? format : cfg ? cfg->format : "csv";
    if (fmt != "csv" && fmt != "json") throw ConfigError("output.format must be csv or json");
    std::string path = !out_path.empty() ? out_path : cfg ? cfg->out_path : "";

    Output out;
    int rc = ok;
    if (*actions) out = cmd_actions(*cfg, fmt);
    else if (*quantize) out = cmd_quantize(*cfg, fmt);
    else if (*oracle) out = cmd_oracle(*cfg, fmt);
    else {
      auto v = cmd_verify(cfg, flip, fmt);
      out = v.out;
      rc = v.pass ? ok : verify_failed;
    }

    if (path.empty()) {
      std::cout << out.data;
      std::cerr << out.summary;
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f || !(f << out.data) || !f.flush()) throw ConfigError("cannot write " + path);
      std::cout << out.summary << "wrote " << path << "\n";
    }
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const RunError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  }
}
