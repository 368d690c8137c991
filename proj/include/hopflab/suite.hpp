#pragma once

// Suite runner: assembles per-family checks, runs them over a fixed set of
// work items (optionally on several threads), and renders canonical reports.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hopflab/ambient.hpp"
#include "hopflab/catalog.hpp"
#include "hopflab/engine.hpp"
#include "hopflab/spectral.hpp"

namespace hopflab {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::json;

/// Thrown for malformed configuration values (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct FamilySelection {
  std::string name;
  FamilyParams params;
};

/// Named parameter presets; `sig` only matters for the feasibility check later.
inline std::vector<FamilySelection> default_families() {
  const double ch = std::cosh(1.0);
  return {
      {"A+", TypeAParams{1, 4, 0.75}},       {"A-", TypeAParams{1, 4, 2.0}},  {"B+", TypeBParams{0.5}},
      {"B0", TypeBParams{4.0}},              {"B-", TypeBParams{ch * ch}},    {"C", HorosphereParams{1.0}},
      {"A+w", TypeAParams{2, 4, 0.25}},      {"A-w", TypeAParams{1, 3, 2.0}}, {"degenerate", DegenerateParams{}},
  };
}

struct SuiteConfig {
  Signature sig{4, 2};
  std::vector<FamilySelection> families = default_families();
  int samples = 10;       // points per family
  int directions = 5;     // oracle directions per point
  int mu_samples = 100;   // points for the mu statistics
  int isometries = 20;    // random maps per family
  int iso_points = 20;    // points per map
  int hat_trials = 10000;
  std::uint64_t seed = 42;
  int threads = 1;
  bool timing = false;  // wall time in the report breaks byte-identity
  bool determinism_check = true;
  TolerancePolicy tol;
  std::string out;
  std::string format = "json";

  void validate() const {
    tol.validate();
    if (samples < 1 || directions < 1 || mu_samples < 2 || isometries < 0 || iso_points < 1 || hat_trials < 1)
      throw ConfigError("samples, directions, iso_points, hat_trials must be >= 1 and mu_samples >= 2");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (format != "json" && format != "markdown") throw ConfigError("format must be json or markdown");
    if (families.empty()) throw ConfigError("no families selected");
    std::map<std::string, int> seen;
    for (const auto& f : families) {
      if (seen[f.name]++) throw ConfigError("duplicate family name '" + f.name + "'");
      try {
        HypersurfaceSpec(f.params, sig);
      } catch (const Error& e) {
        throw InfeasibleSpec(f.name + ": " + e.what());
      }
    }
  }
};

// ---------------------------------------------------------------------------
// config parsing

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + v);
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': " + v);
  }
}

inline std::uint64_t parse_seed(const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto d = std::stoull(v, &pos);
    if (pos != v.size() || v.starts_with("-")) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid seed: " + v);
  }
}

}  // namespace detail

/// Custom family description from --family/--q/--m/--t style values.
inline FamilySelection custom_family(const std::string& kind, std::optional<int> q, std::optional<int> m,
                                     std::optional<double> t) {
  if (kind == "type-a" || kind == "TypeA") {
    if (!q || !m || !t) throw ConfigError("type-a needs q, m and t");
    return {"custom", TypeAParams{*q, *m, *t}};
  }
  if (kind == "type-b" || kind == "TypeB") {
    if (!t) throw ConfigError("type-b needs t");
    return {"custom", TypeBParams{*t}};
  }
  if (kind == "horosphere" || kind == "Horosphere") return {"custom", HorosphereParams{t.value_or(1.0)}};
  if (kind == "degenerate" || kind == "Degenerate") return {"custom", DegenerateParams{}};
  throw ConfigError("unknown family '" + kind + "'");
}

/// Selects presets by name, e.g. "A+,B0,C"; "all" keeps every preset.
inline std::vector<FamilySelection> select_presets(const std::string& list) {
  const auto all = default_families();
  if (list == "all") return all;
  std::vector<FamilySelection> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name = detail::trim(name);
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& f) { return f.name == name; });
    if (it == all.end()) throw ConfigError("unknown preset '" + name + "'");
    out.push_back(*it);
  }
  return out;
}

/// Applies one dotted key. Unknown keys are errors.
inline void apply_setting(SuiteConfig& c, const std::string& key, const std::string& value) {
  auto& t = c.tol;
  if (key == "n") c.sig.n = static_cast<int>(detail::parse_int(key, value));
  else if (key == "p") c.sig.p = static_cast<int>(detail::parse_int(key, value));
  else if (key == "seed") c.seed = detail::parse_seed(value);
  else if (key == "samples") c.samples = static_cast<int>(detail::parse_int(key, value));
  else if (key == "directions") c.directions = static_cast<int>(detail::parse_int(key, value));
  else if (key == "mu_samples") c.mu_samples = static_cast<int>(detail::parse_int(key, value));
  else if (key == "isometries") c.isometries = static_cast<int>(detail::parse_int(key, value));
  else if (key == "iso_points") c.iso_points = static_cast<int>(detail::parse_int(key, value));
  else if (key == "hat_trials") c.hat_trials = static_cast<int>(detail::parse_int(key, value));
  else if (key == "threads") c.threads = static_cast<int>(detail::parse_int(key, value));
  else if (key == "timing") c.timing = value == "true" || value == "1";
  else if (key == "determinism_check") c.determinism_check = value == "true" || value == "1";
  else if (key == "h" || key == "tol.fd_step") t.fd_step = detail::parse_double(key, value);
  else if (key == "tol.constraint_tol") t.constraint_tol = detail::parse_double(key, value);
  else if (key == "tol.eig_cluster_tol") t.eig_cluster_tol = detail::parse_double(key, value);
  else if (key == "tol.rank_tol") t.rank_tol = detail::parse_double(key, value);
  else if (key == "tol.newton_tol") t.newton_tol = detail::parse_double(key, value);
  else if (key == "tol.newton_max_iter") t.newton_max_iter = static_cast<int>(detail::parse_int(key, value));
  else if (key == "families") c.families = select_presets(value);
  else if (key == "out") c.out = value;
  else if (key == "format") c.format = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

/// key = value lines; '#' starts a comment. Family keys family/q/m/t build one custom family.
inline void apply_config_text(SuiteConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line, kind;
  std::optional<int> q, m;
  std::optional<double> t;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key == "family") kind = value;
    else if (key == "q") q = static_cast<int>(detail::parse_int(key, value));
    else if (key == "m") m = static_cast<int>(detail::parse_int(key, value));
    else if (key == "t") t = detail::parse_double(key, value);
    else apply_setting(c, key, value);
  }
  if (!kind.empty()) c.families = {custom_family(kind, q, m, t)};
}

inline SuiteConfig load_config_file(const std::string& path, SuiteConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(base, ss.str());
  return base;
}

// ---------------------------------------------------------------------------
// report

struct Report {
  Json doc;
  bool all_passed() const { return doc.value("all_passed", false); }
  int exit_code() const { return all_passed() ? 0 : 1; }
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xBF58476D1CE4E5B9ULL);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json clusters_json(const SpectralSummary& s, std::optional<double> mu = {}) {
  Json arr = Json::array();
  for (const auto& c : s.clusters) {
    Json e{{"value", c.value}, {"algebraic", c.algebraic}, {"geometric", c.geometric}};
    if (mu) e["contains_xi"] = std::abs(c.value - *mu) <= 1e-6 * std::max(1.0, std::abs(*mu));
    arr.push_back(e);
  }
  return arr;
}

inline SpectralSummary dee_summary(const RealMatrix& M, const TolerancePolicy& tol) {
  const Eigen::Index k = M.rows();
  return spectral_summary(M.bottomRightCorner(k - 1, k - 1), tol);
}

// Runs `count` independent jobs on `threads` workers; job i writes slot i.
inline void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::jthread> pool;
  for (int w = 0; w < std::min(threads, count); ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct PointResult {
  double defining = 0, hopf = 0, selfadjoint = 0, mu = 0, structure = 0, lemma = 0;
  double oracle = 0, order_e1 = 0, order_e2 = 0, reeb = 0, codazzi = 0, killing = 0, commutator = 0;
  double eta_residual = 0, ricci = 0, symmetries = 0, holomorphic = 0, mu_gradient = 0;
  SpectralSummary full, dee;
  std::string tag, flipped_tag;
  double r = std::numeric_limits<double>::quiet_NaN();
  EtaUmbilicalFit fit;
};

inline constexpr double kOrderStep = 1e-3;

inline PointResult evaluate_point(const HypersurfaceSpec& spec, std::uint64_t seed, int directions,
                                  const TolerancePolicy& tol) {
  PointResult r;
  const AmbientVector z = sample_point(spec, seed);
  r.defining = defining_residual(spec, z).max_abs();
  const auto frames = tangent_and_dee_frames(spec, z, tol);
  const auto w = descend(spec, z, tol);
  r.hopf = w.hopf_residual;
  r.selfadjoint = w.selfadjoint_defect;
  r.mu = hopf_data(w).mu;
  r.full = spectral_summary(w.matrix, tol);
  r.dee = dee_summary(w.matrix, tol);
  const auto st = structure_tensors(spec, z, w.frame);
  r.structure = structure_defects(st).max();
  r.lemma = lemma_aphix_residual(w, st.phi);
  r.commutator = commutator_norm(w.matrix, st.phi);
  r.fit = eta_umbilical_fit(w.matrix, st.eta, st.xi);
  r.eta_residual = r.fit.residual;
  const auto cr = curvature_identities(spec, w, st, seed);
  r.ricci = cr.ricci;
  r.symmetries = cr.symmetries;
  r.holomorphic = cr.holomorphic;

  std::mt19937_64 rng(seed);
  for (int d = 0; d < directions; ++d) {
    const AmbientVector X = random_tangent(frames.full, rng);
    const AmbientVector exact = weingarten_formula(spec, z, X);
    r.oracle = std::max(r.oracle, (numeric_weingarten(spec, z, X, tol) - exact).cwiseAbs().maxCoeff());
    r.order_e1 += (numeric_weingarten(spec, z, X, tol, kOrderStep) - exact).cwiseAbs().maxCoeff();
    r.order_e2 += (numeric_weingarten(spec, z, X, tol, kOrderStep / 2) - exact).cwiseAbs().maxCoeff();
  }
  const AmbientVector X = random_horizontal(w.frame, rng), Y = random_horizontal(w.frame, rng);
  r.reeb = reeb_derivative_residual(spec, z, X, tol);
  r.codazzi = codazzi_residual(spec, z, X, Y, tol);
  r.mu_gradient = std::abs(mu_directional_derivative(spec, z, random_tangent(frames.full, rng), tol));
  r.killing = commutator_killing(spec, z, w, st.phi, seed + 1, 1, tol).killing_residual;

  const int n = spec.sig().n;
  const auto c = classify(w.epsilon, r.full, r.mu, n);
  r.tag = to_string(c.tag);
  r.r = c.r;
  r.flipped_tag = to_string(classify(w.epsilon, spectral_summary(-w.matrix, tol), -r.mu, n).tag);
  return r;
}

struct DegenerateResult {
  double null_norm = 0, AN = 0, Axi = 0, AJz = 0, oracle = 0, defining = 0;
  SpectralSummary full, dee;
};

inline DegenerateResult evaluate_degenerate(const HypersurfaceSpec& spec, std::uint64_t seed, int directions,
                                            const TolerancePolicy& tol) {
  DegenerateResult r;
  const auto& sig = spec.sig();
  const AmbientVector z = sample_point(spec, seed);
  r.defining = defining_residual(spec, z).max_abs();
  const AmbientVector N = normal_field(spec, z), xi = reeb_field(spec, z), Jz = apply_J(z);
  r.null_norm = std::abs(metric_norm2(N, sig));
  r.AN = (weingarten_formula(spec, z, N) - 2.0 * N).norm();
  r.Axi = weingarten_formula(spec, z, xi).norm();
  r.AJz = (weingarten_formula(spec, z, Jz) - xi).norm();
  const auto frames = tangent_and_dee_frames(spec, z, tol);
  r.full = spectral_summary(lift_operator(spec, z, frames.full).matrix, tol);
  r.dee = spectral_summary(lift_operator(spec, z, frames.dee).matrix, tol);
  std::mt19937_64 rng(seed);
  for (int d = 0; d < directions; ++d) {
    const AmbientVector X = random_tangent(frames.full, rng);
    r.oracle = std::max(r.oracle, (numeric_weingarten(spec, z, X, tol) - weingarten_formula(spec, z, X)).cwiseAbs().maxCoeff());
  }
  return r;
}

template <class T, class F>
double worst(const std::vector<T>& v, F f) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, f(x));
  return m;
}

// Table identities over random (r, theta); returns the max relative error.
inline double hat_lambda_table_error(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  auto cot = [](double x) { return 1.0 / std::tan(x); };
  auto coth = [](double x) { return 1.0 / std::tanh(x); };
  double err = 0.0;
  for (int i = 0; i < trials; ++i) {
    // trig rows keep r +- theta inside (0.15, pi/2 - 0.15); hyperbolic rows keep |r - theta| >= 0.1
    double r = 0.3 + 0.9 * U(rng);
    double th = (U(rng) - 0.5) * 2.0 * std::min(r - 0.15, std::numbers::pi / 2 - 0.15 - r);
    err = std::max(err, rel(hat_lambda(cot(r + th), 2 * cot(2 * r), 1), cot(r - th)));
    const double r2 = (U(rng) - 0.5) * 1.2;
    const double lim = std::numbers::pi / 4 - std::abs(r2) - 0.1;
    const double th2 = (U(rng) - 0.5) * 2.0 * std::max(0.0, lim);
    err = std::max(err, rel(hat_lambda(std::tan(r2 + th2), 2 * std::tan(2 * r2), 1), -cot(r2 - th2)));
    const double rh = 0.2 + 1.3 * U(rng);
    double thh = (U(rng) - 0.5) * 2.0 * (rh - 0.1);
    if (std::abs(rh - thh) < 0.1 || std::abs(rh + thh) < 0.1) continue;
    err = std::max(err, rel(hat_lambda(coth(rh + thh), 2 * coth(2 * rh), -1), coth(rh - thh)));
    err = std::max(err, rel(hat_lambda(std::tanh(rh + thh), 2 * coth(2 * rh), -1), std::tanh(rh - thh)));
    err = std::max(err, rel(hat_lambda(coth(rh + thh), 2 * std::tanh(2 * rh), -1), std::tanh(rh - thh)));
    err = std::max(err, rel(hat_lambda(std::tanh(rh + thh), 2 * std::tanh(2 * rh), -1), coth(rh - thh)));
    const double lam = 1.0 + (U(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + 2.0 * U(rng));
    err = std::max(err, rel(hat_lambda(lam, 2.0, -1), 1.0));
  }
  return err;
}

// hat_lambda must raise exactly for consistent (lambda, mu) with eps = -1 and |lambda| = 1.
inline bool exceptional_branch_consistent(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  auto probe = [](double lambda, int eps) {
    const double mu = lambda - eps / lambda;  // lambda^2 - mu lambda - eps = 0
    bool raised = false;
    try {
      hat_lambda(lambda, mu, eps, 1e-12);
    } catch (const ExceptionalCase&) {
      raised = true;
    }
    return raised == (eps == -1 && std::abs(std::abs(lambda) - 1.0) < 1e-12);
  };
  for (double l : {1.0, -1.0})
    for (int eps : {1, -1})
      if (!probe(l, eps)) return false;
  for (int i = 0; i < trials; ++i) {
    double l = U(rng);
    if (std::abs(l) < 1e-3) continue;
    if (!probe(l, 1) || !probe(l, -1)) return false;
  }
  return true;
}

inline Json tolerances_json(const TolerancePolicy& t) {
  return {{"constraint_tol", t.constraint_tol}, {"eig_cluster_tol", t.eig_cluster_tol},
          {"rank_tol", t.rank_tol},             {"fd_step", t.fd_step},
          {"newton_tol", t.newton_tol},         {"newton_max_iter", t.newton_max_iter}};
}

inline Json params_json(const HypersurfaceSpec& s) {
  switch (s.family()) {
    case Family::TypeA: return {{"q", s.a().q}, {"m", s.a().m}, {"t", s.t()}};
    case Family::TypeB:
    case Family::Horosphere: return {{"t", s.t()}};
    case Family::Degenerate: return Json::object();
  }
  return Json::object();
}

// Expected eta-umbilical class from the closed-form invariants alone.
inline std::string expected_tag(const HypersurfaceSpec& spec) {
  if (spec.family() == Family::Horosphere) return "Horosphere";
  if (spec.family() != Family::TypeA) return "NotEtaUmbilical";
  const auto p = predicted_invariants(spec);
  if (p.eigenvalues.size() != 1) return "NotEtaUmbilical";
  const double sgn = p.mu < 0 ? -1.0 : 1.0;
  const double lambda = sgn * p.eigenvalues[0].value;
  if (spec.t() < 1.0) return lambda > 0 ? "A_plus_class1" : "A_plus_class2";
  return lambda > 1.0 ? "A_minus_class3" : "A_minus_class4";
}

struct Criterion {
  std::string id, name;
  bool applicable = false, passed = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    applicable = true;
    if (!ok) {
      passed = false;
      notes.push_back(what);
    }
  }
};

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline bool spectra_equal(const SpectralSummary& s, std::vector<EigenEntry> want, double tol) {
  if (s.clusters.size() != want.size() || !s.complex_clusters.empty()) return false;
  for (std::size_t i = 0; i < want.size(); ++i)
    if (std::abs(s.clusters[i].value - want[i].value) > tol || s.clusters[i].algebraic != want[i].multiplicity ||
        s.clusters[i].geometric != want[i].multiplicity)
      return false;
  return true;
}

}  // namespace detail

/// Runs every check for the configured families. Deterministic for a fixed config.
inline Report run_suite_core(const SuiteConfig& cfg) {
  cfg.validate();
  const auto& tol = cfg.tol;
  std::vector<HypersurfaceSpec> specs;
  for (const auto& f : cfg.families) specs.emplace_back(f.params, cfg.sig);
  const int F = static_cast<int>(specs.size());

  // work items: (family, point) evaluations and (family, map) isometry checks
  struct Item {
    int family, index;
    bool iso;
  };
  std::vector<Item> items;
  for (int f = 0; f < F; ++f) {
    for (int i = 0; i < cfg.samples; ++i) items.push_back({f, i, false});
    if (!specs[f].degenerate())
      for (int i = 0; i < cfg.isometries; ++i) items.push_back({f, i, true});
  }
  std::vector<detail::PointResult> points(items.size());
  std::vector<detail::DegenerateResult> dpoints(items.size());
  std::vector<InvarianceReport> isos(items.size());
  std::vector<double> iso_defect(items.size());
  detail::parallel_for(static_cast<int>(items.size()), cfg.threads, [&](int k) {
    const auto& it = items[static_cast<std::size_t>(k)];
    const auto& spec = specs[static_cast<std::size_t>(it.family)];
    const auto s = detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(it.family) + 1,
                                    static_cast<std::uint64_t>(it.index) + (it.iso ? 1000000 : 0));
    if (it.iso) {
      const auto U = random_block_isometry(spec, s);
      iso_defect[k] = isometry_defect(U, cfg.sig);
      isos[k] = isometry_invariance(spec, U, s + 7, cfg.iso_points, tol);
    } else if (spec.degenerate()) {
      dpoints[k] = detail::evaluate_degenerate(spec, s, cfg.directions, tol);
    } else {
      points[k] = detail::evaluate_point(spec, s, cfg.directions, tol);
    }
  });

  std::vector<detail::Criterion> C(11);
  const char* names[] = {"oracle agreement",     "hopf and mu values",   "spectral tables",
                         "degenerate example",   "lemma and table",      "structure identities",
                         "tube law",             "classifier",           "killing equivalence",
                         "isometry invariance",  "determinism"};
  for (int i = 0; i < 11; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "C%02d", i + 1);
    C[i].id = id;
    C[i].name = names[i];
  }

  Json fams = Json::array();
  for (int f = 0; f < F; ++f) {
    const auto& spec = specs[static_cast<std::size_t>(f)];
    const std::string name = cfg.families[static_cast<std::size_t>(f)].name;
    Json b{{"name", name}, {"label", spec.label()}, {"family", to_string(spec.family())},
           {"parameters", detail::params_json(spec)}, {"epsilon", spec.epsilon()}};
    std::vector<detail::PointResult> pr;
    std::vector<detail::DegenerateResult> dr;
    std::vector<InvarianceReport> ir;
    double max_iso_defect = 0.0;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (items[k].family != f) continue;
      if (items[k].iso) {
        ir.push_back(isos[k]);
        max_iso_defect = std::max(max_iso_defect, iso_defect[k]);
      } else if (spec.degenerate()) {
        dr.push_back(dpoints[k]);
      } else {
        pr.push_back(points[k]);
      }
    }
    auto tagname = [&](const std::string& what) { return name + " " + what; };

    if (spec.degenerate()) {
      using D = detail::DegenerateResult;
      const auto& s0 = dr.front();
      const int n = cfg.sig.n;
      bool zero_ok = true, consistent = true;
      for (const auto& d : dr) {
        const auto* c = d.full.find(0.0, 1e-6);
        zero_ok = zero_ok && c && c->geometric == n - 1 && c->geometric < c->algebraic && !d.full.diagonalizable;
        consistent = consistent && detail::spectra_equal(d.dee, {{0.0, n - 1}, {2.0, n - 1}}, 1e-7);
      }
      Json res{{"null_normal", detail::worst(dr, [](const D& d) { return d.null_norm; })},
               {"A_N_N", detail::worst(dr, [](const D& d) { return d.AN; })},
               {"A_N_xi", detail::worst(dr, [](const D& d) { return d.Axi; })},
               {"A_N_Jchi", detail::worst(dr, [](const D& d) { return d.AJz; })},
               {"oracle", detail::worst(dr, [](const D& d) { return d.oracle; })},
               {"defining", detail::worst(dr, [](const D& d) { return d.defining; })}};
      b["residuals"] = res;
      b["lift_spectrum"] = detail::clusters_json(s0.full);
      b["dee_spectrum"] = detail::clusters_json(s0.dee);
      b["diagonalizable"] = s0.full.diagonalizable;
      auto& c4 = C[3];
      c4.check(res["null_normal"].get<double>() <= 1e-12, tagname("|g(N,N)| = " + detail::fmt(res["null_normal"])));
      for (const char* key : {"A_N_N", "A_N_xi", "A_N_Jchi"})
        c4.check(res[key].get<double>() <= 1e-10, tagname(std::string(key) + " = " + detail::fmt(res[key])));
      c4.check(zero_ok, tagname("eigenvalue 0 is not defective with geometric multiplicity n-1"));
      c4.check(consistent, tagname("dee spectrum differs from {0, 2} x (n-1)"));
      fams.push_back(b);
      continue;
    }

    using P = detail::PointResult;
    const auto pred = predicted_invariants(spec);
    // mu statistics over independent points
    std::vector<double> mus;
    for (int i = 0; i < cfg.mu_samples; ++i)
      mus.push_back(hopf_curvature_at(
          spec, sample_point(spec, detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(f) + 1, 2000000 + i))));
    const double mean = std::accumulate(mus.begin(), mus.end(), 0.0) / mus.size();
    double var = 0.0;
    for (double m : mus) var += (m - mean) * (m - mean);
    const double sd = std::sqrt(var / (mus.size() - 1));
    b["mu"] = {{"mean", mean}, {"stddev", sd}, {"predicted", pred.mu}};

    double e1 = 0, e2 = 0;
    for (const auto& p : pr) e1 += p.order_e1, e2 += p.order_e2;
    const double order = std::log2(e1 / e2);
    bool stable = true;
    double spread = 0.0;
    for (const auto& p : pr) stable = stable && summaries_match(p.full, pr.front().full, 1e-7, &spread);
    const double iso_res = detail::worst(ir, [](const InvarianceReport& r) { return r.max_defining_residual; });
    const double iso_diff = detail::worst(ir, [](const InvarianceReport& r) { return r.max_eigenvalue_difference; });
    bool iso_mult = true;
    for (const auto& r : ir) iso_mult = iso_mult && r.multiplicities_match;

    Json res{{"oracle", detail::worst(pr, [](const P& p) { return p.oracle; })},
             {"convergence_order", order},
             {"defining", detail::worst(pr, [](const P& p) { return p.defining; })},
             {"hopf", detail::worst(pr, [](const P& p) { return p.hopf; })},
             {"selfadjoint", detail::worst(pr, [](const P& p) { return p.selfadjoint; })},
             {"structure", detail::worst(pr, [](const P& p) { return p.structure; })},
             {"lemma", detail::worst(pr, [](const P& p) { return p.lemma; })},
             {"reeb", detail::worst(pr, [](const P& p) { return p.reeb; })},
             {"codazzi", detail::worst(pr, [](const P& p) { return p.codazzi; })},
             {"killing", detail::worst(pr, [](const P& p) { return p.killing; })},
             {"commutator", detail::worst(pr, [](const P& p) { return p.commutator; })},
             {"eta_umbilical", detail::worst(pr, [](const P& p) { return p.eta_residual; })},
             {"ricci", detail::worst(pr, [](const P& p) { return p.ricci; })},
             {"curvature_symmetries", detail::worst(pr, [](const P& p) { return p.symmetries; })},
             {"holomorphic", detail::worst(pr, [](const P& p) { return p.holomorphic; })},
             {"mu_gradient", detail::worst(pr, [](const P& p) { return p.mu_gradient; })},
             {"spectral_spread", spread},
             {"isometry_defining", iso_res},
             {"isometry_spectrum", iso_diff},
             {"isometry_metric_defect", max_iso_defect}};
    b["residuals"] = res;
    b["spectrum"] = detail::clusters_json(pr.front().full, pr.front().mu);
    b["dee_spectrum"] = detail::clusters_json(pr.front().dee);
    Json pe = Json::array();
    for (const auto& e : pred.eigenvalues) pe.push_back({{"value", e.value}, {"multiplicity", e.multiplicity}});
    b["predicted"] = {{"mu", pred.mu}, {"dee", pe}, {"orientation_caveat", pred.orientation_caveat},
                      {"r", detail::finite_or_null(pred.r)}};
    const auto& front = pr.front();
    b["classification"] = {{"tag", front.tag},
                           {"flipped_tag", front.flipped_tag},
                           {"expected", detail::expected_tag(spec)},
                           {"r", detail::finite_or_null(front.r)},
                           {"eta_fit", {{"lambda", front.fit.lambda}, {"rho", front.fit.rho}}}};

    auto v = [&](const char* k) { return res[k].get<double>(); };
    C[0].check(v("oracle") <= 1e-6, tagname("oracle " + detail::fmt(v("oracle"))));
    C[0].check(order >= 1.8 && order <= 2.2, tagname("order " + detail::fmt(order)));
    C[1].check(v("hopf") <= 1e-8, tagname("hopf " + detail::fmt(v("hopf"))));
    C[1].check(std::abs(mean - pred.mu) <= 1e-8, tagname("mu mean off by " + detail::fmt(mean - pred.mu)));
    C[1].check(sd <= 1e-8, tagname("mu stddev " + detail::fmt(sd)));
    bool table_ok = stable;
    for (const auto& p : pr) table_ok = table_ok && detail::spectra_equal(p.dee, pred.eigenvalues, 1e-7);
    C[2].check(table_ok, tagname("measured spectrum differs from the closed-form table"));
    C[4].check(v("lemma") <= 1e-7, tagname("lemma " + detail::fmt(v("lemma"))));
    C[5].check(v("structure") <= 1e-10, tagname("structure " + detail::fmt(v("structure"))));
    C[5].check(v("reeb") <= 1e-4, tagname("reeb " + detail::fmt(v("reeb"))));
    C[5].check(v("codazzi") <= 1e-3, tagname("codazzi " + detail::fmt(v("codazzi"))));
    C[5].check(v("ricci") <= 1e-8, tagname("ricci " + detail::fmt(v("ricci"))));
    C[5].check(v("curvature_symmetries") <= 1e-8, tagname("gauss symmetries " + detail::fmt(v("curvature_symmetries"))));
    C[5].check(v("holomorphic") <= 1e-10, tagname("holomorphic curvature " + detail::fmt(v("holomorphic"))));
    bool tags_ok = true;
    for (const auto& p : pr) tags_ok = tags_ok && p.tag == detail::expected_tag(spec) && p.flipped_tag == p.tag;
    C[7].check(tags_ok, tagname("classification " + front.tag + " (expected " + detail::expected_tag(spec) + ")"));
    if (spec.family() == Family::TypeB)
    {
      double least = std::numeric_limits<double>::infinity();
      for (const auto& p : pr) least = std::min(least, p.commutator);
      C[8].check(least >= 0.5, tagname("commutator " + detail::fmt(least)));
    }
    else
      C[8].check(v("commutator") <= 1e-7, tagname("commutator " + detail::fmt(v("commutator"))));
    C[8].check(v("killing") <= 1e-3, tagname("killing " + detail::fmt(v("killing"))));
    if (cfg.isometries > 0) {
      C[9].check(iso_res <= 1e-10, tagname("isometry defining residual " + detail::fmt(iso_res)));
      C[9].check(iso_diff <= 1e-8 && iso_mult, tagname("isometry spectrum difference " + detail::fmt(iso_diff)));
    }
    fams.push_back(b);
  }
  std::sort(fams.begin(), fams.end(), [](const Json& a, const Json& b) { return a["name"] < b["name"]; });

  // family-independent checks
  const double hat_err = detail::hat_lambda_table_error(cfg.seed, cfg.hat_trials);
  const bool exc_ok = detail::exceptional_branch_consistent(cfg.seed + 1, cfg.hat_trials);
  C[4].check(hat_err <= 1e-9, "hat_lambda table error " + detail::fmt(hat_err));
  C[4].check(exc_ok, "exceptional branch raised outside eps = -1, |lambda| = 1");

  double tube = 0.0, tube_pi4 = 0.0;
  {
    const auto deg = HypersurfaceSpec::degenerate(cfg.sig);
    const AmbientVector z0 = sample_quadric_point(cfg.sig, cfg.seed);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double th = 2.0 * std::numbers::pi * i / 10.0, s = 0.05 + (std::numbers::pi / 4 - 0.05) * j / 9.0;
        const AmbientVector g = tube_point(z0, th, s, cfg.sig, tol);
        tube = std::max(tube, std::abs(std::norm(q_polynomial(g, cfg.sig)) - std::pow(std::sin(2 * s), 2)));
        if (j == 9) tube_pi4 = std::max(tube_pi4, defining_residual(deg, g).max_abs());
      }
  }
  C[6].check(tube <= 1e-10, "tube law defect " + detail::fmt(tube));
  C[6].check(tube_pi4 <= 1e-10, "s = pi/4 residual " + detail::fmt(tube_pi4));

  Json meta{{"seed", cfg.seed},
            {"signature", {{"n", cfg.sig.n}, {"p", cfg.sig.p}}},
            {"samples", cfg.samples},
            {"directions", cfg.directions},
            {"mu_samples", cfg.mu_samples},
            {"isometries", cfg.isometries},
            {"iso_points", cfg.iso_points},
            {"hat_trials", cfg.hat_trials},
            {"order_step", detail::kOrderStep},
            {"tolerances", detail::tolerances_json(tol)},
            {"versions",
             {{"hopflab", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)}}}};
  Report rep;
  rep.doc = {{"meta", meta},
             {"families", fams},
             {"tube", {{"max_defect", tube}, {"pi4_residual", tube_pi4}}},
             {"algebra", {{"hat_lambda_table_error", hat_err}, {"exceptional_branch_consistent", exc_ok}}}};
  Json crit = Json::array();
  for (const auto& c : C) {
    if (c.id == "C11") continue;
    crit.push_back({{"id", c.id}, {"name", c.name}, {"status", !c.applicable ? "n/a" : c.passed ? "pass" : "fail"},
                    {"notes", c.notes}});
  }
  rep.doc["criteria"] = crit;
  return rep;
}

// ---------------------------------------------------------------------------
// canonical emission

namespace detail {

inline void emit_json(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' '), pad2 = pad + "  ";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        out += pad2 + Json(it.key()).dump() + ": ";
        emit_json(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad2;
        emit_json(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string s = buf;
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default: out += j.dump();
  }
}

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string emit_json(const Report& r) {
  std::string out;
  detail::emit_json(r.doc, out, 0);
  out += "\n";
  return out;
}

inline std::string emit_markdown(const Report& r) {
  const auto& d = r.doc;
  std::ostringstream os;
  const auto& meta = d["meta"];
  os << "# hopflab report\n\n";
  os << "signature n=" << meta["signature"]["n"].get<int>() << " p=" << meta["signature"]["p"].get<int>()
     << ", seed " << meta["seed"].get<std::uint64_t>() << ", " << meta["samples"].get<int>() << " points per family\n\n";
  for (const auto& f : d["families"]) {
    os << "## " << f["name"].get<std::string>() << ": " << f["label"].get<std::string>() << "\n\n";
    os << "epsilon = " << f["epsilon"].get<int>() << "\n\n";
    if (f.contains("lift_spectrum")) {
      os << "| eigenvalue | algebraic | geometric |\n|---|---|---|\n";
      for (const auto& c : f["lift_spectrum"])
        os << "| " << detail::g17(c["value"].get<double>()) << " | " << c["algebraic"].get<int>() << " | "
           << c["geometric"].get<int>() << " |\n";
      os << "\ndiagonalizable: " << (f["diagonalizable"].get<bool>() ? "yes" : "no") << "\n\n";
      continue;
    }
    os << "| quantity | value | dim |\n|---|---|---|\n";
    for (const auto& c : f["spectrum"])
      os << "| " << (c["contains_xi"].get<bool>() ? "μ" : "λ") << " | " << detail::g17(c["value"].get<double>())
         << " | " << c["algebraic"].get<int>() << " |\n";
    os << "\nmu stddev " << detail::g17(f["mu"]["stddev"].get<double>()) << ", classification "
       << f["classification"]["tag"].get<std::string>() << "\n\n";
    os << "| residual | value |\n|---|---|\n";
    for (auto it = f["residuals"].begin(); it != f["residuals"].end(); ++it)
      os << "| " << it.key() << " | " << detail::g17(it.value().get<double>()) << " |\n";
    os << "\n";
  }
  os << "## criteria\n\n| id | name | status |\n|---|---|---|\n";
  for (const auto& c : d["criteria"])
    os << "| " << c["id"].get<std::string>() << " | " << c["name"].get<std::string>() << " | "
       << c["status"].get<std::string>() << " |\n";
  os << "\nall passed: " << (d.value("all_passed", false) ? "yes" : "no") << "\n";
  return os.str();
}

inline std::string emit_report(const Report& r, const std::string& format) {
  if (format == "json") return emit_json(r);
  if (format == "markdown") return emit_markdown(r);
  throw ConfigError("unknown format '" + format + "'");
}

inline Report parse_report(const std::string& text) {
  try {
    return Report{Json::parse(text)};
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("report is not valid JSON: ") + e.what());
  }
}

/// Runs the suite; when enabled, re-runs with a different thread count and
/// requires byte-identical JSON.
inline Report run_suite(const SuiteConfig& cfg) {
  Report rep = run_suite_core(cfg);
  Json c11{{"id", "C11"}, {"name", "determinism"}, {"status", "n/a"}, {"notes", Json::array()}};
  if (cfg.determinism_check) {
    SuiteConfig other = cfg;
    other.threads = cfg.threads == 1 ? 4 : 1;
    const bool same = emit_json(rep) == emit_json(run_suite_core(other));
    c11["status"] = same ? "pass" : "fail";
    if (!same) c11["notes"].push_back("reports differ between thread counts");
  }
  rep.doc["criteria"].push_back(c11);
  bool ok = true;
  for (const auto& c : rep.doc["criteria"]) ok = ok && c["status"] != "fail";
  rep.doc["all_passed"] = ok;
  return rep;
}

// ---------------------------------------------------------------------------
// comparison with the printed example tables

struct LedgerRow {
  std::string family, quantity, verdict;
  double printed = 0.0, measured = 0.0;
  int printed_dim = 0, measured_dim = 0;
};

struct TableComparison {
  std::vector<LedgerRow> rows;
  std::map<std::string, std::string> verdicts;  // family name -> match | match-with-caveat | mismatch
};

namespace detail {

struct PrintedItem {
  double mu;
  std::vector<EigenEntry> dee;
  bool caveat = false;
};

// Values as printed in the example item lists, evaluated at the family's parameters.
inline std::optional<PrintedItem> printed_item(const Json& fam, int n) {
  const std::string family = fam["family"];
  const auto& par = fam["parameters"];
  if (family == "Horosphere") return PrintedItem{2.0, {{1.0, 2 * n - 2}}};
  if (family == "TypeA") {
    const int q = par["q"], m = par["m"];
    const double t = par["t"];
    const int d1 = 2 * (m - q - 2), d2 = 2 * (n + q - m + 1);
    if (t < 1.0) {
      const double r = std::acos(std::sqrt(t));
      return PrintedItem{2.0 / std::tan(2 * r), {{-std::tan(r), d1}, {1.0 / std::tan(r), d2}}};
    }
    const double r = std::acosh(std::sqrt(t));
    return PrintedItem{2.0 / std::tanh(2 * r), {{-std::tanh(r), d1}, {1.0 / std::tanh(r), d2}}};
  }
  if (family == "TypeB") {
    const double t = par["t"];
    if (t < 1.0) {
      const double r = std::asin(std::sqrt(t)) / 2.0;
      return PrintedItem{2.0 / std::tan(2 * r), {{1.0 / std::tan(r), n - 1}, {std::tan(r), n - 1}}, true};
    }
    if (std::abs(t - 4.0) < 1e-12) return PrintedItem{std::sqrt(3.0), {{std::sqrt(3.0), n - 1}, {1.0 / std::sqrt(3.0), n - 1}}};
    const double r = std::acosh(std::sqrt(t)) / 2.0;
    return PrintedItem{2.0 * std::tanh(2 * r), {{1.0 / std::tanh(r), n - 1}, {std::tanh(r), n - 1}}};
  }
  return std::nullopt;
}

}  // namespace detail

/// Compares measured mu and D-spectra with the printed example items. Measured
/// values are normalized to mu >= 0 first; a family flagged with the orientation
/// caveat matches "with caveat" when only eigenvalue signs disagree.
inline TableComparison compare_to_printed_tables(const Report& report, const std::vector<std::string>& required = {}) {
  TableComparison out;
  const int n = report.doc["meta"]["signature"]["n"];
  std::map<std::string, const Json*> by_name;
  for (const auto& f : report.doc["families"]) by_name[f["name"]] = &f;
  for (const auto& r : required)
    if (!by_name.count(r)) throw PreconditionError("compare_to_printed_tables: family '" + r + "' missing from report");
  for (const auto& [name, fp] : by_name) {
    const auto& f = *fp;
    if (!f.contains("spectrum")) continue;
    const auto item = detail::printed_item(f, n);
    if (!item) continue;
    double mu = f["mu"]["mean"];
    const double sgn = mu < 0 ? -1.0 : 1.0;
    mu *= sgn;
    std::vector<EigenEntry> meas;
    for (const auto& c : f["dee_spectrum"]) meas.push_back({sgn * c["value"].get<double>(), c["algebraic"].get<int>()});
    std::sort(meas.begin(), meas.end(), [](auto& a, auto& b) { return a.value < b.value; });
    auto printed = item->dee;
    double printed_mu = item->mu;
    if (printed_mu < 0) {
      printed_mu = -printed_mu;
      for (auto& e : printed) e.value = -e.value;
    }
    std::erase_if(printed, [](const EigenEntry& e) { return e.multiplicity == 0; });
    std::sort(printed.begin(), printed.end(), [](auto& a, auto& b) { return a.value < b.value; });
    const double tol = 1e-7;
    bool exact = std::abs(mu - printed_mu) <= tol, up_to_sign = exact;
    out.rows.push_back({name, "mu", exact ? "match" : "mismatch", printed_mu, mu, 1, 1});
    std::vector<bool> used(meas.size(), false);
    for (const auto& p : printed) {
      LedgerRow row{name, "lambda", "mismatch", p.value, std::numeric_limits<double>::quiet_NaN(), p.multiplicity, 0};
      for (std::size_t i = 0; i < meas.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(meas[i].value - p.value) <= tol) {
          used[i] = true;
          row.measured = meas[i].value;
          row.measured_dim = meas[i].multiplicity;
          row.verdict = meas[i].multiplicity == p.multiplicity ? "match" : "mismatch";
          break;
        }
        if (std::abs(meas[i].value + p.value) <= tol && meas[i].multiplicity == p.multiplicity) {
          used[i] = true;
          row.measured = meas[i].value;
          row.measured_dim = meas[i].multiplicity;
          row.verdict = "sign";
          break;
        }
      }
      if (row.verdict != "match") exact = false;
      if (row.verdict == "mismatch") up_to_sign = false;
      if (row.verdict == "sign") row.verdict = item->caveat ? "match-with-caveat" : "mismatch";
      if (row.verdict == "mismatch") up_to_sign = false;
      out.rows.push_back(row);
    }
    out.verdicts[name] = exact ? "match" : (up_to_sign && item->caveat) ? "match-with-caveat" : "mismatch";
  }
  return out;
}

inline Json to_json(const TableComparison& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"family", r.family},
                    {"quantity", r.quantity},
                    {"printed", r.printed},
                    {"printed_dim", r.printed_dim},
                    {"measured", detail::finite_or_null(r.measured)},
                    {"measured_dim", r.measured_dim},
                    {"verdict", r.verdict}});
  return {{"rows", rows}, {"verdicts", c.verdicts}};
}

}  // namespace hopflab
