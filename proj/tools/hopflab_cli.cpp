// hopflab command line: catalog, verify, classify, report.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hopflab/hopflab.hpp"

namespace {

using namespace hopflab;

enum Exit { kPass = 0, kCriterion = 1, kConfig = 2, kNumeric = 3 };

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f || !(f << text)) throw ConfigError("cannot write " + out);
}

// --out wins; otherwise HOPFLAB_OUT_DIR/<name>; otherwise stdout.
std::string resolve_out(const std::string& out, const std::string& name) {
  if (!out.empty()) return out;
  if (const char* dir = std::getenv("HOPFLAB_OUT_DIR"); dir && *dir) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
  }
  return {};
}

Json catalog_json(const Signature& sig) {
  Json presets = Json::array(), type_a = Json::array();
  for (const auto& f : default_families()) {
    Json e{{"name", f.name}};
    try {
      const HypersurfaceSpec s(f.params, sig);
      e["label"] = s.label();
      e["feasible"] = true;
    } catch (const Error& err) {
      e["feasible"] = false;
      e["reason"] = err.what();
    }
    presets.push_back(e);
  }
  // block layouts for Type A: which sign of t each (q, m) admits
  for (int q = 0; q <= sig.p; ++q)
    for (int m = std::max(sig.p, q + 2); m <= sig.n + 2; ++m) {
      Json ts = Json::array();
      for (double t : {0.5, 2.0, -1.0}) {
        try {
          HypersurfaceSpec::type_a(sig, q, m, t);
          ts.push_back(t < 0 ? "t<0" : t < 1 ? "0<t<1" : "t>1");
        } catch (const InfeasibleSpec&) {
        }
      }
      if (!ts.empty()) type_a.push_back({{"q", q}, {"m", m}, {"t_ranges", ts}});
    }
  return {{"signature", {{"n", sig.n}, {"p", sig.p}}}, {"presets", presets}, {"type_a_layouts", type_a}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hopf hypersurfaces in indefinite complex projective space: checks and reports"};
  app.require_subcommand(1);

  // catalog
  auto* cat = app.add_subcommand("catalog", "List feasible example families for a signature");
  int cat_n = 4, cat_p = 2;
  cat->add_option("--n", cat_n, "complex dimension");
  cat->add_option("--p", cat_p, "number of timelike coordinates");

  // verify
  auto* ver = app.add_subcommand("verify", "Run the verification suite");
  ver->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  std::string config_path, families, family, format, out, ledger;
  std::optional<int> n, p, q, m, samples, threads, newton_max_iter;
  std::optional<double> t, h, constraint_tol, eig_cluster_tol, rank_tol, newton_tol;
  std::optional<std::uint64_t> seed;
  bool timing = false, no_determinism = false;
  ver->add_option("--config", config_path, "key = value config file");
  ver->add_option("--n", n, "complex dimension");
  ver->add_option("--p", p, "number of timelike coordinates");
  ver->add_option("--families", families, "comma separated presets (A+,A-,B+,B0,B-,C,A+w,A-w,degenerate) or all");
  ver->add_option("--family", family, "single custom family: type-a | type-b | horosphere | degenerate");
  ver->add_option("--q", q, "type-a block index q");
  ver->add_option("--m", m, "type-a block index m");
  ver->add_option("--t", t, "family parameter t");
  ver->add_option("--samples", samples, "points per family");
  ver->add_option("--seed", seed, "64-bit seed");
  ver->add_option("--h", h, "finite-difference step");
  ver->add_option("--threads", threads, "worker threads");
  ver->add_option("--out", out, "output file (default stdout or $HOPFLAB_OUT_DIR)");
  ver->add_option("--format", format, "json | markdown")->check(CLI::IsMember({"json", "markdown"}));
  ver->add_option("--ledger", ledger, "also write the printed-table comparison as JSON");
  ver->add_option("--tol.constraint_tol", constraint_tol);
  ver->add_option("--tol.eig_cluster_tol", eig_cluster_tol);
  ver->add_option("--tol.rank_tol", rank_tol);
  ver->add_option("--tol.newton_tol", newton_tol);
  ver->add_option("--tol.newton_max_iter", newton_max_iter);
  ver->add_flag("--timing", timing, "record wall time (reports are then not byte-identical)");
  ver->add_flag("--no-determinism-check", no_determinism, "skip the second run with another thread count");

  // classify
  auto* cls = app.add_subcommand("classify", "Classify a descended operator given as JSON");
  std::string cls_input, cls_out;
  double cls_tol = 1e-6;
  cls->add_option("input", cls_input, "JSON file with matrix, epsilon, n and optionally mu")->required();
  cls->add_option("--tol", cls_tol, "branch tolerance");
  cls->add_option("--out", cls_out, "output file");

  // report
  auto* rep = app.add_subcommand("report", "Re-render a saved JSON report");
  std::string rep_input, rep_format = "markdown", rep_out;
  bool rep_ledger = false;
  rep->add_option("input", rep_input, "report JSON")->required();
  rep->add_option("--format", rep_format, "json | markdown")->check(CLI::IsMember({"json", "markdown"}));
  rep->add_option("--out", rep_out, "output file");
  rep->add_flag("--ledger", rep_ledger, "print the printed-table comparison instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*cat) {
      Report r{catalog_json(Signature(cat_n, cat_p))};
      std::cout << emit_json(r);
      return kPass;
    }

    if (*ver) {
      SuiteConfig cfg;
      if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
      if (n) cfg.sig.n = *n;
      if (p) cfg.sig.p = *p;
      cfg.sig = Signature(cfg.sig.n, cfg.sig.p);
      if (!families.empty()) cfg.families = select_presets(families);
      if (!family.empty()) cfg.families = {custom_family(family, q, m, t)};
      if (samples) cfg.samples = *samples;
      if (seed) cfg.seed = *seed;
      if (h) cfg.tol.fd_step = *h;
      if (threads) cfg.threads = *threads;
      if (!format.empty()) cfg.format = format;
      if (!out.empty()) cfg.out = out;
      if (constraint_tol) cfg.tol.constraint_tol = *constraint_tol;
      if (eig_cluster_tol) cfg.tol.eig_cluster_tol = *eig_cluster_tol;
      if (rank_tol) cfg.tol.rank_tol = *rank_tol;
      if (newton_tol) cfg.tol.newton_tol = *newton_tol;
      if (newton_max_iter) cfg.tol.newton_max_iter = *newton_max_iter;
      if (timing) cfg.timing = true;
      if (no_determinism) cfg.determinism_check = false;

      const auto start = std::chrono::steady_clock::now();
      Report r = run_suite(cfg);
      if (cfg.timing)
        r.doc["meta"]["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const std::string ext = cfg.format == "json" ? "json" : "md";
      write_output(emit_report(r, cfg.format), resolve_out(cfg.out, "report." + ext));
      if (!ledger.empty()) write_output(emit_json(Report{to_json(compare_to_printed_tables(r))}), ledger);
      for (const auto& c : r.doc["criteria"])
        std::cerr << c["id"].get<std::string>() << " " << c["status"].get<std::string>() << "  "
                  << c["name"].get<std::string>() << "\n";
      return r.exit_code();
    }

    if (*cls) {
      const Json in = Json::parse(read_file(cls_input));
      const auto& rows = in.at("matrix");
      const auto k = static_cast<Eigen::Index>(rows.size());
      RealMatrix M(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        if (rows[i].size() != static_cast<std::size_t>(k)) throw ConfigError("matrix must be square");
        for (Eigen::Index j = 0; j < k; ++j) M(i, j) = rows[i][j].get<double>();
      }
      const int eps = in.at("epsilon").get<int>();
      if (eps != 1 && eps != -1) throw ConfigError("epsilon must be +1 or -1");
      const int dim_n = in.value("n", static_cast<int>((k + 1) / 2));
      const double mu = in.contains("mu") ? in["mu"].get<double>() : M(0, 0);
      const auto c = classify(eps, spectral_summary(M), mu, dim_n, cls_tol);
      Json o{{"tag", to_string(c.tag)}, {"mu", c.mu}, {"flipped", c.flipped}, {"reason", c.reason},
             {"constraint", c.constraint}};
      o["r"] = std::isfinite(c.r) ? Json(c.r) : Json(nullptr);
      o["lambda"] = std::isfinite(c.lambda) ? Json(c.lambda) : Json(nullptr);
      write_output(emit_json(Report{o}), cls_out);
      return kPass;
    }

    if (*rep) {
      const Report r = parse_report(read_file(rep_input));
      if (rep_ledger)
        write_output(emit_json(Report{to_json(compare_to_printed_tables(r))}), rep_out);
      else
        write_output(emit_report(r, rep_format), rep_out);
      return kPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InfeasibleSpec& e) {
    std::cerr << "infeasible spec: " << e.what() << "\n";
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const Json::exception& e) {
    std::cerr << "invalid JSON: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kConfig;
  }
  return kPass;
}
