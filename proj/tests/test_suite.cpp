#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "hopflab/suite.hpp"

using namespace hopflab;

namespace {

SuiteConfig small_config() {
  SuiteConfig c;
  c.samples = 2;
  c.directions = 2;
  c.mu_samples = 5;
  c.isometries = 1;
  c.iso_points = 2;
  c.hat_trials = 200;
  c.determinism_check = false;
  return c;
}

const Report& shared_report() {
  static const Report r = run_suite(small_config());
  return r;
}

}  // namespace

TEST(Config, KeyValueText) {
  SuiteConfig c;
  apply_config_text(c,
                    "# comment line\n"
                    "n = 5\n"
                    "p = 2   # trailing comment\n"
                    "seed = 16\n"
                    "tol.rank_tol = 1e-8\n"
                    "families = B0, C\n");
  EXPECT_EQ(c.sig.n, 5);
  EXPECT_EQ(c.seed, 16u);
  EXPECT_EQ(c.tol.rank_tol, 1e-8);
  ASSERT_EQ(c.families.size(), 2u);
  EXPECT_EQ(c.families[1].name, "C");
}

TEST(Config, CustomFamily) {
  SuiteConfig c;
  apply_config_text(c, "family = type-a\nq = 1\nm = 4\nt = 0.75\n");
  ASSERT_EQ(c.families.size(), 1u);
  const auto& a = std::get<TypeAParams>(c.families[0].params);
  EXPECT_EQ(a.q, 1);
  EXPECT_EQ(a.m, 4);
  EXPECT_EQ(a.t, 0.75);
  EXPECT_THROW(apply_config_text(c, "family = type-a\nq = 1\n"), ConfigError);
  EXPECT_THROW(custom_family("type-z", {}, {}, 1.0), ConfigError);
}

TEST(Config, Errors) {
  SuiteConfig c;
  EXPECT_THROW(apply_config_text(c, "bogus = 1\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "samples = ten\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "no equals sign\n"), ConfigError);
  EXPECT_THROW(select_presets("A+,Z"), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/hopflab.conf"), ConfigError);
  c = {};
  c.threads = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, InfeasibleFamilyIsNamed) {
  SuiteConfig c;
  c.families = {custom_family("type-a", 2, 4, 2.0)};
  try {
    c.validate();
    FAIL() << "expected InfeasibleSpec";
  } catch (const InfeasibleSpec& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("custom"), std::string::npos);
    EXPECT_NE(msg.find("q2-block"), std::string::npos);
  }
}

TEST(Suite, AllCriteriaReported) {
  const auto& r = shared_report();
  ASSERT_EQ(r.doc["criteria"].size(), 11u);
  for (const auto& c : r.doc["criteria"]) EXPECT_NE(c["status"], "fail") << c.dump();
  EXPECT_TRUE(r.all_passed());
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.doc["families"].size(), default_families().size());
}

TEST(Suite, JsonRoundTripIsByteStable) {
  const std::string a = emit_json(shared_report());
  EXPECT_EQ(emit_json(parse_report(a)), a);
  EXPECT_THROW(parse_report("{not json"), ConfigError);
  EXPECT_THROW(emit_report(shared_report(), "xml"), ConfigError);
}

TEST(Suite, DeterministicAcrossThreadCounts) {
  auto c = small_config();
  c.families = select_presets("A+,B-,C");
  const std::string one = emit_json(run_suite_core(c));
  c.threads = 3;
  EXPECT_EQ(emit_json(run_suite_core(c)), one);
  c.seed = 43;
  EXPECT_NE(emit_json(run_suite_core(c)), one);
}

TEST(Suite, MarkdownListsMergedMuCluster) {
  const std::string md = emit_markdown(shared_report());
  EXPECT_NE(md.find("## B0"), std::string::npos);
  EXPECT_TRUE(std::regex_search(md, std::regex(R"(\| μ \| 1\.73205080756\d* \| 4 \|)")));
  EXPECT_TRUE(std::regex_search(md, std::regex(R"(\| λ \| 0\.57735026918\d* \| 3 \|)")));
}

TEST(Suite, FamilySpectraInReport) {
  for (const auto& f : shared_report().doc["families"]) {
    if (f["name"] == "C") {
      EXPECT_EQ(f["classification"]["tag"], "Horosphere");
      EXPECT_NEAR(f["mu"]["mean"].get<double>(), 2.0, 1e-10);
    }
    if (f["name"] == "degenerate") EXPECT_FALSE(f["diagonalizable"].get<bool>());
  }
}

TEST(PrintedTables, Verdicts) {
  const auto cmp = compare_to_printed_tables(shared_report(), {"A+", "B0", "C"});
  EXPECT_EQ(cmp.verdicts.at("C"), "match");
  EXPECT_EQ(cmp.verdicts.at("B0"), "match");
  EXPECT_EQ(cmp.verdicts.at("B-"), "match");
  EXPECT_EQ(cmp.verdicts.at("B+"), "match-with-caveat");
  // the printed type A items pair each eigenvalue with the other block's dimension
  EXPECT_EQ(cmp.verdicts.at("A+"), "mismatch");
  EXPECT_EQ(cmp.verdicts.at("A-"), "mismatch");
  EXPECT_EQ(cmp.verdicts.count("degenerate"), 0u);
  EXPECT_THROW(compare_to_printed_tables(shared_report(), {"nope"}), PreconditionError);
  const auto j = to_json(cmp);
  EXPECT_EQ(j["rows"].size(), cmp.rows.size());
}
