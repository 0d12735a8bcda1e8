#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "report.hpp"

using namespace carleman;
using namespace carleman::cli;

TEST(Report, SeventeenDigits) {
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(fmt17(2.0), "2");
  EXPECT_EQ(fmt17(std::log(16.0)), "2.7725887222397811");
  EXPECT_EQ(fmt17(std::numeric_limits<double>::quiet_NaN()), "null");
  EXPECT_EQ(fmt17(std::numeric_limits<double>::infinity()), "null");
  for (double x : {1.0 / 3, 1e-300, 6.02214076e23, -0.0078125}) EXPECT_EQ(std::stod(fmt17(x)), x);
}

TEST(Report, JsonAndCsv) {
  json j;
  j["b"] = 0.1;
  j["a"] = {1, 2.5};
  j["c"] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(dump_json(j), "{\n  \"a\": [\n    1,\n    2.5\n  ],\n  \"b\": 0.10000000000000001,\n  \"c\": null\n}\n");
  CsvWriter w({"r", "w"});
  w.row({1.0, 0.1});
  EXPECT_EQ(w.str(), "r,w\n1,0.10000000000000001\n");
}

TEST(Report, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "carleman_test_atomic";
  std::filesystem::remove_all(dir);
  write_atomic(dir, "x.json", "{}\n");
  std::ifstream in(dir / "x.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "{}\n");
  EXPECT_FALSE(std::filesystem::exists(dir / ".x.json.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Config, Defaults) {
  const auto c = config_from_json(json::object());
  EXPECT_EQ(c.kind, "mstar");
  EXPECT_EQ(c.rho, 1.0);
  EXPECT_FALSE(c.K.has_value());
  EXPECT_EQ(c.n_angles, 64);
}

TEST(Config, NestedKeys) {
  const auto c = config_from_json(json::parse(R"({
    "sequence": {"kind": "gammafact", "rho": 2, "K": 500},
    "grids": {"r": {"max": 1e6, "n": 100}, "J": [10, 20]},
    "zeros": {"angles": "real_axis", "d": 0.25},
    "target": {"kind": "cos", "omega": 3}
  })"));
  EXPECT_EQ(c.kind, "gammafact");
  EXPECT_EQ(c.rho, 2.0);
  EXPECT_EQ(*c.K, 500);
  EXPECT_EQ(*c.r_max, 1e6);
  EXPECT_EQ(c.r_n, 100);
  EXPECT_EQ(c.J, (std::vector<int>{10, 20}));
  EXPECT_EQ(c.angles, "real_axis");
  EXPECT_EQ(*c.d, 0.25);
  EXPECT_EQ(c.target, "cos");
  EXPECT_EQ(*c.omega, 3.0);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(config_from_json(json::parse(R"({"sequnce": {}})")), InputError);
  EXPECT_THROW(config_from_json(json::parse(R"({"sequence": {"kind": "mstar", "n": 3}})")), InputError);
  EXPECT_THROW(config_from_json(json::parse(R"({"grids": {"r": {"mx": 3}}})")), InputError);
  EXPECT_THROW(config_from_json(json::parse(R"({"sequence": {"rho": "one"}})")), InputError);
  EXPECT_THROW(config_from_json(json::parse(R"({"eps_rule": "half"})")), InputError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), InputError);
}

TEST(Config, RoundTrip) {
  RunConfig c;
  c.kind = "arctg";
  c.K = 321;
  c.J = {5, 6};
  c.sigma = 0.5;
  const auto j = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(j)), j);
}

TEST(Commands, ExitCodes) {
  EXPECT_EQ(exit_code(Verdict::pass), 0);
  EXPECT_EQ(exit_code(Verdict::failed), 2);
  EXPECT_EQ(exit_code(Verdict::inconclusive), 3);
}

TEST(Commands, SeqCheckReport) {
  RunConfig c;
  const auto o = cmd_seq_check(c);
  EXPECT_EQ(o.verdict, Verdict::pass);
  ASSERT_EQ(o.artifacts.size(), 1u);
  EXPECT_EQ(o.artifacts[0].name, "classm.json");
  const auto j = json::parse(o.artifacts[0].content);
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["config"]["sequence"]["K"], 2000);
}

TEST(Commands, ChecksCarryValueWitnessTolerance) {
  RunConfig c;
  c.r_max = 1e5;
  const auto o = cmd_verify(c, "sandwich");
  const auto j = json::parse(o.artifacts.back().content);
  ASSERT_TRUE(j.contains("checks"));
  for (const auto& ch : j["checks"])
    for (const char* key : {"value", "witness", "stabilized", "tolerance", "verdict"}) EXPECT_TRUE(ch.contains(key));
}

TEST(Commands, Deterministic) {
  RunConfig c;
  c.J = {10, 20};
  const auto a = cmd_fit(c), b = cmd_fit(c);
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) EXPECT_EQ(a.artifacts[i].content, b.artifacts[i].content);
}

TEST(Commands, InputErrors) {
  RunConfig c;
  c.kind = "fibonacci";
  EXPECT_THROW(cmd_seq_check(c), InputError);
  RunConfig t;
  t.target = "table";
  EXPECT_THROW(cmd_fit(t), InputError);
  EXPECT_THROW(cmd_verify(RunConfig{}, "eq9"), InputError);
}
