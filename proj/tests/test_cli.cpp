#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run lab(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" SDOF_LAB_PATH "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("sdof_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
};

bool rational_is(const Json& j, long long n, long long d) { return j == Json::array({n, d}); }

}  // namespace

TEST_F(CliTest, SimulateCsvIsDeterministicAcrossThreadCounts) {
  const std::string args = "simulate --scheme mr_ddp --seeds 4 --p-exp 20,30,40 --out ";
  const auto a = lab(args + path("a.csv") + " --summary " + path("a.json"), "LAB_THREADS=1");
  const auto b = lab(args + path("b.csv") + " --summary " + path("b.json"), "LAB_THREADS=4");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const auto csv = slurp(dir / "a.csv");
  EXPECT_EQ(csv, slurp(dir / "b.csv"));
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header,
            "scheme_id,seed,power,slots,symbols_rx1,symbols_rx2,rate_rx1_bits,rate_rx2_bits,leakage_bits,"
            "decode_residual_max");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.rfind("mr_ddp,", 0), 0U);
    ++rows;
  }
  EXPECT_EQ(rows, 12);
  const auto summary = Json::parse(slurp(dir / "a.json"));
  EXPECT_TRUE(summary.at("pass").get<bool>());
  EXPECT_NEAR(summary.at("rate_slope").at("rx1").get<double>(), 2.0 / 3.0, 0.05);
  EXPECT_EQ(summary.at("decode_failures"), 0);
}

TEST_F(CliTest, SimulateReadsConfigAndFlagsOverride) {
  write("cfg.json", R"({"scheme": "wt_dd_23", "seeds": 2, "p_exp": [20, 40]})");
  const auto r = lab("--config " + path("cfg.json") + " simulate --seeds 3");
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.rfind("wt_dd_23,", 0), 0U);
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST_F(CliTest, SimulateConfigErrorsExitOne) {
  write("bad.json", R"({"scheme": "wt_dd_23", "colour": "blue"})");
  EXPECT_EQ(lab("--config " + path("bad.json") + " simulate").code, 1);
  EXPECT_EQ(lab("simulate --scheme no_such_scheme").code, 1);
  EXPECT_EQ(lab("simulate --scheme wt_dd_23 --mode loud").code, 1);
  EXPECT_EQ(lab("simulate --scheme wt_dd_23 --p-exp 40,20").code, 1);
  EXPECT_EQ(lab("simulate --scheme mr_s30_29_a --sub tjsp99").code, 1);
  EXPECT_EQ(lab("simulate").code, 1);
  EXPECT_EQ(lab("frobnicate").code, 1);
}

TEST_F(CliTest, RegionTheoremOneSegment) {
  const auto r = lab("region --theorem thm1 --lambda dd=1");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_TRUE(rational_is(j.at("ds"), 2, 3));
  EXPECT_EQ(j.at("vertices").size(), 2U);
}

TEST_F(CliTest, RegionCompareReportsGap) {
  const auto r = lab("region --theorem thm6 --compare thm5 --plot " + path("plot.dat"));
  ASSERT_EQ(r.code, 0);
  const auto gap = Json::parse(r.out).at("bound_gap");
  EXPECT_TRUE(gap.at("contained").get<bool>());
  EXPECT_TRUE(rational_is(gap.at("inner_symmetric"), 15, 29));
  EXPECT_TRUE(rational_is(gap.at("outer_symmetric"), 17, 20));
  const auto plot = slurp(dir / "plot.dat");
  EXPECT_NE(plot.find("# thm6"), std::string::npos);
  EXPECT_NE(plot.find("# thm5"), std::string::npos);

  const auto rev = Json::parse(lab("region --theorem thm5 --compare thm6").out);
  EXPECT_FALSE(rev.at("bound_gap").at("contained").get<bool>());
}

TEST_F(CliTest, RegionErrorsExitOne) {
  EXPECT_EQ(lab("region --theorem thm9").code, 1);
  EXPECT_EQ(lab("region --theorem thm1 --lambda dd=1/2").code, 1);
  EXPECT_EQ(lab("region --theorem thm1 --lambda dd").code, 1);
  EXPECT_EQ(lab("region --theorem thm2 --lambda pp=1").code, 1);
}

TEST_F(CliTest, RegionLambdaKeysAreCaseInsensitive) {
  const auto a = lab("region --theorem thm7 --lambda pd=1/2,dp=1/2");
  const auto b = lab("region --theorem thm7 --lambda PD=1/2 --lambda DP=1/2");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, FmOuterBoundFacet) {
  const auto r = lab("fm --outer-bound");
  ASSERT_EQ(r.code, 0);
  bool found = false;
  const auto j = Json::parse(r.out);
  for (const auto& c : j.at("constraints")) {
    const auto& k = c.at("coeffs");
    if (k.size() == 2 && rational_is(k.value("d1", Json()), 4, 1) && rational_is(k.value("d2", Json()), 1, 1) &&
        rational_is(c.at("rhs"), 17, 4))
      found = true;
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, FmFromFile) {
  write("sys.json", R"({
    "variables": [{"name": "x", "upper": 1}, {"name": "y", "upper": 1}],
    "constraints": [{"coeffs": {"x": 1, "y": -1}, "rhs": 0}],
    "eliminate": ["y"]
  })");
  const auto r = lab("fm --input " + path("sys.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("variables").size(), 1U);
  EXPECT_EQ(j.at("eliminated"), Json::array({"y"}));

  write("bad.json", R"({"variables": [{"name": "x"}], "constraints": [], "eliminate": ["z"]})");
  EXPECT_EQ(lab("fm --input " + path("bad.json")).code, 1);
  EXPECT_EQ(lab("fm --input " + path("missing.json")).code, 1);
}

TEST_F(CliTest, VerifyExitCodes) {
  const auto ok = lab("verify --only 1,2,8");
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("[PASS] 8"), std::string::npos);

  const auto bad = lab("verify --only 8 --inject-fault skew-thm6");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("[FAIL] 8"), std::string::npos);

  const auto fb = lab("verify --only 6 --sub fallback32 --slope-seeds 2");
  EXPECT_EQ(fb.code, 0);
  EXPECT_NE(fb.out.find("[SKIPPED] 6"), std::string::npos);

  EXPECT_EQ(lab("verify --inject-fault gremlins").code, 1);
}

TEST_F(CliTest, VerifyDroppedSlotFails) {
  const auto r = lab("verify --only 3 --decode-seeds 2 --inject-fault drop-last-slot");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("[FAIL] 3"), std::string::npos);
}

TEST_F(CliTest, SimulateDumpsTraceAndSystem) {
  const auto r = lab("simulate --scheme mr_ddp --seeds 1 --p-exp 20,30 --out " + path("r.csv") + " --summary " +
                     path("s.json") + " --dump-trace " + path("t.json") + " --dump-system " + path("sys.json"));
  ASSERT_EQ(r.code, 0);
  const auto trace = Json::parse(slurp(dir / "t.json"));
  EXPECT_EQ(trace.at("executed_slots"), 3);
  EXPECT_EQ(trace.at("slots").size(), 3U);
  EXPECT_EQ(trace.at("slots")[0].at("x")[0].size(), 2U);  // [re, im]
  const auto sys = Json::parse(slurp(dir / "sys.json"));
  EXPECT_TRUE(sys.at("nodes").contains("rx1"));
}

TEST_F(CliTest, SimulateBroadcastPerfectState) {
  const auto r = lab("simulate --scheme bc_pp_s2 --seeds 3 --out " + path("r.csv") + " --summary " + path("s.json"));
  ASSERT_EQ(r.code, 0);
  const auto s = Json::parse(slurp(dir / "s.json"));
  EXPECT_NEAR(s.at("rate_slope").at("rx1").get<double>(), 1.0, 0.05);
  EXPECT_NEAR(s.at("rate_slope").at("rx2").get<double>(), 1.0, 0.05);
  EXPECT_TRUE(s.at("pass").get<bool>());
}
