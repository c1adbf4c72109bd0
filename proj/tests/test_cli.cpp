#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(RFH_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string demo(const std::string& name) { return std::string(RFH_DEMO_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rfh_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SpectrumJson) {
  const auto r = run("spectrum --m 2 --n 2 --window -1:2");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["metadata"]["command"], "spectrum");
  const auto& rows = j["result"];
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2]["index"], 2);
  EXPECT_NEAR(rows[2]["tau"].get<double>(), 1.5707963267949, 1e-11);
}

TEST(Cli, SpectrumCsv) {
  const auto r = run("spectrum --m 2 --n 2 --window 0:1 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "tau,support,dim,index,l");
}

TEST(Cli, OutputIsDeterministic) {
  const std::string args = "certify --m 2 --n 2 --l 1";
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto s1 = run("sweep --sweep m=2..5 --task homology"), s2 = run("sweep --sweep m=2..5 --task homology");
  ASSERT_EQ(s1.code, 0);
  EXPECT_EQ(s1.out, s2.out);
}

TEST(Cli, HomologyMatchesOracle) {
  for (int m : {2, 3, 4}) {
    const auto r = run("homology --m " + std::to_string(m) + " --n 2 --window 0:3");
    ASSERT_EQ(r.code, 0) << m;
    for (const auto& d : Json::parse(r.out)["result"]["degrees"]) EXPECT_TRUE(d["match"].get<bool>());
  }
}

TEST(Cli, TrivialGroupNote) {
  const auto r = run("homology --m 1 --n 2");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out)["result"];
  EXPECT_TRUE(j.contains("note"));
  EXPECT_TRUE(j["degrees"].empty());
}

TEST(Cli, ConfigFileFillsUnsetOptions) {
  const auto r = run("homology --config " + demo("homology_m3.json") + " --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out)["result"];
  EXPECT_EQ(j["m"], 3);
  EXPECT_EQ(j["n"], 3);
}

TEST(Cli, ModelFile) {
  const auto r = run("orbit --model " + demo("ellipsoid_m3.json") + " --l 1");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out)["result"];
  EXPECT_LE(j["orbit"]["residual"].get<double>(), 1e-8);
}

TEST(Cli, LiftDemoArc) {
  const auto r = run("lift --loop " + demo("arc_m4.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out)["result"];
  EXPECT_EQ(j["deck"], 1);
  EXPECT_GT(j["margin"].get<double>(), 0.0);
}

TEST(Cli, OutputDirFromEnvironment) {
  const fs::path dir = scratch("out");
  const auto r = run("tate --m 3 --degrees 0:3", "RFH_OUTPUT_DIR=" + dir.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const auto j = Json::parse(slurp(dir / "tate.json"));
  EXPECT_EQ(j["result"].size(), 4u);
  fs::remove_all(dir.parent_path());
}

TEST(Cli, ExplicitOutputWins) {
  const fs::path file = scratch("explicit.json");
  const auto r = run("tate --m 2 -o " + file.string(), "RFH_OUTPUT_DIR=" + scratch("unused").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(file));
  EXPECT_FALSE(fs::exists(scratch("unused") / "tate.json"));
  fs::remove_all(file.parent_path());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("spectrum --m 0").code, 2);
  EXPECT_EQ(run("spectrum --window 3:1").code, 2);
  EXPECT_EQ(run("spectrum --bogus").code, 2);
  EXPECT_EQ(run("homology --config /nonexistent.json").code, 2);
  EXPECT_EQ(run("orbit --model " + demo("ellipsoid_m3.json") + " --seed-tau 0.1").code, 3);
  EXPECT_EQ(run("homology --complex " + demo("zero_boundary_z3.json")).code, 4);
  EXPECT_EQ(run("lift --loop " + demo("arc_m4.json") + " --basepoint 0").code, 0);
  const fs::path coarse = scratch("coarse.json");
  {
    std::ofstream out(coarse);
    // two steps of three eighths of a turn each
    const double h = std::sqrt(0.5);
    out << Json{{"twist", {{"m", 4}, {"k", {1, 1}}}},
                {"samples", {{0.6, 0.0, 0.8, 0.0}, {-0.6 * h, -0.6 * h, -0.8 * h, -0.8 * h}, {0.0, 0.6, 0.0, 0.8}}}};
  }
  EXPECT_EQ(run("lift --loop " + coarse.string()).code, 5);
  fs::remove_all(coarse.parent_path());
}
