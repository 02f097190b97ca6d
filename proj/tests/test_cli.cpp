#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sigmaproof/cli.hpp"

using namespace sigmaproof;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sigmaproof");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& body) {
  auto p = fs::temp_directory_path() / ("sigmaproof_cli_" + name);
  std::ofstream(p) << body;
  return p;
}

double field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ' ', 0) == 0) return std::stod(line.substr(key.size() + 1));
  throw std::runtime_error("no line " + key);
}

}  // namespace

TEST(Cli, ClosedForm) {
  auto r = cli({"closed-form", "0.8"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(field(r.out, "zero_gen_minmax"), 0.0625, 1e-12);
  EXPECT_NE(r.out.find("n/a"), std::string::npos);
  r = cli({"closed-form", "0.75"});
  EXPECT_NEAR(field(r.out, "one_gen_minmax"), 0.375 / 5.25, 1e-9);
  EXPECT_EQ(cli({"closed-form", "0.4"}).code, kExitUsage);
  EXPECT_EQ(cli({"closed-form", "abc"}).code, kExitUsage);
}

TEST(Cli, Roots) {
  auto r = cli({"roots"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(field(r.out, "sigma_pt"), 0.72655, 1e-5);
  EXPECT_NEAR(field(r.out, "sigma_lower"), 0.64368, 1e-5);
  EXPECT_EQ(field(r.out, "sigma_b"), 0.75);
}

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  for (const char* sub : {"closed-form", "roots", "eval", "certify", "net", "prove", "oracle"}) {
    auto r = cli({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_FALSE(r.out.empty()) << sub;
  }
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"prove", "--sample", "5", "--full"}).code, kExitUsage);
  EXPECT_EQ(cli({"prove", "--delta", "0.2"}).code, kExitUsage);
  EXPECT_EQ(cli({"net", "--p1", "0", "--p2", "1,1"}).code, kExitUsage);
  EXPECT_EQ(cli({"eval", "/nonexistent/config.json"}).code, kExitUsage);
}

TEST(Cli, CertifyAll) {
  const auto path = fs::temp_directory_path() / "sigmaproof_cli_reports.json";
  auto r = cli({"certify", "--report", path.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("six_point_0683: PASS"), std::string::npos);
  EXPECT_NE(r.out.find("trapezoid_064368: PASS"), std::string::npos);
  EXPECT_NE(r.out.find("metric_quadrilateral_pt: PASS"), std::string::npos);
  std::ifstream f(path);
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j.size(), 3u);
  fs::remove(path);
  EXPECT_EQ(cli({"certify", "pentagon"}).code, kExitUsage);
}

TEST(Cli, CertifySingleAsJson) {
  auto r = cli({"certify", "interval_set", "--json"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at(0)["overall"].get<bool>());
}

TEST(Cli, EvalMatchesLibrary) {
  const auto cfg = Configuration::planar({{0, 0}, {0, 0.95}, {0.6, -0.7}}, 0.7);
  const auto path = write_temp("tri.json", config_to_json(cfg).dump());
  auto r = cli({"eval", path.string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["M_sharp"]["certified"].get<double>(), M_sharp(cfg).value);
  EXPECT_DOUBLE_EQ(j["bar_M_flat"]["optimum"].get<double>(), bar_M_flat(cfg).optimum);
  EXPECT_DOUBLE_EQ(j["M_sigma"]["certified"].get<double>(), M_sigma(cfg).value);

  r = cli({"eval", path.string(), "--which", "sharp"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("M_sharp optimum"), std::string::npos);
  EXPECT_NE(r.out.find("witness:"), std::string::npos);
  EXPECT_EQ(r.out.find("M_flat"), std::string::npos);

  r = cli({"eval", path.string(), "--radii", "0.1,0.2,0.3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(field(r.out, "F"), eval_F(cfg, {{0.1, 0.2, 0.3}}), 1e-9);
  EXPECT_EQ(cli({"eval", path.string(), "--radii", "0.1,0.2"}).code, kExitUsage);
  EXPECT_EQ(cli({"eval", path.string(), "--radii", "0.1,2,0.3"}).code, kExitUsage);
  EXPECT_EQ(cli({"eval", path.string(), "--which", "round"}).code, kExitUsage);
  fs::remove(path);
}

TEST(Cli, EvalRejectsMalformedConfig) {
  const auto path = write_temp("bad.json", R"({"points": [[0, 0]]})");
  auto r = cli({"eval", path.string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("sigma"), std::string::npos);
  fs::remove(path);
}

TEST(Cli, Oracle) {
  const auto cfg = Configuration::planar({{0, 0}, {0, 0.9}, {0.5, -0.6}}, 0.7);
  const auto path = write_temp("triple.json", config_to_json(cfg).dump());
  auto r = cli({"oracle", path.string(), "--step", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(field(r.out, "sharp"), M_sharp(cfg).optimum, 0.02 + 1e-9);
  fs::remove(path);
}

TEST(Cli, Net) {
  auto r = cli({"net", "--p1", "0,1", "--p2", "0,-1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(field(r.out, "points"), 0);
  r = cli({"net", "--p1", "0,0.93", "--p2", "0.41,-0.55", "--r", "0.3", "--m", "10", "--list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_GT(field(r.out, "points"), 100);
}

TEST(Cli, ProveSmallSample) {
  const auto report = fs::temp_directory_path() / "sigmaproof_cli_prove.json";
  auto r = cli({"prove", "--sigma", "0.75", "--sample", "25", "--quiet", "--report",
                report.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("verdict Proved"), std::string::npos);
  std::ifstream f(report);
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["counts"]["S1"], 25);
  fs::remove(report);
}

TEST(Cli, ProveCheckpointErrors) {
  const auto ck = write_temp("ck.log", "not a checkpoint\n");
  auto r = cli({"prove", "--sigma", "0.75", "--sample", "5", "--quiet", "--checkpoint",
                ck.string()});
  EXPECT_EQ(r.code, kExitFailed);
  EXPECT_NE(r.err.find("--restart"), std::string::npos);
  r = cli({"prove", "--sigma", "0.75", "--sample", "5", "--quiet", "--checkpoint", ck.string(),
           "--restart"});
  EXPECT_EQ(r.code, 0) << r.err;
  fs::remove(ck);
}

TEST(Cli, BinaryRuns) {
  const std::string cmd = std::string(SIGMAPROOF_CLI_PATH) + " closed-form 0.8";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  char buf[256] = {};
  std::string out;
  while (fgets(buf, sizeof buf, p)) out += buf;
  EXPECT_EQ(pclose(p), 0);
  EXPECT_NEAR(field(out, "zero_gen_minmax"), 0.0625, 1e-12);
}
