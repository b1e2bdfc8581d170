#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "config.hpp"

namespace fs = std::filesystem;
using driftlab::cli::ConfigError;
using driftlab::cli::merged;
using driftlab::cli::parse_config;

namespace {

const std::vector<std::string> kSections = {"solve", "norms", "zhikov"};

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the CLI with stderr folded into the captured output.
Run cli(const std::string& args) {
  const std::string cmd = std::string(DRIFTLAB_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(DRIFTLAB_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(ConfigParser, SectionsCommentsAndOverlay) {
  const auto f = parse_config(
      "# top\ndomain = unit_disk\nresolution = 16  # inline\n\n[solve]\nresolution = 32\n"
      "[norms]\nlevels=3\n",
      "cfg", kSections);
  EXPECT_EQ(f.top.at("domain"), "unit_disk");
  EXPECT_EQ(f.top.at("resolution"), "16");
  const auto s = merged(f, "solve");
  EXPECT_EQ(s.at("resolution"), "32");
  EXPECT_EQ(s.at("domain"), "unit_disk");
  EXPECT_EQ(s.count("levels"), 0u);
  EXPECT_EQ(merged(f, "zhikov").at("resolution"), "16");
}

TEST(ConfigParser, ErrorsNameTheLine) {
  try {
    parse_config("a = 1\nbroken line\n", "x.cfg", kSections);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg:2"), std::string::npos);
  }
  EXPECT_THROW(parse_config("a = 1\na = 2\n", "x", kSections), ConfigError);
  EXPECT_THROW(parse_config("[bogus]\n", "x", kSections), ConfigError);
  EXPECT_THROW(parse_config("[solve]\n[solve]\n", "x", kSections), ConfigError);
  EXPECT_THROW(parse_config(" = 3\n", "x", kSections), ConfigError);
}

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("solve --config /nonexistent/file").code, 2);
}

TEST(Cli, PoissonSolveReport) {
  const auto dir = scratch("poisson");
  const auto cfg = write_file(dir / "p.cfg",
                              "domain = unit_disk\nresolution = 64\nf_density = 4\n"
                              "exact = paraboloid\nschedule = 1,2\n");
  const auto r = cli("solve --config " + cfg.string() + " --out " + (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("report.json"), std::string::npos);
  const auto doc = nlohmann::json::parse(read_file(dir / "out" / "report.json"));
  EXPECT_EQ(doc["schema"], "driftlab-report/1");
  EXPECT_EQ(doc["subcommand"], "solve");
  EXPECT_LT(doc["report"]["l2_error"].get<double>(), 5e-3);
  EXPECT_TRUE(fs::exists(dir / "out" / "u.csv"));
}

TEST(Cli, MalformedConfigNamesTheKey) {
  const auto dir = scratch("malformed");
  auto cfg = write_file(dir / "a.cfg", "domain = unit_disk\nresolution = sixteen\n");
  auto r = cli("solve --config " + cfg.string() + " --out " + (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("resolution"), std::string::npos) << r.out;

  cfg = write_file(dir / "b.cfg", "domain = unit_disk\nresolution = 8\nresolutoin = 9\n");
  r = cli("solve --config " + cfg.string() + " --out " + (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("resolutoin"), std::string::npos) << r.out;

  cfg = write_file(dir / "c.cfg", "domain = unit_disk\n");
  r = cli("solve --config " + cfg.string() + " --out " + (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("resolution"), std::string::npos) << r.out;

  cfg = write_file(dir / "d.cfg", "domain = unit_disk\nresolution 8\n");
  r = cli("solve --config " + cfg.string() + " --out " + (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("d.cfg:2"), std::string::npos) << r.out;
}

TEST(Cli, ReportsAreDeterministic) {
  const auto dir = scratch("determinism");
  const auto cfg = write_file(dir / "n.cfg",
                              "domain = unit_disk\nresolution = 16\ndrift = random:2\n"
                              "f_density = bump\n");
  std::string docs[2];
  for (int i = 0; i < 2; ++i) {
    const auto out = dir / ("o" + std::to_string(i));
    const auto r = cli("solve --seed 7 --config " + cfg.string() + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.out;
    docs[i] = read_file(out / "report.json");
  }
  EXPECT_EQ(docs[0], docs[1]);
  const auto r = cli("solve --seed 8 --config " + cfg.string() + " --out " +
                     (dir / "o2").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(read_file(dir / "o2" / "report.json"), docs[0]);
}

TEST(Cli, NormsPrintsTable) {
  const auto dir = scratch("norms");
  const auto cfg = write_file(dir / "n.cfg",
                              "[norms]\ndomain = unit_disk\nresolution = 16\nfield = neg_log_r\n"
                              "bmo = false\n");
  const auto r = cli("norms --config " + cfg.string() + " --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("criterion"), std::string::npos);
  EXPECT_NE(r.out.find("bounded"), std::string::npos);
}

TEST(Cli, ZhikovSmallRun) {
  const auto dir = scratch("zhikov");
  const auto r = cli("zhikov --resolution 12 --rho 0.1 --schedule 1,4,16 --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("reproduced"), std::string::npos);
  const auto doc = nlohmann::json::parse(read_file(dir / "report.json"));
  EXPECT_EQ(doc["subcommand"], "zhikov");
  EXPECT_EQ(cli("zhikov --rho 0.5 --out " + dir.string()).code, 2);
}

TEST(Cli, PotentialTruncateCaccioppoli) {
  const auto dir = scratch("others");
  const auto cfg = write_file(
      dir / "all.cfg",
      "[potential]\ndomain = unit_ball\nresolution = 6\nconstruction = newtonian\n"
      "field = curl:bump\ntest_count = 50\n"
      "[truncate]\ndomain = unit_square\nresolution = 12\nfield = sin_pi_product:1\n"
      "lambdas = 0.5,1,2,8\n"
      "[caccioppoli]\ndomain = unit_disk\nresolution = 16\nf_density = 4\nlambdas = 0.5,1,4\n");
  for (const char* sub : {"potential", "truncate", "caccioppoli"}) {
    const auto out = dir / sub;
    const auto r = cli(std::string(sub) + " --config " + cfg.string() + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << sub << "\n" << r.out;
    const auto doc = nlohmann::json::parse(read_file(out / "report.json"));
    EXPECT_EQ(doc["subcommand"], sub);
  }
  EXPECT_TRUE(fs::exists(dir / "potential" / "A.csv"));
  EXPECT_TRUE(fs::exists(dir / "truncate" / "table.csv"));
  EXPECT_TRUE(fs::exists(dir / "caccioppoli" / "weighted.csv"));
}
