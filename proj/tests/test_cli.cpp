#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "voros/io.hpp"

namespace fs = std::filesystem;
using voros::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(VOROS_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe)
    return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
    r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class Cli : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "voros_cli_test";
    fs::create_directories(dir_);
    quartic_ = (dir_ / "quartic.json").string();
    cubic_ = (dir_ / "cubic.json").string();
    small_ = (dir_ / "small.json").string();
    quartic_code_ = run("quantize --m 4 --levels 64 --out " + quartic_).code;
    cubic_code_ = run("quantize --m 3 --levels 32 --out " + cubic_).code;
    small_code_ = run("quantize --m 4 --levels 16 --out " + small_).code;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static void write(const std::string& file, const std::string& text) { std::ofstream(file) << text; }

  static inline fs::path dir_;
  static inline std::string quartic_, cubic_, small_;
  static inline int quartic_code_ = -1, cubic_code_ = -1, small_code_ = -1;
};

} // namespace

TEST_F(Cli, QuantizeWritesConvergedFile) {
  ASSERT_EQ(quartic_code_, 0);
  const auto s = voros::load_spectrum(quartic_);
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(s.levels.size(), 64u);
  ASSERT_TRUE(s.m.has_value());
  EXPECT_EQ(*s.m, 4.0);
  EXPECT_NEAR(s.alpha, std::numbers::pi / 3, 1e-15);
  EXPECT_NEAR(s.phase_offset, std::numbers::pi / 6, 1e-15);
  EXPECT_FALSE(s.provenance.command_line.empty());
  EXPECT_FALSE(s.provenance.timestamp.empty());
}

TEST_F(Cli, QuantizeRejectsAlphaOutsideRange) {
  EXPECT_EQ(run("quantize --alpha 1.6 --out " + path("bad.json")).code, 65);
  EXPECT_FALSE(fs::exists(path("bad.json")));
}

TEST_F(Cli, QuantizeRejectsConflictingFlags) {
  EXPECT_EQ(run("quantize --m 4 --alpha 1.0 --out " + path("bad.json")).code, 64);
  EXPECT_EQ(run("quantize --m 4").code, 64);
  EXPECT_EQ(run("frobnicate").code, 64);
}

TEST_F(Cli, QuantizeReportsNonConvergence) {
  EXPECT_EQ(run("quantize --m 4 --levels 16 --max-iter 2 --out " + path("short.json")).code, 2);
  EXPECT_FALSE(voros::load_spectrum(path("short.json")).converged);
}

TEST_F(Cli, VerifyQuarticPasses) {
  ASSERT_EQ(quartic_code_, 0);
  const std::string report = path("verify.json");
  const Result r = run("verify --in " + quartic_ + " --report " + report);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verdict: pass"), std::string::npos);
  std::ifstream in(report);
  const json j = json::parse(in);
  EXPECT_EQ(j.at("verdict"), "pass");
}

TEST_F(Cli, VerifyCubicModeSkipsUnprovedClauses) {
  ASSERT_EQ(cubic_code_, 0);
  const std::string report = path("verify_cubic.json");
  const Result r = run("verify --in " + cubic_ + " --report " + report);
  EXPECT_EQ(r.code, 0) << r.out;
  std::ifstream in(report);
  const json j = json::parse(in);
  std::size_t skipped = 0;
  for (const auto& c : j.at("clauses"))
    skipped += c.at("status") == "skipped";
  EXPECT_GE(skipped, 2u);
  EXPECT_TRUE(j.at("witness").is_null());
}

TEST_F(Cli, VerifyMalformedFileIs66) {
  ASSERT_EQ(quartic_code_, 0);
  std::ifstream in(quartic_);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  write(path("truncated.json"), text.substr(0, text.size() / 3));
  EXPECT_EQ(run("verify --in " + path("truncated.json")).code, 66);
  EXPECT_EQ(run("verify --in " + path("missing.json")).code, 66);
}

TEST_F(Cli, OracleHarmonicSpectrum) {
  const Result r = run("oracle --m 2 --ell 1 --count 4");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "re", "im", "method"}));
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(std::stod(rows[k][1]), 2.0 * k - 1.0, 1e-7 * (2.0 * k - 1.0));
    EXPECT_EQ(rows[k][3], "oracle");
  }
}

TEST_F(Cli, OracleHalfLineSpectrumInBothConventions) {
  const Result internal = run("oracle --m 2 --what halfline --count 3 --internal");
  const Result paper = run("oracle --m 2 --what halfline --count 3");
  ASSERT_EQ(internal.code, 0);
  ASSERT_EQ(paper.code, 0);
  const auto s = csv_rows(internal.out);
  const auto lambda = csv_rows(paper.out);
  ASSERT_EQ(s.size(), 4u);
  ASSERT_EQ(lambda.size(), 4u);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_NEAR(std::stod(s[k][1]), 4.0 * k - 1.0, 1e-7 * (4.0 * k - 1.0));
    EXPECT_EQ(std::stod(lambda[k][1]), -std::stod(s[k][1]));
  }
}

TEST_F(Cli, OracleStokesMultiplierAtOrigin) {
  const Result r = run("oracle --m 4 --what C0 --lambda 0");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_NEAR(std::stod(rows[1][0]), std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(std::stod(rows[1][1]), 0.0, 1e-12);
}

TEST_F(Cli, OracleRejectsSmallExponent) {
  EXPECT_EQ(run("oracle --m 1.5 --count 2").code, 65);
  EXPECT_EQ(run("oracle --m 4 --ell 3 --count 2").code, 64);
}

TEST_F(Cli, OracleWindowExhaustedIsPartial) {
  EXPECT_EQ(run("oracle --m 2 --ell 1 --count 10 --limit 8").code, 3);
}

TEST_F(Cli, CrosscheckQuarticWithinTolerance) {
  ASSERT_EQ(quartic_code_, 0);
  const Result r = run("crosscheck --in " + quartic_ + " --count 8 --rtol 1e-5");
  EXPECT_EQ(r.code, 0) << r.out;
  const auto rows = csv_rows(r.out);
  ASSERT_GT(rows.size(), 8u);
  EXPECT_EQ(rows[0][0], "quantity");
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_LE(std::stod(rows[i][4]), 1e-5) << i;
}

TEST_F(Cli, CrosscheckDetectsPerturbedLevel) {
  ASSERT_EQ(quartic_code_, 0);
  std::ifstream in(quartic_);
  json j = json::parse(in);
  j["levels"][0] = j["levels"][0].get<double>() * 1.01;
  voros::write_json(path("perturbed.json"), j);
  EXPECT_EQ(run("crosscheck --in " + path("perturbed.json") + " --count 8").code, 1);
}

TEST_F(Cli, CrosscheckBeyondStoredLevelsIsPartial) {
  ASSERT_EQ(small_code_, 0);
  EXPECT_EQ(run("crosscheck --in " + small_ + " --count 100 --rtol 1e-3").code, 3);
}

TEST_F(Cli, CrosscheckExponentMismatchIs65) {
  ASSERT_EQ(quartic_code_, 0);
  EXPECT_EQ(run("crosscheck --in " + quartic_ + " --m 5").code, 65);
}

TEST_F(Cli, Theorem1QuarticWitness) {
  ASSERT_EQ(quartic_code_, 0);
  const std::string csv = path("witness.csv");
  EXPECT_EQ(run("theorem1 --in " + quartic_ + " --out-csv " + csv).code, 0);
  std::ifstream in(csv);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto rows = csv_rows(buf.str());
  ASSERT_GE(rows.size(), 11u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "re", "im", "method", "kind", "ray", "deviation"}));
  std::size_t zeros = 0, ones = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][6]), 1e-6);
    if (rows[i][4] == "zero") {
      ++zeros;
      EXPECT_EQ(rows[i][5], "0");
    } else {
      ++ones;
      EXPECT_TRUE(rows[i][5] == "1" || rows[i][5] == "-1");
    }
  }
  EXPECT_GE(zeros, 5u);
  EXPECT_GE(ones, 5u);
}

TEST_F(Cli, Theorem1RejectsWideAngle) {
  ASSERT_EQ(quartic_code_, 0);
  EXPECT_EQ(run("theorem1 --alpha 1.2566370614359172 --in " + quartic_).code, 65);
  ASSERT_EQ(cubic_code_, 0);
  EXPECT_EQ(run("theorem1 --in " + cubic_).code, 65);
}

TEST_F(Cli, Theorem1EmptyWindowIsPartial) {
  ASSERT_EQ(quartic_code_, 0);
  const Result r = run("theorem1 --in " + quartic_ + " --window 0.5");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(csv_rows(r.out).size(), 1u);
}
