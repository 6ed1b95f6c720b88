#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace degenfd;
using namespace degenfd::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("degenfd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  std::string outputs(const std::string& stem) const {
    return "[output]\nsolution_csv = " + (dir_ / (stem + ".csv")).string() +
           "\nreport_json = " + (dir_ / (stem + ".json")).string() + "\n";
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

const char* kQuadratic =
    "[problem]\nname = polynomial\nlower = 0\nupper = 1\ncoefficients = 0 1 -1\nlaw = constant\ntheta = 2\n"
    "[discretization]\nh = 0.1\nepsilon = 0.2\n"
    "[solver]\nrho = cfl:0.9\nresidual_tol = 1e-10\n";

}  // namespace

TEST(ParseConfig, DefaultsAndCouplings) {
  std::istringstream in("[problem]\nname = example2\n");
  const RunConfig cfg = parse_config(in);
  EXPECT_EQ(cfg.problem, "example2");
  EXPECT_DOUBLE_EQ(cfg.eps_value(), cfg.h);
  EXPECT_TRUE(std::holds_alternative<PresetRho>(cfg.rho));
  ASSERT_TRUE(cfg.residual_tol.has_value());
  EXPECT_DOUBLE_EQ(*cfg.residual_tol, cfg.h);
  EXPECT_FALSE(cfg.pseudo_time.has_value());
}

TEST(ParseConfig, RhoForms) {
  std::istringstream a("[solver]\nrho = cfl:0.5\n"), b("[solver]\nrho = 2e-6\n");
  EXPECT_DOUBLE_EQ(std::get<CflRho>(parse_config(a).rho).safety, 0.5);
  EXPECT_DOUBLE_EQ(std::get<double>(parse_config(b).rho), 2e-6);
}

TEST(ParseConfig, Rejections) {
  for (const char* text : {"[solver]\npseudo_time = 1\nresidual_tol = 0.01\n", "[solver]\nrho = fast\n",
                           "[problem]\nname = nope\n", "[problem]\ncolour = red\n", "[extras]\na = 1\n",
                           "[discretization]\nh = -0.1\n", "[problem]\nname = polynomial\n",
                           "[problem]\nname = example1\ninitial = random\n", "[verify]\ntrials = 0\n",
                           "[problem]\nname = polynomial\ncoefficients = 1\nlaw = weird\n", "[problem\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_config(in), InputError) << text;
  }
}

TEST_F(CliTest, SolveWritesCsvAndReport) {
  const fs::path cfg = write_config("q.cfg", std::string(kQuadratic) + outputs("q"));
  std::ostringstream log;
  ASSERT_EQ(cmd_solve(cfg, log), kSuccess) << log.str();
  const std::string csv = slurp(dir_ / "q.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x0,u_h,u_exact,error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
  const auto j = nlohmann::json::parse(slurp(dir_ / "q.json"));
  for (const char* key : {"problem", "h", "epsilon", "rho", "iterations", "final_residual", "max_error", "cfl_bound",
                          "converged", "seed", "resolved_config"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_EQ(j["resolved_config"]["rho_mode"], "cfl:0.900000");
  // 17 significant digits round-trip exactly.
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  EXPECT_EQ(std::stod(line.substr(0, line.find(','))), 0.0);
}

TEST_F(CliTest, SolveExitCodes) {
  std::ostringstream log;
  EXPECT_EQ(cmd_solve(dir_ / "missing.cfg", log), kInputError);
  const fs::path coarse = write_config("c.cfg", "[problem]\nname = example1\n[discretization]\nh = 0.3\n" + outputs("c"));
  EXPECT_EQ(cmd_solve(coarse, log), kInputError);
  const fs::path big = write_config(
      "b.cfg", "[problem]\nname = example1\n[discretization]\nh = 0.01\n[solver]\nrho = 1\n" + outputs("b"));
  EXPECT_EQ(cmd_solve(big, log), kNumericalFailure);
  const fs::path capped =
      write_config("m.cfg", std::string(kQuadratic) + "max_iters = 3\n" + outputs("m"));
  EXPECT_EQ(cmd_solve(capped, log), kNumericalFailure);
}

TEST_F(CliTest, ConvergeTable) {
  const fs::path cfg = write_config("e.cfg", "[problem]\nname = example1\n[solver]\npseudo_time = 0.02\n");
  std::ostringstream out, log;
  EXPECT_EQ(cmd_converge(cfg, {0.1}, std::nullopt, out, log), kSuccess);
  std::istringstream rows(out.str());
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  EXPECT_EQ(header, "h,epsilon,iterations,max_error,status,order");
  EXPECT_EQ(row.back(), ',');  // single row, empty order

  std::ostringstream out2;
  EXPECT_EQ(cmd_converge(cfg, {0.1, 0.3}, std::nullopt, out2, log), kNumericalFailure);
  EXPECT_NE(out2.str().find("failed"), std::string::npos);
  EXPECT_EQ(cmd_converge(cfg, {}, std::nullopt, out2, log), kInputError);
}

TEST_F(CliTest, VerifyIsByteDeterministic) {
  const std::string body = std::string(kQuadratic) + "[verify]\nseed = 5\ntrials = 200\nconsistency_h = 0.1 0.05 0.025\n";
  const fs::path cfg = write_config("v.cfg", body + outputs("v"));
  std::ostringstream log;
  ASSERT_EQ(cmd_verify(cfg, dir_ / "a.json", log), kSuccess) << log.str();
  ASSERT_EQ(cmd_verify(cfg, dir_ / "b.json", log), kSuccess);
  EXPECT_EQ(slurp(dir_ / "a.json"), slurp(dir_ / "b.json"));
  const auto j = nlohmann::json::parse(slurp(dir_ / "a.json"));
  EXPECT_EQ(j["seed"], 5);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(cmd_verify(dir_ / "missing.cfg", std::nullopt, log), kInputError);
}

TEST(CsvField, StripsSeparators) { EXPECT_EQ(csv_field("a,b\nc"), "a;b;c"); }
