// Runs the effortcontract binary end to end and checks exit codes and output.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli     = EFFORTCONTRACT_CLI;
const std::string kConfigs = EFFORTCONTRACT_CONFIGS;

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("effortcontract_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const
  {
    auto const path = dir_ / name;
    std::ofstream(path) << text;
    return path;
  }

  static int run(const std::string& args)
  {
    int const status = std::system((kCli + " " + args + " 2>/dev/null").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& path)
  {
    std::ifstream      in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EquilibriumConfig)
{
  auto const out = dir_ / "eq.csv";
  ASSERT_EQ(run("equilibrium --config " + kConfigs + "/baseline_equilibrium.json --output " + out.string()), 0);
  auto const text = slurp(out);
  EXPECT_EQ(text.substr(0, text.find('\n')), "sensor,gamma,delta,a_star,boundary,xi_residual,mse_contribution");
  EXPECT_NE(text.find(",0.5378918200"), std::string::npos);
}

TEST_F(CliTest, AsymmetricEquilibrium)
{
  auto const out = dir_ / "asym.csv";
  ASSERT_EQ(run("equilibrium --config " + kConfigs + "/asymmetric_equilibrium.json --output " + out.string()), 0);
  std::istringstream in(slurp(out));
  std::string        line;
  int                rows = 0;
  while (std::getline(in, line))
  {
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST_F(CliTest, MalformedConfigExitsTwoWithoutOutput)
{
  auto const cfg = write("bad.json", "{\"game\": ");
  auto const out = dir_ / "never.csv";
  EXPECT_EQ(run("equilibrium --config " + cfg.string() + " --output " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));

  auto const unknown = write("unknown.json", R"({"game": {"n": 2, "alpha": 1, "cost": {"kind": "exp_cost", "scale": 1, "rate": 1}, "noise": {"kind": "hyperbolic_noise", "rho": 1}}, "contract": {"gamma": 1, "delta": 0}, "colour": "blue"})");
  EXPECT_EQ(run("equilibrium --config " + unknown.string() + " --output " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));

  EXPECT_EQ(run("equilibrium --config " + (dir_ / "missing.json").string()), 2);
  EXPECT_EQ(run("equilibrium"), 2);
  EXPECT_EQ(run("nonsense --config x"), 2);
}

TEST_F(CliTest, DesignRangeErrorExitsFour)
{
  auto const cfg = write("eps.json", R"({"game": {"n": 10, "alpha": 1, "cost": {"kind": "exp_cost", "scale": 1, "rate": 1}, "noise": {"kind": "hyperbolic_noise", "rho": 1}}, "design": {"epsilon": 2.0}})");
  EXPECT_EQ(run("design --config " + cfg.string() + " --output " + (dir_ / "d.csv").string()), 4);
  EXPECT_FALSE(fs::exists(dir_ / "d.csv"));
}

TEST_F(CliTest, DesignConfig)
{
  auto const out = dir_ / "design.csv";
  ASSERT_EQ(run("design --config " + kConfigs + "/baseline_design.json --output " + out.string()), 0);
  auto const text = slurp(out);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "n,epsilon,gamma,delta,effort,mse,estimator_mse,budget,fundamental_floor");
  EXPECT_NE(text.find("10,0.5,13.42361396769"), std::string::npos);
}

TEST_F(CliTest, SweepIsDeterministic)
{
  auto const a = dir_ / "a.csv";
  auto const b = dir_ / "b.csv";
  ASSERT_EQ(run("sweep --config " + kConfigs + "/baseline_sweep.json --output " + a.string()), 0);
  ASSERT_EQ(run("sweep --config " + kConfigs + "/baseline_sweep.json --output " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, SimulateSeedOverride)
{
  auto const cfg = write("sim.json", R"({"game": {"n": 10, "alpha": 1, "cost": {"kind": "exp_cost", "scale": 1, "rate": 1}, "noise": {"kind": "hyperbolic_noise", "rho": 1}},
      "contract": {"gamma": 5, "delta": "ir_floor"}, "simulate": {"replications": 20000, "seed": 3}})");
  auto const a = dir_ / "a.csv";
  auto const b = dir_ / "b.csv";
  auto const c = dir_ / "c.csv";
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --output " + a.string()), 0);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --output " + b.string()), 0);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --seed 4 --output " + c.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
}
