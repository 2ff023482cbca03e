// Command-line front end: equilibrium, sweep, design and simulate reports
// from a JSON experiment config, written as CSV.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "effortcontract/errors.hpp"
#include "effortcontract/harness/commands.hpp"
#include "effortcontract/harness/config.hpp"

namespace {

enum ExitCode : int
{
  kOk          = 0,
  kConfigError = 2,
  kSolverError = 3,
  kRangeError  = 4,
};

using Command = std::function<std::string(const effortcontract::harness::ExperimentConfig&)>;

int run(const std::string& config_path, const std::optional<std::string>& output_override,
        const std::optional<std::uint64_t>& seed_override, const Command& command)
{
  using namespace effortcontract;
  try
  {
    auto cfg = harness::load_config(config_path);
    if (seed_override && cfg.simulate)
    {
      cfg.simulate->sim.seed = *seed_override;
    }
    std::string const csv = command(cfg);

    auto const output = output_override ? output_override : cfg.output;
    if (!output)
    {
      std::cout << csv;
      return kOk;
    }
    std::ofstream out(*output, std::ios::binary);
    if (!out)
    {
      std::cerr << "error: cannot write " << *output << '\n';
      return kConfigError;
    }
    out << csv;
    return kOk;
  }
  catch (const harness::ConfigError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  catch (const ModelError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  catch (const DomainError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  catch (const RangeError& e)
  {
    std::cerr << "range error: " << e.what() << '\n';
    return kRangeError;
  }
  catch (const SolverError& e)
  {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  }
}

}  // namespace

int main(int argc, char** argv)
{
  namespace h = effortcontract::harness;

  CLI::App app{"Contract equilibria, budget-optimal contracts and Monte-Carlo checks for "
               "effort-averse sensors"};
  app.require_subcommand(1);

  std::string                  config_path;
  std::optional<std::string>   output;
  std::optional<std::uint64_t> seed;

  struct Entry
  {
    const char* name;
    const char* help;
    Command     command;
  };
  Entry const entries[] = {
      {"equilibrium", "Per-sensor equilibrium efforts", [](auto const& c) { return h::cmd_equilibrium(c); }},
      {"sweep", "Symmetric gamma sweep for each n", [](auto const& c) { return h::cmd_sweep(c); }},
      {"design", "Budget-optimal contract for epsilon or beta", [](auto const& c) { return h::cmd_design(c); }},
      {"simulate", "Analytic vs Monte-Carlo comparison", [](auto const& c) { return h::cmd_simulate(c); }},
  };

  int exit_code = kOk;
  for (auto const& entry : entries)
  {
    auto* sub = app.add_subcommand(entry.name, entry.help);
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--output", output, "CSV output path (overrides the config)");
    sub->add_option("--seed", seed, "Simulation seed (overrides the config)");
    sub->callback([&, command = entry.command] { exit_code = run(config_path, output, seed, command); });
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    int const code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  return exit_code;
}
