#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace degenfd::cli;
  CLI::App app{"Monotone finite-difference solver for degenerate fully nonlinear elliptic equations"};
  app.require_subcommand(1);

  std::string config;
  auto* solve = app.add_subcommand("solve", "Solve the problem described by a config file");
  solve->add_option("config", config, "INI config path")->required();

  std::string out_dir = "benchmarks_out";
  std::uint64_t seed = 0;
  auto* bench = app.add_subcommand("benchmarks", "Run the three built-in one-dimensional benchmarks");
  bench->add_option("--out-dir", out_dir, "Directory for CSV/JSON outputs");
  bench->add_option("--seed", seed, "Seed recorded in every report");

  std::vector<double> h_list;
  std::string out_path;
  auto* converge = app.add_subcommand("converge", "Convergence study with eps = h");
  converge->set_help_flag("--help", "Print this help message and exit");
  converge->add_option("config", config, "INI config path")->required();
  converge->add_option("--h", h_list, "Grid spacings")->required()->delimiter(',');
  converge->add_option("--out", out_path, "CSV output path (default: stdout)");

  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  verify->add_option("config", config, "INI config path")->required();
  verify->add_option("--out", out_path, "JSON report path (default: the config's report_json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInputError;
  }

  auto optional_path = [&]() -> std::optional<std::filesystem::path> {
    if (out_path.empty()) return std::nullopt;
    return std::filesystem::path(out_path);
  };
  if (*solve) return cmd_solve(config);
  if (*bench) return cmd_benchmarks(out_dir, seed);
  if (*converge) return cmd_converge(config, h_list, optional_path());
  return cmd_verify(config, optional_path());
}
