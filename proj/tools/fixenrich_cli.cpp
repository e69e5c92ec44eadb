#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fixenrich/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "fixenrich: averaged-operator fixed-point iterations with inequality "
      "diagnostics"};
  app.require_subcommand(1);
  const double check_tol = fixenrich::resolve_check_tol();

  std::string config_path;
  std::string run_out_dir = "out";
  auto* run = app.add_subcommand("run", "Run one experiment config (JSON)");
  run->add_option("--config", config_path, "Path to the experiment config")
      ->required();
  run->add_option("--out-dir", run_out_dir,
                  "Directory for <name>.trace.csv and <name>.summary.json");

  std::string op_text;
  double b = 0.0;
  double k_value = 0.0;
  bool estimate = false;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
  auto* check = app.add_subcommand(
      "check", "Run the inequality checks for one operator");
  check
      ->add_option("--op", op_text,
                   "Operator spec: scalar:<a> | rotation:<theta> | "
                   "reflection:<c,...> | identity | matrix:<path> | "
                   "saturation[:<dim>]")
      ->required();
  check->add_option("--b", b, "Enrichment parameter (default 0)");
  auto* k_option = check->add_option("--k", k_value, "Check at this k");
  check->add_flag("--estimate", estimate,
                  "Estimate the minimal k from the samples instead");
  check->add_option("--samples", samples, "Pair sample count (default 2000)");
  check->add_option("--seed", seed, "Sampling seed (default 0)");

  std::string suite_dir = "suite";
  std::string suite_out_dir = "out";
  auto* suite = app.add_subcommand(
      "suite", "Replay the bundled acceptance experiments and checks");
  suite->add_option("--config-dir", suite_dir,
                    "Directory holding the bundled experiment configs");
  suite->add_option("--out-dir", suite_out_dir,
                    "Directory for experiment outputs");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return fixenrich::cmd_run(config_path, run_out_dir, check_tol);

  if (check->parsed()) {
    const bool have_k = k_option->count() > 0;
    if (have_k == estimate) {
      std::cerr << "check: provide exactly one of --k or --estimate\n";
      return fixenrich::kExitConfig;
    }
    fixenrich::CheckOptions options;
    try {
      options.op = fixenrich::parse_operator_flag(op_text);
    } catch (const fixenrich::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return fixenrich::kExitConfig;
    }
    options.b = b;
    if (have_k) options.k = k_value;
    options.samples = samples;
    options.seed = seed;
    return fixenrich::cmd_check(options, check_tol);
  }

  return fixenrich::cmd_suite(suite_dir, suite_out_dir, check_tol);
}
