// mimres: train one configuration, run a table grid, or turn metrics.csv
// into log10 error curves.
//
//   mimres run --problem poisson --method mim1 --dim 2 --iters 1000
//   mimres table poisson-neumann --iters 500 --jobs 4
//   mimres curves runs/x/metrics.csv --out runs/x/curves
//
// Bare flags (no subcommand) mean `run`. Exit codes: 0 ok, 1 divergence or
// runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mimres/experiment/config_io.hpp"
#include "mimres/experiment/output.hpp"
#include "mimres/experiment/runner.hpp"

#ifndef MIMRES_VERSION
#define MIMRES_VERSION "dev"
#endif

namespace {

constexpr int kUsageError = 2;

// Registers --key (and --key_with_underscores when it differs) for every
// config key; values stay as text until the config is assembled.
void add_config_flags(CLI::App& app, std::map<std::string, std::string>& values) {
  for (std::string_view key : mimres::config_keys()) {
    const std::string name(key);
    std::string hyphen = name;
    for (char& ch : hyphen) ch = ch == '_' ? '-' : ch;
    std::string names = "--" + hyphen;
    if (hyphen != name) names += ",--" + name;
    if (name == "wall_time") {
      app.add_flag_callback(names, [&values] { values["wall_time"] = "true"; },
                            "fill the wall_s column of metrics.csv");
    } else {
      app.add_option_function<std::string>(names, [&values, name](const std::string& v) { values[name] = v; })
          ->type_name("VALUE");
    }
  }
}

// Flags override the config file. `explicit_keys` collects every key either
// one sets; table grids leave those untouched.
mimres::RunConfig assemble(const std::string& config_file, const std::map<std::string, std::string>& values,
                           std::set<std::string>& explicit_keys) {
  mimres::RunConfig config =
      config_file.empty() ? mimres::RunConfig{} : mimres::load_config(config_file, {}, &explicit_keys);
  for (const auto& [key, value] : values) {
    mimres::set_config_value(config, key, value);
    explicit_keys.insert(key);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep mixed residual and Galerkin PDE solvers", "mimres"};
  app.set_version_flag("--version", std::string(MIMRES_VERSION));
  app.require_subcommand(0, 1);

  std::map<std::string, std::string> values;
  std::string config_file;

  CLI::App* run = app.add_subcommand("run", "train one configuration");
  run->add_option("--config", config_file, "flat key = value file; flags override it")->check(CLI::ExistingFile);
  add_config_flags(*run, values);

  std::string table_id;
  std::size_t jobs = 1;
  CLI::App* table = app.add_subcommand("table", "run a table grid and write summary.csv");
  table->add_option("id", table_id, "poisson-neumann | poisson-depth-activation | monge-ampere | biharmonic | kdv")
      ->required();
  table->add_option("--jobs", jobs, "runs executed concurrently")->check(CLI::PositiveNumber);
  table->add_option("--config", config_file, "flat key = value file; flags override it")->check(CLI::ExistingFile);
  add_config_flags(*table, values);

  std::string csv_path;
  std::string curves_out;
  CLI::App* curves = app.add_subcommand("curves", "write log10 error curves from metrics.csv");
  curves->add_option("csv", csv_path, "metrics.csv")->required()->check(CLI::ExistingFile);
  curves->add_option("--out", curves_out, "output directory (default: next to the CSV)");

  std::vector<std::string> args(argv + 1, argv + argc);
  const bool bare = !args.empty() && args.front().rfind("--", 0) == 0 && args.front() != "--help" &&
                    args.front() != "--version";
  if (bare) args.insert(args.begin(), "run");
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*curves) {
      const std::filesystem::path out =
          curves_out.empty() ? std::filesystem::path(csv_path).parent_path() / "curves" : std::filesystem::path(curves_out);
      for (const auto& file : mimres::emit_curves(csv_path, out, std::cerr)) std::cout << file.string() << '\n';
      return 0;
    }
    if (*table) {
      std::set<std::string> overridden;
      const mimres::RunConfig base = assemble(config_file, values, overridden);
      const std::filesystem::path root =
          overridden.count("out") ? std::filesystem::path(base.out) : mimres::default_output_root();
      const int status = mimres::run_table(table_id, base, overridden, root, std::cout, jobs);
      std::cout << "summary: " << (root / table_id / "summary.csv").string() << '\n';
      return status;
    }
    if (*run) {
      std::set<std::string> given;
      mimres::RunConfig config = assemble(config_file, values, given);
      if (!given.count("problem")) {
        std::cerr << "error: --problem is required\n\n" << run->help();
        return kUsageError;
      }
      if (config.out.empty()) config.out = (mimres::default_output_root() / mimres::run_label(config)).string();
      const mimres::RunOutcome outcome = mimres::execute_run(config, std::cerr);
      std::cout << config.out << '\n';
      return outcome.diverged ? 1 : 0;
    }
    std::cerr << app.help();
    return kUsageError;
  } catch (const mimres::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << (*table ? table->help() : run->help());
    return kUsageError;
  } catch (const mimres::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
