#include "hybridsl/cli.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <string>

namespace {

// Flags shared by both subcommands; values stay strings until merged with a config file.
const char* const kSettings[] = {"benchmark", "solver", "eps", "norm", "nit",     "warmup",    "dt", "nodes",
                                 "bounds",    "nu",     "x0",  "q0",   "tf",      "out",       "threads",
                                 "max-iters"};

void add_settings(CLI::App* cmd, std::map<std::string, std::string>& values) {
  for (const char* key : kSettings) cmd->add_option(std::string("--") + key, values[key]);
}

hybridsl::RunConfig merge(CLI::App* cmd, const std::map<std::string, std::string>& values, const std::string& config) {
  hybridsl::RunConfig rc;
  std::map<std::string, std::string> settings;
  std::string bench = cmd->count("--benchmark") ? values.at("benchmark") : std::string();
  std::string file = config;
  // A benchmark argument naming an existing file is a config file.
  if (file.empty() && !bench.empty() && std::filesystem::is_regular_file(bench)) {
    file = bench;
    bench.clear();
  }
  if (!file.empty()) settings = hybridsl::read_config_file(file);
  for (const auto& [key, value] : values) {
    if (key == "benchmark") continue;
    if (cmd->count("--" + key)) settings[key] = value;
  }
  if (!bench.empty()) settings["benchmark"] = bench;
  for (const auto& [key, value] : settings) hybridsl::apply_setting(rc, key, value);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Lagrangian solver for infinite-horizon hybrid optimal control"};
  app.require_subcommand(1);

  std::map<std::string, std::string> run_values;
  std::string run_config;
  auto* run = app.add_subcommand("run", "solve one benchmark and write value, policy and trajectory files");
  add_settings(run, run_values);
  run->add_option("--config", run_config, "key = value settings file; flags override it");

  std::map<std::string, std::string> cmp_values;
  std::string cmp_config;
  std::string methods;
  auto* cmp = app.add_subcommand("compare", "run several solvers on one discretization");
  add_settings(cmp, cmp_values);
  cmp->add_option("--config", cmp_config, "key = value settings file; flags override it");
  cmp->add_option("--methods", methods, "comma-separated solvers, e.g. vi,pi,mpi")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hybridsl::exit_usage;
  }

  hybridsl::RunConfig rc;
  try {
    if (*run) {
      rc = merge(run, run_values, run_config);
    } else {
      rc = merge(cmp, cmp_values, cmp_config);
      hybridsl::apply_setting(rc, "methods", methods);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hybridsl::exit_usage;
  }

  try {
    return *run ? hybridsl::run(rc, std::cout, std::cerr) : hybridsl::compare(rc, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hybridsl::exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hybridsl::exit_failure;
  }
}
