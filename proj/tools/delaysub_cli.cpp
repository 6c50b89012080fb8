#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

#include "delaysub/cli.hpp"
#include "delaysub/errors.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed subdiffusion solver: runs, convergence studies, series oracle, coefficient dumps"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");

  for (const auto& name : delaysub::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_option("--jobs", jobs, "Worker threads for study runs")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }
  spdlog::set_pattern("[%l] %v");
  if (quiet) spdlog::set_level(spdlog::level::warn);

  const auto command = delaysub::command_from_string(app.get_subcommands().front()->get_name());
  try {
    const auto config = delaysub::load_config(config_path);
    const auto files = delaysub::dispatch(command, config, {out_dir, jobs});
    for (const auto& f : files) std::cout << f.string() << '\n';
    return 0;
  } catch (const delaysub::ConfigurationError& e) {
    std::cerr << "error: configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const delaysub::SolverError& e) {
    std::cerr << "error: solver: " << e.what();
    if (e.step() >= 0) std::cerr << " (step " << e.step() << ")";
    std::cerr << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
