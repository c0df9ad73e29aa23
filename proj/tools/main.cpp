#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("swe_assim");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("SWE_ASSIM_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept "off" when asked for.
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("SWE_ASSIM_LOG='{}' is not a log level; using info", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Variational assimilation and observation sensitivity for 1D shallow water", "swe_assim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SWE_ASSIM_VERSION);

  std::string config_path;
  std::string out_dir;
  std::string kind;
  int threads = 1;
  bool oracle = false;
  for (const auto& name : swe::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run " + name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] directory)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--kind", kind, "control kind")->check(CLI::IsMember({"ic", "bathymetry"}));
    sub->add_flag("--oracle", oracle, "sensitivity: also run the brute-force oracle");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : swe::cli::kConfig;
  }

  swe::cli::CommandOptions options;
  try {
    options.config = swe::cli::load_config(config_path);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return swe::cli::kConfig;
  }
  if (kind == "ic") options.config.kind = swe::ControlKind::InitialCondition;
  if (kind == "bathymetry") options.config.kind = swe::ControlKind::Bathymetry;
  options.out_dir = out_dir.empty() ? options.config.out_dir : out_dir;
  options.threads = threads;
  options.oracle = oracle;
  return swe::cli::run_command(app.get_subcommands().front()->get_name(), options);
}
