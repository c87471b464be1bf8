#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beehive/scenario.hpp"

namespace {

enum class LogLevel : int { debug = 0, info = 1, warn = 2, error = 3 };

LogLevel g_log_level = LogLevel::warn;

LogLevel log_level_from_env() {
  const char* raw = std::getenv("BEEHIVE_LOG");
  if (!raw) return LogLevel::warn;
  std::string v{raw};
  if (v == "debug") return LogLevel::debug;
  if (v == "info") return LogLevel::info;
  if (v == "warn") return LogLevel::warn;
  if (v == "error") return LogLevel::error;
  std::cerr << "beehive: ignoring unknown BEEHIVE_LOG value '" << v << "'\n";
  return LogLevel::warn;
}

void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"debug", "info", "warn", "error"};
  if (static_cast<int>(level) < static_cast<int>(g_log_level)) return;
  std::cerr << "beehive[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

int exit_code_for(const beehive::Error& e) {
  switch (e.code()) {
    case beehive::Errc::io_failure:
      return 3;
    case beehive::Errc::empty_network:
    case beehive::Errc::no_services_in_best_registry:
    case beehive::Errc::unknown_failed_service:
    case beehive::Errc::no_substitute_available:
      return 4;
    default:
      return 2;
  }
}

void deliver(const std::vector<std::string>& lines,
             const std::optional<std::filesystem::path>& out, bool quiet) {
  if (out) {
    std::ostringstream joined;
    for (const std::string& line : lines) joined << line << '\n';
    beehive::write_text_file(*out, joined.str());
    log(LogLevel::info, "wrote " + std::to_string(lines.size()) + " lines to " + out->string());
    return;
  }
  if (quiet) return;
  for (const std::string& line : lines) std::cout << line << '\n';
}

int run_generate(const beehive::Scenario& sc, bool quiet) {
  if (!sc.generator) {
    beehive::raise(beehive::Errc::bad_scenario, "generate needs generator.* keys");
  }
  if (!sc.out_path) {
    beehive::raise(beehive::Errc::bad_scenario, "generate needs an 'out' path");
  }
  beehive::LoadedWorld world = beehive::load_world(sc);
  beehive::write_text_file(*sc.out_path, beehive::emit_network(world.network));
  std::size_t services = 0;
  for (const auto& [id, reg] : world.network.registries) services += reg.services.size();
  log(LogLevel::info, "network written to " + sc.out_path->string());
  if (!quiet) {
    std::cout << "registries=" << world.network.registries.size() << " services=" << services
              << " out=" << sc.out_path->string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  g_log_level = log_level_from_env();

  CLI::App app{"bees-guided discovery and QoS selection over simulated registry networks"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool quiet = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "scenario file (key = value lines)")
        ->required();
    cmd->add_option("--out", out_override, "write output to this file instead of stdout");
    cmd->add_option("--seed", seed_override, "replace the scenario's seed list with one seed");
    cmd->add_flag("--quiet", quiet, "suppress stdout");
  };
  CLI::App* cmd_generate =
      app.add_subcommand("generate", "emit a synthetic registry network as XML");
  CLI::App* cmd_discover =
      app.add_subcommand("discover", "run the configured discovery methods over all seeds");
  CLI::App* cmd_substitute =
      app.add_subcommand("substitute", "replay failure injections through the substitution cache");
  CLI::App* cmd_bench =
      app.add_subcommand("bench", "discovery plus probe-cost comparisons against the sweep");
  for (CLI::App* cmd : {cmd_generate, cmd_discover, cmd_substitute, cmd_bench}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  CLI::App* sub = app.get_subcommands().front();

  try {
    beehive::Scenario sc = beehive::load_scenario_file(scenario_path);
    log(LogLevel::debug, "scenario loaded from " + scenario_path);
    if (sub->count("--seed")) {
      sc.seeds = {seed_override};
      sc.generator_seed = seed_override;
      log(LogLevel::debug, "seed list overridden to " + std::to_string(seed_override));
    }
    if (sub->count("--out")) sc.out_path = out_override;

    if (sub == cmd_generate) return run_generate(sc, quiet);

    std::vector<std::string> lines;
    if (sub == cmd_discover) {
      lines = beehive::run_discover(sc);
    } else if (sub == cmd_substitute) {
      lines = beehive::run_substitute(sc);
    } else {
      lines = beehive::run_bench(sc);
    }
    log(LogLevel::info, sub->get_name() + " produced " + std::to_string(lines.size()) + " lines");
    deliver(lines, sc.out_path, quiet);
    return 0;
  } catch (const beehive::Error& e) {
    log(LogLevel::error, e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    log(LogLevel::error, std::string("unexpected: ") + e.what());
    return 2;
  }
}
