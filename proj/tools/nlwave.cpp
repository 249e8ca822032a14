// nlwave: run simulations, convergence studies, stability scans and
// solver comparisons from JSON configs.

#include <string>

#include "CLI11.hpp"

#include "nlwave/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace nlwave::cli;

  CLI::App app{"Nonlocal wave equation solver"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  bool quiet = false;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "JSON configuration file")->required();
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_flag("--quiet", quiet, "Suppress progress messages");
    return sub;
  };
  CLI::App* run = add("run", "Solve one problem and write snapshots.csv");
  CLI::App* convergence = add("convergence", "Manufactured-solution convergence study");
  CLI::App* stability = add("stability", "Companion spectral radius scan");
  CLI::App* compare = add("compare", "Disagreement between two solver blocks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const Options opt{out, quiet};
  if (run->parsed()) {
    return cmd_run(config, opt);
  }
  if (convergence->parsed()) {
    return cmd_convergence(config, opt);
  }
  if (stability->parsed()) {
    return cmd_stability(config, opt);
  }
  if (compare->parsed()) {
    return cmd_compare(config, opt);
  }
  return kExitConfig;
}
