// nifsim: scene-driven interferogram simulation, reconstruction and analysis.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical or
// other runtime error.

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nifsim/error.hpp"
#include "nifsim/pipeline.hpp"
#include "nifsim/scene_config.hpp"

namespace {

nifsim::SceneConfig load(const std::string& config_path, std::optional<int> figure) {
  if (!config_path.empty() && figure) throw nifsim::ConfigError("use either --config or --figure, not both");
  if (figure) return nifsim::preset_config(*figure);
  if (config_path.empty()) throw nifsim::ConfigError("one of --config or --figure is required");
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw nifsim::ConfigError("cannot read config file " + config_path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return nifsim::parse_config(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neutron interferometry figure pipelines"};
  app.set_version_flag("--version", std::string(nifsim::kToolVersion));

  std::string config_path;
  std::optional<int> figure;
  std::string out_dir = "out";
  std::optional<std::string> format;
  long long seed = 0;
  bool print_config = false;

  app.add_option("--config", config_path, "Scene configuration (JSON)");
  app.add_option("--figure", figure, "Preset scene for figure 7, 8, 10, 11 or 12")
      ->check(CLI::IsMember({7, 8, 10, 11, 12}));
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--format", format, "Image format")->check(CLI::IsMember({"png", "pgm", "csv"}));
  app.add_option("--seed", seed, "Reserved; all computation is deterministic");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  auto* simulate = app.add_subcommand("simulate", "Emit O/G detector interferograms");
  auto* sweep = app.add_subcommand("sweep", "Emit every panel of a multi-panel figure");
  auto* reconstruct = app.add_subcommand("reconstruct", "Numerical Fresnel reconstruction");
  auto* analyze = app.add_subcommand("analyze", "Feasibility and geometry report");
  for (auto* sub : {simulate, sweep, reconstruct, analyze}) sub->fallthrough();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    nifsim::SceneConfig config = load(config_path, figure);
    if (format) config.output.format = nifsim::parse_format(*format);
    if (print_config) {
      std::cout << nifsim::serialize_config(config);
      return 0;
    }
    nifsim::RunManifest manifest;
    if (simulate->parsed())
      manifest = nifsim::run_simulate(config, out_dir);
    else if (sweep->parsed())
      manifest = nifsim::run_sweep(config, out_dir);
    else if (reconstruct->parsed())
      manifest = nifsim::run_reconstruct(config, out_dir);
    else if (analyze->parsed())
      manifest = nifsim::run_analyze(config, out_dir);
    else
      throw nifsim::ConfigError("a verb is required: simulate, sweep, reconstruct or analyze");
    std::cout << manifest.verb << ": " << manifest.files.size() << " files written to " << out_dir << "\n";
    return 0;
  } catch (const nifsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
