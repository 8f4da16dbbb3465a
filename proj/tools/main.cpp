// SPDX-License-Identifier: Apache-2.0
// cvqkd: key-rate sweeps, fading averages and parameter optimization.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvqkd/errors.hpp"
#include "cvqkd/run.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t workers = 0;
  std::string out;
  bool quick = false;
};

nlohmann::json read_config(const Overrides& o, const CLI::App& sub) {
  nlohmann::json root = nlohmann::json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config, std::ios::binary);
    if (!in) throw cvqkd::ConfigError("--config", "cannot read " + o.config);
    try {
      root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw cvqkd::ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
  }
  if (!root.is_object()) throw cvqkd::ConfigError("<root>", "expected an object");
  root["mode"] = sub.get_name();
  if (sub.count("--seed")) root["seed"] = o.seed;
  if (sub.count("--samples")) root["n_samples"] = o.samples;
  if (o.quick) root["n_samples"] = std::uint64_t{1} << 16;
  if (sub.count("--workers")) root["workers"] = o.workers;
  if (!o.out.empty()) root["output_dir"] = o.out;
  return root;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CV-QKD key rates over turbulent ground-satellite channels"};
  app.require_subcommand(1);
  Overrides o;
  const std::pair<const char*, const char*> modes[] = {
      {"fixed-rate", "key rate at fixed source parameters over an attenuation sweep"},
      {"optimal-fixed", "key rate with source parameters optimized at each attenuation"},
      {"fading", "fading-averaged key rate at fixed source parameters"},
      {"optimize-mean", "fading-averaged rate with parameters optimized at the mean transmissivity"},
      {"optimize-per-sample", "fading-averaged rate with parameters optimized per transmissivity sample"},
      {"transmissivity-pdf", "histogram of sampled transmissivities"},
  };
  for (const auto& [mode, help] : modes) {
    CLI::App* sub = app.add_subcommand(mode, help);
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Monte Carlo seed (overrides the config)");
    sub->add_option("--samples", o.samples, "transmissivity samples per ensemble")->check(CLI::PositiveNumber);
    sub->add_option("--workers", o.workers, "worker threads, 0 = all cores");
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--quick", o.quick, "use 65536 samples");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const cvqkd::RunConfig cfg = cvqkd::parse_config(read_config(o, *sub).dump());
    const cvqkd::RunSummary s = cvqkd::run(cfg);
    std::cout << s.csv.string() << ": " << s.rows << " rows in " << s.seconds << " s\n";
  } catch (const cvqkd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cvqkd::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
