#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "axl/reference.hpp"
#include "axl/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIMO-OFDM online rate maximization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed, "override the scenario rng_seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "dynamic run (regret or tracking kind); writes CSV series");
  add_io(simulate);

  CLI::App* static_mac = app.add_subcommand(
      "static-mac", "static multiple-access-channel efficiency run");
  add_io(static_mac);

  int verify_instances = 100;
  std::uint64_t verify_seed = 1;
  CLI::App* verify = app.add_subcommand(
      "verify-maps",
      "compare the choice maps against brute-force concave-program solvers");
  verify->add_option("--instances", verify_instances, "instances per map");
  verify->add_option("--seed", verify_seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      axl::reference::MapVerification v =
          axl::reference::verify_maps(verify_instances, verify_seed);
      std::printf("instances per map: %d\n", v.instances);
      std::printf("gibbs_map        max deviation: %.3e\n", v.gibbs_deviation);
      std::printf("capped_gibbs_map max deviation: %.3e\n", v.capped_deviation);
      std::printf("matrix_gibbs_map max deviation: %.3e\n", v.matrix_deviation);
      std::printf("lambda residual  (relative):    %.3e\n", v.lambda_residual);
      const bool ok = v.gibbs_deviation < 1e-6 && v.capped_deviation < 1e-6 &&
                      v.matrix_deviation < 1e-6 && v.lambda_residual < 1e-10;
      std::printf("%s\n", ok ? "OK" : "DEVIATION ABOVE TOLERANCE");
      return ok ? kExitOk : kExitViolation;
    }

    axl::ScenarioConfig cfg = axl::load_scenario_config(config_path);
    if (seed_set) cfg.rng_seed = seed;
    if (static_mac->parsed()) {
      return axl::run_static_mac_to_files(cfg, out_dir);
    }
    return axl::run_scenario_to_files(cfg, out_dir);
  } catch (const axl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const axl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitViolation;
  }
}
