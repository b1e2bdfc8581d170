#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "driftlab/driftlab.h"

namespace {

const std::vector<std::string> kSubcommands = {"solve",    "norms",       "potential",
                                               "truncate", "caccioppoli", "zhikov"};

int exit_code(dl_status s) {
  switch (s) {
    case DL_OK: return 0;
    case DL_ERR_VALIDATION:
    case DL_ERR_IO: return 2;
    case DL_ERR_NUMERICAL: return 3;
    default: return 1;
  }
}

struct Options {
  std::string config;
  std::string out = "out";
  int threads = 1;
  std::uint64_t seed = 1;
  std::optional<std::string> resolution, rho, schedule;
};

int run(const std::string& subcommand, const Options& opt) {
  using driftlab::cli::KeyValues;
  KeyValues values;
  if (!opt.config.empty()) {
    try {
      values = driftlab::cli::merged(driftlab::cli::load_config(opt.config, kSubcommands), subcommand);
    } catch (const driftlab::cli::ConfigError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  if (opt.resolution) values["resolution"] = *opt.resolution;
  if (opt.rho) values["rho"] = *opt.rho;
  if (opt.schedule) values["schedule"] = *opt.schedule;

  if (dl_status s = dl_set_threads(opt.threads); s != DL_OK) {
    std::fprintf(stderr, "error: %s\n", dl_last_error());
    return exit_code(s);
  }
  const std::string config_json = nlohmann::json(values).dump();
  char* summary = nullptr;
  const dl_status s =
      dl_run_experiment(subcommand.c_str(), config_json.c_str(), opt.out.c_str(), opt.seed, nullptr, &summary);
  if (s != DL_OK) {
    std::fprintf(stderr, "error: %s\n", dl_last_error());
    return exit_code(s);
  }
  std::fputs(summary, stdout);
  std::printf("report written to %s/report.json\n", opt.out.c_str());
  dl_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion with generalized divergence-free drifts: experiments"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", opt.seed, "seed of the random test functions");

  const char* about[] = {"Solve the truncated drift problem and its approximation limit",
                         "Classify a field or drift against the uniqueness criteria",
                         "Build a skew potential A with div A = a",
                         "Lipschitz truncation of a scalar field",
                         "Replay the truncation inequality on a field",
                         "Reproduce the nonuniqueness example on the unit ball"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < kSubcommands.size(); ++i) {
    auto* sub = app.add_subcommand(kSubcommands[i], about[i]);
    sub->fallthrough();
    subs.push_back(sub);
  }
  auto* zhikov = subs.back();
  std::string resolution, rho, schedule;
  auto* res_opt = zhikov->add_option("--resolution", resolution, "ball mesh resolution");
  auto* rho_opt = zhikov->add_option("--rho", rho, "excision radius");
  auto* sched_opt = zhikov->add_option("--schedule", schedule, "comma-separated truncation levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*res_opt) opt.resolution = resolution;
  if (*rho_opt) opt.rho = rho;
  if (*sched_opt) opt.schedule = schedule;
  for (auto* sub : subs)
    if (*sub) return run(sub->get_name(), opt);
  return 1;
}
