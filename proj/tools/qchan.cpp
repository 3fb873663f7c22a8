#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "qchan/experiment.hpp"
#include "qchan/version.hpp"

namespace {

int report_outcome(const qchan::RunOutcome& outcome) {
  if (outcome.csv_path.empty()) {
    std::printf("%zu rows computed\n", outcome.rows.size());
  } else {
    std::printf("%zu rows -> %s\n", outcome.rows.size(), outcome.csv_path.c_str());
  }
  if (!outcome.ok) std::fprintf(stderr, "some rows failed verification or convergence\n");
  return outcome.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum channel capacity experiments"};
  app.set_version_flag("--version", qchan::kVersionTag);
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("config", config_path, "config path")->required();

  std::string preset_name;
  std::uint64_t seed_override = 0;
  std::string out_override;
  std::size_t starts_override = 0;
  CLI::App* preset = app.add_subcommand("preset", "run a named preset");
  preset->add_option("name", preset_name, "preset name")->required();
  CLI::Option* seed_opt = preset->add_option("--seed", seed_override, "override the preset seed");
  preset->add_option("--out", out_override, "override the output CSV path");
  preset->add_option("--starts", starts_override, "override starts per grid point");

  std::string verify_path;
  CLI::App* verify =
      app.add_subcommand("verify", "re-check the certificates stored by a previous run");
  verify->add_option("config", verify_path, "config path")->required();

  app.add_subcommand("list-presets", "list available preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      const qchan::ExperimentConfig config = qchan::ExperimentConfig::from_file(config_path);
      return report_outcome(qchan::run_experiment(config));
    }
    if (app.got_subcommand("preset")) {
      qchan::ExperimentConfig config = qchan::preset_config(preset_name);
      if (seed_opt->count() > 0) config.seed = seed_override;
      if (!out_override.empty()) config.output = out_override;
      if (starts_override > 0) config.starts = starts_override;
      return report_outcome(qchan::run_experiment(config));
    }
    if (app.got_subcommand("verify")) {
      const qchan::ExperimentConfig config = qchan::ExperimentConfig::from_file(verify_path);
      const bool ok = qchan::verify_stored(config);
      std::printf("%s\n", ok ? "certificates match" : "certificate mismatch");
      return ok ? 0 : 1;
    }
    for (const std::string& name : qchan::preset_names()) std::printf("%s\n", name.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
