// SPDX-License-Identifier: Apache-2.0
//
// egmc: command-line front end for the effective-geometry Monte Carlo toolkit.
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "egmc/harness/experiments.hpp"

namespace {

using egmc::harness::ExperimentKind;
using egmc::harness::ExperimentSpec;

struct CommonOptions {
  std::string config;
  std::string out;
  std::string format;
  std::string figure;
  std::string replay;
  std::optional<unsigned> threads;
  std::vector<std::string> set;
  std::map<std::string, std::string> overrides;  // key -> raw text
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key=value config file");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--set", o.set, "override any config key, KEY=VALUE");
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--seed", "seed"},       {"--D", "D_um2_per_s"},       {"--L", "L_um"},     {"--R", "R_um"},
      {"--dt", "dt_s"},         {"--steps", "n_steps"},       {"--particles", "n_particles"},
      {"--alpha", "alpha"},     {"--repeats", "n_repeats"}};
  for (const auto& [flag, key] : flags) {
    cmd->add_option_function<std::string>(
        flag, [&o, key = key](const std::string& v) { o.overrides[key] = v; }, "sets " + key);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective-geometry Monte Carlo simulation of diffusive molecular channels"};
  app.require_subcommand(1);
  CommonOptions opts;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run1d", "single 1D half-line absorber run"},
      {"run3d", "single 3D spherical receiver run"},
      {"calibrate1d", "alpha from the 1D absorption-offset line root"},
      {"calibrate3d", "alpha from the ISDCD parabola vertex"},
      {"noise", "per-step count spread versus Poisson prediction"},
      {"inaccuracy", "ISDCD(EG-MC)/ISDCD(MC) over a step-size sweep"},
      {"repro", "reproduce one study: fig4 .. fig9"},
      {"replay", "re-run the experiment recorded in a result file"}};
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, opts);
    if (name == "repro") cmd->add_option("figure", opts.figure, "fig4 | fig5 | fig6 | fig7 | fig8 | fig9")->required();
    if (name == "replay") cmd->add_option("result", opts.replay, "result file written by egmc")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return egmc::harness::kExitInvalidConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  ExperimentSpec spec;
  try {
    if (sub == "replay") {
      spec = egmc::harness::load_result_metadata(opts.replay);
    } else if (!opts.config.empty()) {
      spec = egmc::harness::load_config(opts.config);
    }
    if (sub != "replay") spec.kind = *egmc::harness::parse_kind(sub);
    if (!opts.figure.empty()) spec.settings["figure"] = opts.figure;
    for (const auto& kv : opts.set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw egmc::ConfigurationError("--set expects KEY=VALUE, got '" + kv + "'");
      egmc::harness::apply_setting(spec, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [k, v] : opts.overrides) egmc::harness::apply_setting(spec, k, v);
    if (!opts.out.empty()) spec.output_path = opts.out;
    if (!opts.format.empty()) egmc::harness::apply_setting(spec, "format", opts.format);
    if (opts.threads) spec.threads = *opts.threads;
  } catch (const egmc::ConfigurationError& e) {
    std::cerr << "[egmc] invalid configuration: " << e.what() << '\n';
    return egmc::harness::kExitInvalidConfig;
  }
  return egmc::harness::run_experiment(spec, std::clog, std::cout);
}
