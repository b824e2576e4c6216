#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "leggett/commands.hpp"
#include "leggett/config.hpp"
#include "leggett/errors.hpp"

using namespace leggett;

namespace {

// LEGGETT_SEED is read before parsing, so a malformed value is reported
// after parsing with the usual usage exit code.
std::uint64_t seed_default(std::uint64_t fallback, std::string &error) {
  try {
    return default_seed(fallback);
  } catch (const ConfigError &e) {
    error = e.what();
    return fallback;
  }
}

} // namespace

int main(int argc, char **argv) {
  std::string seed_error;
  CLI::App app{"Non-local realism lab: bounds, simulated experiments and model audits"};
  app.set_version_flag("--version", LEGGETT_VERSION);
  app.require_subcommand(1);

  bool bounds_json = false;
  auto *bounds = app.add_subcommand("bounds", "Print thresholds, optimal angle and violation window");
  bounds->add_flag("--json", bounds_json, "Emit JSON instead of text");

  ScanOptions scan_opts;
  scan_opts.seed = seed_default(scan_opts.seed, seed_error);
  double scan_vis_linear = -1.0, scan_vis_circular = -1.0;
  auto *scan = app.add_subcommand("scan", "Sweep phi and write analytic and simulated curves as CSV");
  scan->add_option("--vis,--visibility", scan_opts.visibility, "Scalar visibility")->check(CLI::Range(0.0, 1.0));
  scan->add_option("--visibility-linear", scan_vis_linear, "Visibility for linear-plane pairs")
      ->check(CLI::Range(0.0, 1.0));
  scan->add_option("--visibility-circular", scan_vis_circular, "Visibility for rotated-plane pairs")
      ->check(CLI::Range(0.0, 1.0));
  scan->add_option("--phi", scan_opts.phi_range, "Degrees, start:stop:step or a single value");
  scan->add_option("--pairs", scan_opts.pairs, "Mean pairs per setting combination");
  scan->add_option("--seed", scan_opts.seed, "Base seed (default: LEGGETT_SEED or 42)");
  scan->add_option("--error-propagation", scan_opts.propagation, "termwise or gradient");
  scan->add_option("--out", scan_opts.out, "CSV output path");

  std::string sim_config, sim_out;
  auto *simulate = app.add_subcommand("simulate", "Run one simulated experiment from a JSON config");
  simulate->add_option("config", sim_config, "Config file")->required();
  simulate->add_option("--out", sim_out, "JSON report path");

  AuditCommandOptions audit_opts;
  audit_opts.seed = seed_default(audit_opts.seed, seed_error);
  auto *audit = app.add_subcommand("audit", "Check derivation lemmas and the full inequality chain");
  audit->add_option("--trials", audit_opts.trials, "Random end-to-end trials");
  audit->add_option("--seed", audit_opts.seed, "Base seed (default: LEGGETT_SEED or 7)");
  audit->add_option("--n-xi", audit_opts.n_xi, "Rotation angles per plane average");
  audit->add_option("--n-mc", audit_opts.n_mc, "Lambda draws per rotation angle");
  audit->add_flag("--strict", audit_opts.strict, "Require strictly valid subensembles");
  audit->add_option("--out", audit_opts.out, "JSON report path");

  ModelCheckOptions model_opts;
  model_opts.seed = seed_default(model_opts.seed, seed_error);
  auto *model = app.add_subcommand("model-check", "Verify invariants of the hidden-variable model");
  model->add_option("--samples", model_opts.samples, "Lambda draws per configuration");
  model->add_option("--configs", model_opts.configs, "Random configurations per suite");
  model->add_option("--seed", model_opts.seed, "Base seed (default: LEGGETT_SEED or 11)");
  model->add_flag("--allow-invalid", model_opts.allow_invalid, "Also check the extended model");
  model->add_option("--out", model_opts.out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (!seed_error.empty()) {
    std::cerr << "error: " << seed_error << "\n";
    return kExitUsage;
  }

  CommandResult result;
  if (*bounds) {
    result = guarded([&] { return cmd_bounds(bounds_json); });
  } else if (*scan) {
    if (scan_vis_linear >= 0.0) scan_opts.visibility_linear = scan_vis_linear;
    if (scan_vis_circular >= 0.0) scan_opts.visibility_circular = scan_vis_circular;
    result = guarded([&] { return cmd_scan(scan_opts); });
  } else if (*simulate) {
    result = guarded([&] { return cmd_simulate(sim_config, sim_out); });
  } else if (*audit) {
    result = guarded([&] { return cmd_audit(audit_opts); });
  } else {
    result = guarded([&] { return cmd_model_check(model_opts); });
  }

  const bool wrote_stdout = (*scan && scan_opts.out.empty()) || !(*scan);
  if (result.exit_code == kExitOk || result.exit_code == kExitCheckFailed) {
    if (wrote_stdout) std::cout << result.text;
  } else {
    std::cerr << result.text;
  }
  return result.exit_code;
}
