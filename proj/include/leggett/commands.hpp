#pragma once

// Subcommands of the `leggett` tool. Each returns its report instead of
// printing, so the same code paths are exercised by the tests.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "leggett/audit.hpp"
#include "leggett/experiment.hpp"

namespace leggett {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,    ///< flag or config error
  kExitGeometry = 3, ///< geometry or model-validity error
  kExitCheckFailed = 4,
};

inline constexpr const char *kScanCsvSchema = "scan/v1";

struct CommandResult {
  int exit_code{kExitOk};
  nlohmann::json report;
  std::string text; ///< human-readable rendering (or CSV for scan)
};

/// Subcommand name, resolved configuration and output paths, embedded in
/// every JSON report and written next to every CSV file.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::uint64_t seed{0};
  std::vector<std::string> outputs;
  std::string csv_schema;

  nlohmann::json to_json() const;
};

/// Runs `body`, mapping exceptions to exit codes: ConfigError and
/// std::invalid_argument -> 2, GeometryError / ModelInvalid / NoViolation -> 3,
/// anything else -> 1. The message goes to `text` and report["error"].
CommandResult guarded(const std::function<CommandResult()> &body);

CommandResult cmd_bounds(bool json_mode);

struct ScanOptions {
  double visibility{0.99};
  std::optional<double> visibility_linear;
  std::optional<double> visibility_circular;
  std::string phi_range{"0:60:2"};
  double pairs{1e6};
  std::uint64_t seed{42};
  std::string propagation{"termwise"};
  std::string out; ///< CSV path; empty means text only
};

/// Column order: phi_deg, s_nlhv_analytic, s_nlhv_mc, s_nlhv_mc_err,
/// leggett_bound, s_chsh_analytic, s_chsh_mc, s_chsh_mc_err, chsh_bound.
std::string format_scan_csv(const std::vector<SweepRow> &rows);

/// Shortest round-trip decimal representation, independent of locale.
std::string format_number(double v);

CommandResult cmd_scan(const ScanOptions &options);

CommandResult cmd_simulate(const std::string &config_path, const std::string &out = {});

struct AuditCommandOptions {
  std::uint64_t trials{100};
  std::uint64_t seed{7};
  std::size_t n_xi{360};
  std::uint64_t n_mc{64};
  bool strict{false};
  LemmaSizes lemma_sizes{};
  std::string out;
};

/// Lemma checks plus the end-to-end audit; exit 4 on any failure.
CommandResult cmd_audit(const AuditCommandOptions &options);

struct ModelCheckOptions {
  std::uint64_t samples{100000}; ///< lambda draws per configuration
  std::uint64_t configs{200};    ///< random configurations per suite
  std::uint64_t seed{11};
  bool allow_invalid{false};     ///< add the extended-model suite
  std::string out;
};

/// Invariant suites of the hidden-variable model; exit 4 on any failure.
CommandResult cmd_model_check(const ModelCheckOptions &options);

/// Writes `content` to `path` ("-" is stdout); throws Error on I/O failure.
void write_file(const std::string &path, const std::string &content);

} // namespace leggett
