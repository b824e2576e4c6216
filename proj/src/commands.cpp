#include "leggett/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "leggett/config.hpp"
#include "leggett/errors.hpp"
#include "leggett/inequalities.hpp"
#include "leggett/nlhv_model.hpp"

namespace leggett {
namespace {

using nlohmann::json;

json estimate_json(const CorrelationEstimate &e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"total_counts", e.total_counts}};
}

json report_json(const InequalityReport &r) {
  return {{"lhs", r.lhs},
          {"bound", r.bound},
          {"margin", r.margin},
          {"std_error", r.std_error},
          {"sigma_margin", r.sigma_margin}};
}

json counts_json(const CountTable &c) {
  return {{"n_pp", c.n_pp}, {"n_pm", c.n_pm}, {"n_mp", c.n_mp}, {"n_mm", c.n_mm}};
}

json vector_json(const PoincareVector &p) { return json::array({p.x(), p.y(), p.z()}); }

json angle_summary(double phi) {
  const Visibility one{1.0};
  return {{"phi_deg", rad_to_deg(phi)},
          {"leggett_bound", leggett_bound(phi)},
          {"quantum_lhs", quantum_leggett_lhs(phi, one)},
          {"margin", leggett_margin(phi, one)},
          {"quantum_chsh", quantum_chsh_at_settings(phi, one)},
          {"critical_visibility_nlhv", critical_visibility_nlhv(phi)},
          {"critical_visibility_chsh", critical_visibility_chsh(phi)}};
}

struct SuiteTally {
  std::string name;
  std::uint64_t checks{0};
  std::uint64_t failures{0};
};

json tallies_json(const std::vector<SuiteTally> &tallies) {
  json out = json::array();
  for (const auto &t : tallies) out.push_back({{"name", t.name}, {"checks", t.checks}, {"failures", t.failures}});
  return out;
}

bool within(double value, double expected, double std_error, double sigmas) {
  return std::abs(value - expected) <= sigmas * std_error + 1e-12;
}

std::vector<SuiteTally> run_model_suites(const ModelCheckOptions &o) {
  std::vector<SuiteTally> out;
  const std::uint64_t n = o.samples;

  {
    Rng rng = make_stream(o.seed, 0);
    SuiteTally t{"malus_recovery"};
    for (std::uint64_t i = 0; i < o.configs; ++i) {
      const Quadruple q = random_valid_quadruple(rng);
      const SubensembleEstimate e = sample_subensemble(q.a, q.b, q.u, q.v, n, rng);
      t.checks += 2;
      t.failures += !within(e.mean_a.value, dot(q.u, q.a), e.mean_a.std_error, 4.0);
      t.failures += !within(e.mean_b.value, dot(q.v, q.b), e.mean_b.std_error, 4.0);
    }
    out.push_back(t);
  }
  {
    // Same-basis measurements on a two-point singlet pair are exact.
    Rng rng = make_stream(o.seed, 1);
    SuiteTally t{"perfect_correlations"};
    for (std::uint64_t i = 0; i < o.configs; ++i) {
      const PoincareVector u = uniform_sphere_sample(rng);
      const PoincareVector a = uniform_sphere_sample(rng);
      const SourceModel source = SourceModel::fixed_pair(u, -u);
      t.checks += 2;
      t.failures += source_correlation(source, a, a, n, rng).value != -1.0;
      t.failures += source_correlation(source, a, -a, n, rng).value != 1.0;
    }
    out.push_back(t);
  }
  {
    Rng rng = make_stream(o.seed, 2);
    SuiteTally t{"validity_equivalence"};
    for (std::uint64_t i = 0; i < 100 * o.configs; ++i) {
      const PoincareVector a = uniform_sphere_sample(rng), b = uniform_sphere_sample(rng);
      const PoincareVector u = uniform_sphere_sample(rng), v = uniform_sphere_sample(rng);
      const BobInterval in = raw_bob_interval(a, b, u, v);
      const double la = alice_threshold(a, u);
      const bool ordered = in.x1 >= 0.0 && in.x2 <= 1.0 && in.x1 <= la && la <= in.x2;
      ++t.checks;
      t.failures += model_valid(a, b, u, v) != ordered;
    }
    out.push_back(t);
  }
  {
    Rng rng = make_stream(o.seed, 3);
    SuiteTally t{"quantum_agreement"};
    for (std::uint64_t i = 0; i < o.configs; ++i) {
      const Quadruple q = random_valid_quadruple(rng);
      const SubensembleAverages avg = integrate_subensemble(q.a, q.b, q.u, q.v, IntervalPolicy::Strict);
      ++t.checks;
      t.failures += std::abs(avg.mean_ab + dot(q.a, q.b)) > 1e-9;
    }
    out.push_back(t);
  }
  {
    // Alice's statistics ignore b; Bob's ignore a.
    Rng rng = make_stream(o.seed, 4);
    SuiteTally t{"no_signalling"};
    const Quadruple base = random_valid_quadruple(rng);
    const SourceModel singlet = SourceModel::singlet_two_point();
    const SourceModel fixed = SourceModel::fixed_pair(base.u, base.v);
    for (int k = 0; k < 10; ++k) {
      const PoincareVector b = uniform_sphere_sample(rng);
      const CorrelationEstimate alice = local_average(fixed, Side::Alice, base.a, b, n, rng);
      const CorrelationEstimate singlet_alice = local_average(singlet, Side::Alice, base.a, b, n, rng);
      PoincareVector a = uniform_sphere_sample(rng);
      while (!model_valid(a, base.b, base.u, base.v)) a = uniform_sphere_sample(rng);
      const CorrelationEstimate bob = local_average(fixed, Side::Bob, a, base.b, n, rng);
      t.checks += 3;
      t.failures += !within(alice.value, dot(base.u, base.a), alice.std_error, 4.0);
      t.failures += !within(singlet_alice.value, 0.0, singlet_alice.std_error, 4.0);
      t.failures += !within(bob.value, dot(base.v, base.b), bob.std_error, 4.0);
    }
    out.push_back(t);
  }
  {
    // Settings in the plane orthogonal to +-u at the single-plane CHSH optimum.
    Rng rng = make_stream(o.seed, 5);
    SuiteTally t{"chsh_reproduction"};
    for (int k = 0; k < 5; ++k) {
      const Frame f = random_frame(rng);
      const SourceModel source = SourceModel::singlet_about(f.e3);
      const auto dir = [&](double deg) {
        const double t = deg_to_rad(deg);
        return PoincareVector{f.e1.vec() * std::cos(t) + f.e2.vec() * std::sin(t)};
      };
      const PoincareVector a1 = dir(0.0), a2 = dir(-90.0), b1 = dir(45.0), b2 = dir(-45.0);
      const auto e11 = source_correlation(source, a1, b1, n, rng);
      const auto e12 = source_correlation(source, a1, b2, n, rng);
      const auto e21 = source_correlation(source, a2, b1, n, rng);
      const auto e22 = source_correlation(source, a2, b2, n, rng);
      const double s = chsh_value(e11.value, e12.value, e21.value, e22.value);
      const double err = std::hypot(std::hypot(e11.std_error, e12.std_error), std::hypot(e21.std_error, e22.std_error));
      ++t.checks;
      t.failures += !within(s, 2.0 * std::numbers::sqrt2, err, 4.0);
    }
    out.push_back(t);
  }
  if (o.allow_invalid) {
    // Extended model: arbitrary settings, width-preserving interval shift.
    Rng rng = make_stream(o.seed, 6);
    SuiteTally t{"extended_malus_recovery"};
    for (std::uint64_t i = 0; i < o.configs; ++i) {
      const PoincareVector a = uniform_sphere_sample(rng), b = uniform_sphere_sample(rng);
      const PoincareVector u = uniform_sphere_sample(rng), v = uniform_sphere_sample(rng);
      const SubensembleEstimate e = sample_subensemble(a, b, u, v, n, rng, IntervalPolicy::MalusPreserving);
      t.checks += 2;
      t.failures += !within(e.mean_a.value, dot(u, a), e.mean_a.std_error, 4.0);
      t.failures += !within(e.mean_b.value, dot(v, b), e.mean_b.std_error, 4.0);
    }
    out.push_back(t);
  }
  return out;
}

} // namespace

json RunManifest::to_json() const {
  json j{{"tool", "leggett"},
         {"version", LEGGETT_VERSION},
         {"subcommand", subcommand},
         {"seed", seed},
         {"config", config},
         {"outputs", outputs}};
  if (!csv_schema.empty()) j["csv_schema"] = csv_schema;
  return j;
}

CommandResult guarded(const std::function<CommandResult()> &body) {
  const auto fail = [](int code, const std::string &msg) {
    CommandResult r;
    r.exit_code = code;
    r.report = {{"error", msg}};
    r.text = "error: " + msg + "\n";
    return r;
  };
  try {
    return body();
  } catch (const ConfigError &e) {
    return fail(kExitUsage, e.what());
  } catch (const std::invalid_argument &e) {
    return fail(kExitUsage, e.what());
  } catch (const GeometryError &e) {
    return fail(kExitGeometry, e.what());
  } catch (const ModelInvalid &e) {
    return fail(kExitGeometry, e.what());
  } catch (const NoViolation &e) {
    return fail(kExitGeometry, e.what());
  } catch (const std::exception &e) {
    return fail(kExitRuntime, e.what());
  }
}

void write_file(const std::string &path, const std::string &content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_scan_csv(const std::vector<SweepRow> &rows) {
  std::string out =
      "phi_deg,s_nlhv_analytic,s_nlhv_mc,s_nlhv_mc_err,leggett_bound,s_chsh_analytic,s_chsh_mc,"
      "s_chsh_mc_err,chsh_bound\r\n";
  for (const auto &r : rows) {
    for (double v : {r.phi_deg, r.s_nlhv_analytic, r.s_nlhv_mc, r.s_nlhv_mc_err, r.leggett_bound,
                     r.s_chsh_analytic, r.s_chsh_mc, r.s_chsh_mc_err}) {
      out += format_number(v);
      out += ',';
    }
    out += format_number(r.chsh_bound);
    out += "\r\n";
  }
  return out;
}

CommandResult cmd_bounds(bool json_mode) {
  const double phi_max = find_phi_max();
  const ViolationWindow window = violation_window(Visibility{1.0});
  const ChshCriticalVisibilities chsh = critical_visibility_chsh_here();

  RunManifest manifest{"bounds", json::object(), 0, {}, {}};
  json values;
  values["phi_max_deg"] = rad_to_deg(phi_max);
  values["phi_max_margin_deg"] = rad_to_deg(find_phi_max_margin());
  values["at_phi_max"] = angle_summary(phi_max);
  values["at_phi_20deg"] = angle_summary(deg_to_rad(20.0));
  values["critical_visibility_nlhv"] = critical_visibility_nlhv(phi_max);
  values["critical_visibility_chsh_here"] = chsh.at_phi_max;
  values["critical_visibility_chsh_standard"] = chsh.standard;
  values["violation_window_v1_deg"] = {{"low", rad_to_deg(window.phi_low)}, {"high", rad_to_deg(window.phi_high)}};

  CommandResult r;
  r.report = values;
  r.report["manifest"] = manifest.to_json();
  if (json_mode) {
    r.text = r.report.dump(2) + "\n";
  } else {
    const json flat = values.flatten();
    for (const auto &[path, v] : flat.items()) {
      r.text += path.substr(1) + " = " + v.dump() + "\n";
    }
  }
  return r;
}

CommandResult cmd_scan(const ScanOptions &o) {
  if (!(o.pairs > 0.0) || !std::isfinite(o.pairs)) throw ConfigError("--pairs must be > 0");
  ExperimentConfig cfg;
  cfg.visibility.scalar = Visibility{o.visibility};
  if (o.visibility_linear) cfg.visibility.linear = Visibility{*o.visibility_linear};
  if (o.visibility_circular) cfg.visibility.circular = Visibility{*o.visibility_circular};
  cfg.mean_pairs = o.pairs;
  cfg.seed = o.seed;
  cfg.phi_grid_deg = parse_phi_range(o.phi_range);
  cfg.propagation = parse_error_propagation(o.propagation);

  const std::vector<SweepRow> rows = sweep_phi(cfg);
  CommandResult r;
  r.text = format_scan_csv(rows);

  RunManifest manifest{"scan", config_to_json(cfg), cfg.seed, {}, kScanCsvSchema};
  if (!o.out.empty() && o.out != "-") {
    manifest.outputs = {o.out, o.out + ".manifest.json"};
    write_file(o.out, r.text);
    write_file(o.out + ".manifest.json", manifest.to_json().dump(2) + "\n");
  }
  double worst_nlhv = 0.0, worst_chsh = 0.0;
  for (const auto &row : rows) {
    if (row.s_nlhv_mc_err > 0.0)
      worst_nlhv = std::max(worst_nlhv, std::abs(row.s_nlhv_mc - row.s_nlhv_analytic) / row.s_nlhv_mc_err);
    if (row.s_chsh_mc_err > 0.0)
      worst_chsh = std::max(worst_chsh, std::abs(row.s_chsh_mc - row.s_chsh_analytic) / row.s_chsh_mc_err);
  }
  r.report = {{"manifest", manifest.to_json()},
              {"rows", rows.size()},
              {"max_nlhv_deviation_sigma", worst_nlhv},
              {"max_chsh_deviation_sigma", worst_chsh}};
  return r;
}

CommandResult cmd_simulate(const std::string &config_path, const std::string &out) {
  const ExperimentConfig cfg = load_config(config_path);
  const ProtocolReport p = run_protocol(cfg);
  const ProtocolGeometry &g = p.geometry;

  RunManifest manifest{"simulate", config_to_json(cfg), cfg.seed, {}, {}};
  if (!out.empty() && out != "-") manifest.outputs = {out};

  json report;
  report["manifest"] = manifest.to_json();
  report["phi_deg"] = rad_to_deg(g.phi);
  report["geometry"] = {{"a1", vector_json(g.a1)}, {"a2", vector_json(g.a2)}, {"b1", vector_json(g.b1)},
                        {"b2", vector_json(g.b2)}, {"b3", vector_json(g.b3)}};
  const char *names[] = {"e11", "e22", "e23", "e21", "e12"};
  const CorrelationEstimate *est[] = {&p.correlations.e11, &p.correlations.e22, &p.correlations.e23,
                                      &p.correlations.e21, &p.correlations.e12};
  for (std::size_t k = 0; k < 5; ++k) {
    report["counts"][names[k]] = counts_json(p.counts[k]);
    report["correlations"][names[k]] = estimate_json(*est[k]);
  }
  report["nlhv"] = report_json(p.inequalities.nlhv);
  report["nlhv"]["analytic"] = p.nlhv_analytic;
  report["chsh"] = report_json(p.inequalities.chsh);
  report["chsh"]["analytic"] = p.chsh_analytic;
  report["error_propagation"] = to_string(cfg.propagation);
  report["warnings"] = p.inequalities.warnings;

  CommandResult r;
  r.report = report;
  r.text = report.dump(2) + "\n";
  if (!out.empty() && out != "-") write_file(out, r.text);
  return r;
}

CommandResult cmd_audit(const AuditCommandOptions &o) {
  if (o.trials == 0) throw ConfigError("--trials must be >= 1");
  if (o.n_xi == 0 || o.n_mc == 0) throw ConfigError("--n-xi and --n-mc must be >= 1");

  Rng lemma_rng = make_stream(o.seed, 0xA0D17);
  const std::vector<LemmaTally> lemmas = run_lemma_checks(o.lemma_sizes, lemma_rng);

  AuditOptions options;
  options.trials = o.trials;
  options.n_xi = o.n_xi;
  options.n_mc = o.n_mc;
  options.policy = o.strict ? IntervalPolicy::Strict : IntervalPolicy::MalusPreserving;
  const AuditReport audit = audit_full_chain(options, o.seed);

  std::uint64_t lemma_failures = 0;
  json lemma_json = json::array();
  for (const auto &l : lemmas) {
    lemma_failures += l.failures;
    lemma_json.push_back({{"name", l.name}, {"checks", l.checks}, {"failures", l.failures}});
  }
  json failed = json::array();
  for (const auto &t : audit.records) {
    if (t.passed) continue;
    failed.push_back({{"phi_deg", rad_to_deg(t.phi)}, {"source", t.source_kind}, {"lhs", t.lhs},
                      {"std_error", t.std_error}, {"bound", t.bound}});
  }

  json cfg{{"trials", o.trials}, {"n_xi", o.n_xi}, {"n_mc", o.n_mc},
           {"policy", o.strict ? "strict" : "malus_preserving"}};
  RunManifest manifest{"audit", cfg, o.seed, {}, {}};
  if (!o.out.empty() && o.out != "-") manifest.outputs = {o.out};

  CommandResult r;
  r.report = {{"manifest", manifest.to_json()},
              {"lemmas", lemma_json},
              {"full_chain",
               {{"trials", audit.trials},
                {"passes", audit.passes},
                {"failures", audit.failures},
                {"excluded_invalid", audit.excluded_invalid},
                {"worst_margin", audit.worst_margin},
                {"worst_sigma", audit.worst_sigma},
                {"sigma_threshold", options.sigma_threshold},
                {"interval_policy", cfg["policy"]},
                {"failed_trials", failed}}}};
  r.exit_code = (lemma_failures == 0 && audit.failures == 0) ? kExitOk : kExitCheckFailed;
  r.text = r.report.dump(2) + "\n";
  if (!o.out.empty() && o.out != "-") write_file(o.out, r.text);
  return r;
}

CommandResult cmd_model_check(const ModelCheckOptions &o) {
  if (o.samples == 0) throw ConfigError("--samples must be >= 1");
  if (o.configs == 0) throw ConfigError("--configs must be >= 1");
  const std::vector<SuiteTally> suites = run_model_suites(o);
  std::uint64_t failures = 0;
  for (const auto &s : suites) failures += s.failures;

  json cfg{{"samples", o.samples}, {"configs", o.configs}, {"allow_invalid", o.allow_invalid}};
  RunManifest manifest{"model-check", cfg, o.seed, {}, {}};
  if (!o.out.empty() && o.out != "-") manifest.outputs = {o.out};

  CommandResult r;
  r.report = {{"manifest", manifest.to_json()}, {"suites", tallies_json(suites)}, {"failures", failures}};
  if (o.allow_invalid) {
    r.report["note"] = "extended_malus_recovery uses width-preserving shifted intervals outside the valid region";
  }
  r.exit_code = failures == 0 ? kExitOk : kExitCheckFailed;
  r.text = r.report.dump(2) + "\n";
  if (!o.out.empty() && o.out != "-") write_file(o.out, r.text);
  return r;
}

} // namespace leggett
