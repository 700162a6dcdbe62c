#include "winstat/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "winstat/config.hpp"
#include "winstat/design.hpp"
#include "winstat/output.hpp"
#include "winstat/quadrature.hpp"
#include "winstat/sim.hpp"
#include "winstat/winprob.hpp"

namespace winstat {
namespace {

constexpr const char kVersion[] = "1.0.0";

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format;
  int threads = 0;  // 0 = use all hardware threads
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool dump = false;
};

void add_common_options(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.out_path, "Output path ('-' for stdout)");
  sub->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "md", "txt"}));
  sub->add_option("--threads", args.threads, "Worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", args.seed, "Override the simulation seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  sub->add_flag("--dump-config", args.dump,
                "Print the normalized configuration as JSON and exit");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Loads the configuration and applies command-line overrides.
RunConfig prepare_config(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  if (!args.format.empty()) cfg.output.format = args.format;
  if (!args.out_path.empty()) cfg.output.path = args.out_path;
  if (args.seed_given) cfg.sim.seed = args.seed;
  cfg.sim.threads = resolve_threads(args.threads);
  return cfg;
}

void write_plain(const std::string& body, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  file << body;
}

int dump_normalized_config(const RunConfig& cfg) {
  write_plain(dump_config(cfg).dump(2) + "\n", cfg.output.path);
  return 0;
}

std::vector<std::string> base_meta(const std::string& command, const CommonArgs& args) {
  std::vector<std::string> meta;
  meta.push_back("winstat " + std::string(kVersion) + " " + command);
  meta.push_back("config=" + args.config_path);
  return meta;
}

std::string quadrature_meta() {
  const Integrator::Options opts;
  return "quad_rel_tol=" + format_general(opts.rel_tol) +
         " quad_abs_tol=" + format_general(opts.abs_tol);
}

void add_metric(OutputTable& table, const std::string& name, const std::string& value) {
  table.rows.push_back({name, value});
}

// Per-stratum win/loss/tie tables turned into the inputs of the stratified
// formulas.  The top-level scenario is ignored when strata are present.
std::vector<StratumInput> evaluate_strata(const RunConfig& cfg) {
  std::vector<StratumInput> inputs;
  inputs.reserve(cfg.strata.size());
  for (const auto& st : cfg.strata) {
    const WinLossTieTable t = compute_table(st.scenario.build());
    inputs.push_back({st.weight, st.fraction, t.total_wins(), t.total_losses(), t.tie});
  }
  return inputs;
}

// ------------------------------------------------------------------- winprob

int cmd_winprob(const CommonArgs& args) {
  const RunConfig cfg = prepare_config(args);
  if (args.dump) return dump_normalized_config(cfg);
  const WinLossTieTable t = compute_table(cfg.scenario.build());

  OutputTable out;
  out.meta = base_meta("winprob", args);
  out.meta.push_back(quadrature_meta());
  out.columns = {"metric", "value"};
  const std::size_t k_count = t.wins.size();
  for (std::size_t k = 0; k < k_count; ++k) {
    add_metric(out, "win_" + std::to_string(k + 1), format_fixed(t.wins[k], 4));
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    add_metric(out, "loss_" + std::to_string(k + 1), format_fixed(t.losses[k], 4));
  }
  add_metric(out, "p_tie", format_fixed(t.tie, 4));
  add_metric(out, "win_ratio", format_fixed(t.win_ratio(), 4));
  add_metric(out, "net_benefit", format_fixed(t.net_benefit(), 4));
  add_metric(out, "win_odds", format_fixed(t.win_odds(), 4));
  write_output(out, cfg.output.format, cfg.output.path);
  return 0;
}

// ------------------------------------------------------------- power, sample

struct DesignSummary {
  double win_ratio = 0.0;
  double p_tie = 0.0;
  double variance_factor = 0.0;
  bool stratified = false;
};

DesignSummary summarize_design(const RunConfig& cfg) {
  DesignSummary s;
  if (cfg.strata.empty()) {
    const WinLossTieTable t = compute_table(cfg.scenario.build());
    s.win_ratio = t.win_ratio();
    s.p_tie = t.tie;
    s.variance_factor = yg_variance_factor(s.p_tie, cfg.design.allocation);
  } else {
    const auto inputs = evaluate_strata(cfg);
    s.win_ratio = stratified_win_ratio(inputs);
    s.p_tie = stratified_tie(inputs);
    s.variance_factor = stratified_variance_factor(inputs, cfg.design.allocation);
    s.stratified = true;
  }
  return s;
}

void add_design_meta(OutputTable& out, const DesignSummary& s) {
  out.meta.push_back(quadrature_meta());
  if (s.stratified) out.meta.push_back("stratified_variance=size2-weighted-ratio");
}

int cmd_power(const CommonArgs& args) {
  const RunConfig cfg = prepare_config(args);
  if (args.dump) return dump_normalized_config(cfg);
  if (!cfg.design_n) {
    throw ConfigError("design.n", "required by the power command");
  }
  const DesignSummary s = summarize_design(cfg);
  const double power = power_from_variance(
      s.win_ratio, s.variance_factor, static_cast<double>(*cfg.design_n), cfg.design.alpha);

  OutputTable out;
  out.meta = base_meta("power", args);
  add_design_meta(out, s);
  out.columns = {"metric", "value"};
  add_metric(out, "win_ratio", format_fixed(s.win_ratio, 4));
  add_metric(out, "p_tie", format_fixed(s.p_tie, 4));
  add_metric(out, "variance_factor", format_fixed(s.variance_factor, 4));
  add_metric(out, "alpha", format_fixed(cfg.design.alpha, 4));
  add_metric(out, "n", format_integer(*cfg.design_n));
  add_metric(out, "power", format_fixed(power, 4));
  write_output(out, cfg.output.format, cfg.output.path);
  return 0;
}

int cmd_samplesize(const CommonArgs& args) {
  const RunConfig cfg = prepare_config(args);
  if (args.dump) return dump_normalized_config(cfg);
  const DesignSummary s = summarize_design(cfg);
  const SampleSize ss =
      sample_size_from_variance(s.win_ratio, s.variance_factor, cfg.design);

  OutputTable out;
  out.meta = base_meta("samplesize", args);
  add_design_meta(out, s);
  out.columns = {"metric", "value"};
  add_metric(out, "win_ratio", format_fixed(s.win_ratio, 4));
  add_metric(out, "p_tie", format_fixed(s.p_tie, 4));
  add_metric(out, "variance_factor", format_fixed(s.variance_factor, 4));
  add_metric(out, "alpha", format_fixed(cfg.design.alpha, 4));
  add_metric(out, "target_power", format_fixed(cfg.design.power, 4));
  add_metric(out, "n_raw", format_fixed(ss.n_raw, 4));
  add_metric(out, "n", format_integer(ss.n));
  add_metric(out, "achieved_power", format_fixed(ss.achieved_power, 4));
  write_output(out, cfg.output.format, cfg.output.path);
  return 0;
}

// ---------------------------------------------------------------------- grid

int cmd_grid(const CommonArgs& args) {
  const RunConfig cfg = prepare_config(args);
  if (args.dump) return dump_normalized_config(cfg);
  if (!cfg.sweep) {
    throw ConfigError("sweep", "required by the grid command");
  }

  double inflation = 1.0;
  std::function<WinLossTieTable(double, double)> evaluate;
  if (cfg.strata.empty()) {
    evaluate = [&cfg](double tau, double s) {
      return compute_table(cfg.scenario.build(tau, s));
    };
  } else {
    double wf2 = 0.0, w2f3 = 0.0;
    for (const auto& st : cfg.strata) {
      wf2 += st.weight * st.fraction * st.fraction;
      w2f3 += st.weight * st.weight * st.fraction * st.fraction * st.fraction;
    }
    inflation = w2f3 / (wf2 * wf2);
    evaluate = [&cfg, wf2](double tau, double s) {
      // Combined win/loss mass; any common scale cancels in the win ratio,
      // only the tie entry needs normalising.
      WinLossTieTable combined;
      for (const auto& st : cfg.strata) {
        const WinLossTieTable t = compute_table(st.scenario.build(tau, s));
        if (combined.wins.empty()) {
          combined.wins.assign(t.wins.size(), 0.0);
          combined.losses.assign(t.losses.size(), 0.0);
        }
        const double scale = st.weight * st.fraction * st.fraction;
        for (std::size_t k = 0; k < t.wins.size(); ++k) {
          combined.wins[k] += scale * t.wins[k];
          combined.losses[k] += scale * t.losses[k];
        }
        combined.tie += scale * t.tie;
      }
      combined.tie /= wf2;
      return combined;
    };
  }

  const long fixed_n = cfg.design_n.value_or(0);
  const std::vector<GridRow> rows =
      correlation_grid(evaluate, cfg.sweep->taus, cfg.sweep->study_lengths, cfg.design,
                       fixed_n, resolve_threads(args.threads), inflation);

  OutputTable out;
  out.meta = base_meta("grid", args);
  out.meta.push_back(quadrature_meta());
  if (!cfg.strata.empty()) {
    out.meta.push_back("stratified_variance=size2-weighted-ratio");
  }
  out.meta.push_back(fixed_n > 0 ? "mode=power n=" + format_integer(fixed_n)
                                 : "mode=samplesize target_power=" +
                                       format_fixed(cfg.design.power, 4));
  out.columns = {"study_length", "tau", "win_ratio", "p_tie", "n", "power", "rcr"};
  for (const GridRow& r : rows) {
    out.rows.push_back({format_general(r.study_length), format_fixed(r.tau, 4),
                        format_fixed(r.win_ratio, 4), format_fixed(r.p_tie, 4),
                        format_integer(r.n), format_fixed(r.power, 4),
                        format_fixed(r.rcr, 4)});
  }
  write_output(out, cfg.output.format, cfg.output.path);
  return 0;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(const CommonArgs& args) {
  const RunConfig cfg = prepare_config(args);
  if (args.dump) return dump_normalized_config(cfg);
  const ScenarioSpec scenario = cfg.scenario.build();

  const WinLossTieTable t = compute_table(scenario);
  const double formula_power =
      power_at_n(t.win_ratio(), t.tie, static_cast<double>(cfg.sim.n_per_trial),
                 cfg.sim.alpha, cfg.sim.allocation);
  const SimSummary sim = simulate(scenario, cfg.sim);

  OutputTable out;
  out.meta = base_meta("simulate", args);
  out.meta.push_back("replicates=" + std::to_string(cfg.sim.replicates) +
                     " n_per_trial=" + std::to_string(cfg.sim.n_per_trial) +
                     " seed=" + std::to_string(cfg.sim.seed));
  out.columns = {"metric", "value"};
  add_metric(out, "formula_win_ratio", format_fixed(t.win_ratio(), 4));
  add_metric(out, "formula_p_tie", format_fixed(t.tie, 4));
  add_metric(out, "formula_power", format_fixed(formula_power, 4));
  add_metric(out, "sim_win_ratio", format_fixed(sim.mean_win_ratio, 4));
  add_metric(out, "sim_win_ratio_se", format_fixed(sim.se_win_ratio, 4));
  add_metric(out, "sim_p_tie", format_fixed(sim.mean_tie_fraction, 4));
  add_metric(out, "sim_p_tie_se", format_fixed(sim.se_tie_fraction, 4));
  add_metric(out, "sim_power", format_fixed(sim.empirical_power, 4));
  add_metric(out, "sim_power_se", format_fixed(sim.se_power, 4));
  add_metric(out, "replicates", format_integer(sim.replicates));
  add_metric(out, "degenerate", format_integer(sim.degenerate));
  write_output(out, cfg.output.format, cfg.output.path);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Win/loss/tie probabilities, power and sample size for prioritized "
               "time-to-event endpoints"};
  app.set_version_flag("--version", std::string("winstat ") + kVersion);
  app.require_subcommand(1);

  std::map<const CLI::App*, std::pair<CommonArgs, int (*)(const CommonArgs&)>> handlers;
  auto make = [&](const char* name, const char* help, int (*fn)(const CommonArgs&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto& entry = handlers[sub];
    entry.second = fn;
    add_common_options(sub, entry.first);
  };
  make("winprob", "Win/loss/tie probabilities for one scenario", cmd_winprob);
  make("power", "Power at a fixed total sample size", cmd_power);
  make("samplesize", "Sample size for a target power", cmd_samplesize);
  make("grid", "Sweep tau (and study length) and tabulate power or sample size",
       cmd_grid);
  make("simulate", "Monte Carlo check of the analytic operating characteristics",
       cmd_simulate);

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
    return 2;
  }

  try {
    for (const auto& [sub, entry] : handlers) {
      if (sub->parsed()) return entry.second(entry.first);
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace winstat
