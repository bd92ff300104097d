// qnetsim: batch runner for the two-node entanglement simulator.
//
//   qnetsim simulate|sweep|budget (--config <path> | --preset <name>)
//           [--seed <u64>] [--trials N] [--out <dir>] [--shards N]
//
// Exit codes: 0 success, 2 config error, 3 runtime/numerical error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnetsim/analysis.hpp"
#include "qnetsim/config.hpp"
#include "qnetsim/presets.hpp"
#include "qnetsim/protocol.hpp"
#include "qnetsim/report.hpp"

namespace {

using nlohmann::json;
using namespace qnetsim;

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir = "qnetsim_out";
  std::int64_t seed = -1;
  long trials = 0;
  int shards = 4;
};

config::Document load_document(const CommonOptions& opt) {
  if (opt.config_path.empty() == opt.preset.empty()) {
    throw ConfigError("pass exactly one of --config or --preset");
  }
  std::string text;
  if (!opt.preset.empty()) {
    text = config::preset_text(opt.preset);
  } else {
    std::ifstream stream(opt.config_path);
    if (!stream) throw ConfigError("cannot read config file '" + opt.config_path + "'");
    std::stringstream buffer;
    buffer << stream.rdbuf();
    text = buffer.str();
  }
  config::Document doc = config::Document::parse(text);
  if (opt.seed >= 0) doc.set("experiment", "seed", std::to_string(opt.seed));
  if (opt.trials > 0) doc.set("experiment", "trials", std::to_string(opt.trials));
  return doc;
}

json fidelity_json(const analysis::FidelityEstimate& est) {
  return {{"fidelity", est.fidelity}, {"stddev", est.stddev}, {"clamped", est.clamped}};
}

void add_estimates(json& node, const protocol::TrialEngine& engine,
                   const protocol::TrialCounts& counts, protocol::Herald herald,
                   analysis::BellTarget target) {
  const std::string name = protocol::to_string(herald);
  const auto raw = analysis::CorrelatorCounts::from_trial_counts(counts, herald, false);
  node[name]["sampled_raw"] = fidelity_json(analysis::bell_fidelity(raw, target));
  node[name]["exact_raw"] = engine.ensemble_fidelity(herald, false);
  if (engine.config().scheme == protocol::Scheme::nn) {
    const auto ed = analysis::CorrelatorCounts::from_trial_counts(counts, herald, true);
    node[name]["sampled_ed"] = fidelity_json(analysis::bell_fidelity(ed, target));
    node[name]["exact_ed"] = engine.ensemble_fidelity(herald, true);
  }
}

int cmd_simulate(const CommonOptions& opt) {
  const config::Document doc = load_document(opt);
  const config::ExperimentConfig exp = config::build_experiment(doc);
  if (!doc.find("experiment")) throw ConfigError("simulate needs an [experiment] section");

  protocol::TrialEngine engine(exp.protocol);
  const auto counts =
      protocol::run_many(engine, exp.protocol.trials, opt.shards, /*heralded_only=*/true);

  json report;
  report["scheme"] = exp.protocol.scheme == protocol::Scheme::ee ? "ee" : "nn";
  report["trials"] = exp.protocol.trials;
  report["seed"] = exp.protocol.rng_seed;
  report["herald_probability"] = engine.herald_probability();
  report["herald_probability_plus"] = engine.probability(protocol::Herald::plus);
  report["herald_probability_minus"] = engine.probability(protocol::Herald::minus);
  const auto rate = engine.rate_model();
  report["rate"]["repetition_rate_hz"] = rate.repetition_rate_hz;
  report["rate"]["duty_cycle"] = rate.duty_cycle;
  report["rate"]["success_rate_hz"] = engine.success_rate_hz();
  report["latency"]["classical_latency_s"] =
      protocol::classical_latency_s(exp.protocol.link.classical);
  report["latency"]["decoupling_covers_round_trip"] = engine.latency_satisfied();
  add_estimates(report["bell"], engine, counts, protocol::Herald::minus,
                analysis::BellTarget::phi_minus);
  add_estimates(report["bell"], engine, counts, protocol::Herald::plus,
                analysis::BellTarget::phi_plus);
  report["counts"]["attempts"] = counts.attempts;
  report["counts"]["rejected_by_contrast"] = counts.rejected;
  report["counts"]["noise_heralds"] = counts.noise_heralds;

  report::write_file(opt.out_dir + "/report.json", report.dump(2) + "\n");
  report::write_file(opt.out_dir + "/counts.csv", report::counts_csv(counts));
  report::write_file(opt.out_dir + "/config_used.txt", doc.serialize());

  std::ostringstream summary;
  summary << "qnetsim simulate: " << report["scheme"].get<std::string>() << " scheme, "
          << exp.protocol.trials << " heralded trials\n";
  summary << "  herald probability per attempt: "
          << report::format_double(engine.herald_probability()) << "\n";
  summary << "  success rate: " << report::format_double(engine.success_rate_hz()) << " Hz\n";
  for (const auto herald : {protocol::Herald::minus, protocol::Herald::plus}) {
    const std::string name = protocol::to_string(herald);
    summary << "  F(phi_" << name << ") sampled: "
            << report["bell"][name]["sampled_raw"]["fidelity"].dump() << " +- "
            << report["bell"][name]["sampled_raw"]["stddev"].dump() << "\n";
    if (exp.protocol.scheme == protocol::Scheme::nn) {
      summary << "  F(phi_" << name << ") error-detected: "
              << report["bell"][name]["sampled_ed"]["fidelity"].dump() << " +- "
              << report["bell"][name]["sampled_ed"]["stddev"].dump() << "\n";
    }
  }
  const std::string text = summary.str();
  report::write_file(opt.out_dir + "/summary.txt", text);
  std::cout << text;
  return 0;
}

int cmd_sweep(const CommonOptions& opt) {
  const config::Document doc = load_document(opt);
  config::ExperimentConfig exp = config::build_experiment(doc);
  if (!exp.sweep) throw ConfigError("sweep needs a [sweep] section");

  std::vector<report::SweepRow> rows;
  for (const double value : exp.sweep->values) {
    protocol::ProtocolConfig cfg = exp.protocol;
    if (exp.sweep->variable == "mu") {
      cfg.mu = value;
    } else if (exp.sweep->variable == "decoupling_duration_s") {
      cfg.decoupling.duration_s = value;
      cfg.decoupling.xy8_n = value <= 0.0100001 ? 1 : 128;
    } else {  // fiber_length_km
      if (cfg.link.fibers.empty()) cfg.link.fibers.push_back({value, 0.3, 0.0});
      cfg.link.fibers.front().length_km = value;
      cfg.link.classical.fiber_length_km = value;
    }
    protocol::TrialEngine engine(cfg);
    const auto counts = protocol::run_many(engine, cfg.trials, opt.shards, true);
    const double rate = engine.success_rate_hz();

    auto add = [&](protocol::Herald herald, analysis::BellTarget target, bool ed,
                   const std::string& variant) {
      const auto cc = analysis::CorrelatorCounts::from_trial_counts(counts, herald, ed);
      const auto est = analysis::bell_fidelity(cc, target);
      rows.push_back({value, herald == protocol::Herald::minus ? "phi_minus" : "phi_plus",
                      variant, est.fidelity, est.stddev, rate});
    };
    add(protocol::Herald::minus, analysis::BellTarget::phi_minus, false, "raw");
    add(protocol::Herald::plus, analysis::BellTarget::phi_plus, false, "raw");
    if (cfg.scheme == protocol::Scheme::nn) {
      add(protocol::Herald::minus, analysis::BellTarget::phi_minus, true, "ed");
      add(protocol::Herald::plus, analysis::BellTarget::phi_plus, true, "ed");
    }
  }
  const std::string csv = report::sweep_csv(exp.sweep->variable, rows);
  report::write_file(opt.out_dir + "/sweep.csv", csv);
  report::write_file(opt.out_dir + "/config_used.txt", doc.serialize());
  std::cout << csv;
  return 0;
}

int cmd_budget(const CommonOptions& opt) {
  const config::Document doc = load_document(opt);
  const config::ExperimentConfig exp = config::build_experiment(doc);
  bool wrote = false;

  if (!exp.budgets.empty() || doc.find("budget_eval")) {
    std::string csv;
    for (const auto& [name, budget] : exp.budgets) {
      csv += report::link_budget_csv(name, budget, exp.budget_eval_gates, exp.budget_eval_mu);
    }
    if (csv.empty()) csv = "budget,entry,efficiency,squared\n";
    report::write_file(opt.out_dir + "/link_budget.csv", csv);
    std::cout << csv;
    wrote = true;
  }
  if (doc.find("experiment")) {
    const auto budget = analysis::error_budget(exp.protocol, exp.budget_mc_trials);
    report::write_file(opt.out_dir + "/error_budget.csv", report::budget_csv(budget));
    const std::string text = report::budget_text(budget);
    report::write_file(opt.out_dir + "/error_budget.txt", text);
    std::cout << text;
    wrote = true;
  }
  if (exp.rates) {
    const std::string text = report::rates_report(*exp.rates);
    report::write_file(opt.out_dir + "/rates.txt", text);
    std::cout << text;
    wrote = true;
  }
  if (!wrote) throw ConfigError("budget needs [budget_*], [experiment] or [rates] sections");
  report::write_file(opt.out_dir + "/config_used.txt", doc.serialize());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-node heralded entanglement network simulator"};
  app.require_subcommand(1);

  CommonOptions opt;
  for (auto* sub : {app.add_subcommand("simulate", "Run trials and report fidelities"),
                    app.add_subcommand("sweep", "Sweep a config variable, emit CSV"),
                    app.add_subcommand("budget", "Emit error/link budgets and rate tables")}) {
    sub->add_option("--config", opt.config_path, "Config file path");
    sub->add_option("--preset", opt.preset, "Built-in preset name");
    sub->add_option("--seed", opt.seed, "Override the RNG seed");
    sub->add_option("--trials", opt.trials, "Override the trial count");
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--shards", opt.shards, "Worker shard count");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(opt);
    if (app.got_subcommand("sweep")) return cmd_sweep(opt);
    return cmd_budget(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}
