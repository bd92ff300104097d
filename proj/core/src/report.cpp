#include "qnetsim/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace qnetsim::report {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string counts_csv(const protocol::TrialCounts& counts) {
  std::string out = "herald,flags_pass,basis,outcome_a,outcome_b,count\n";
  const char* heralds[2] = {"plus", "minus"};
  const char* bases[3] = {"zz", "xx", "yy"};
  for (int h = 0; h < 2; ++h)
    for (int p = 0; p < 2; ++p)
      for (int b = 0; b < 3; ++b)
        for (int o = 0; o < 4; ++o) {
          out += std::string(heralds[h]) + "," + (p ? "true" : "false") + "," + bases[b] + "," +
                 std::to_string(o / 2) + "," + std::to_string(o % 2) + "," +
                 std::to_string(counts.counts[h][p][b][o]) + "\n";
        }
  out += "attempts,,,,," + std::to_string(counts.attempts) + "\n";
  out += "rejected,,,,," + std::to_string(counts.rejected) + "\n";
  out += "herald_none,,,,," + std::to_string(counts.herald_none) + "\n";
  out += "noise_heralds,,,,," + std::to_string(counts.noise_heralds) + "\n";
  return out;
}

std::string sweep_csv(const std::string& variable, const std::vector<SweepRow>& rows) {
  std::string out = variable + ",target,variant,fidelity,fidelity_stddev,success_rate_hz\n";
  for (const auto& r : rows) {
    out += format_double(r.value) + "," + r.target + "," + r.variant + "," +
           format_double(r.fidelity) + "," + format_double(r.stddev) + "," +
           format_double(r.success_rate_hz) + "\n";
  }
  return out;
}

std::string budget_csv(const analysis::ErrorBudget& budget) {
  std::string out = "source,input_node_a,input_node_b";
  for (const auto& c : budget.columns) out += ",contribution_" + c;
  out += "\n";
  for (const auto& row : budget.rows) {
    out += row.source + "," + row.input_a + "," + row.input_b;
    for (double v : row.contributions) out += "," + format_double(v);
    out += "\n";
  }
  out += "Total expected error,-,-";
  for (double v : budget.totals) out += "," + format_double(v);
  out += "\n";
  return out;
}

std::string budget_text(const analysis::ErrorBudget& budget) {
  std::string out = "Error budget (infidelity contributions)\n";
  out += "  columns:";
  for (const auto& c : budget.columns) out += " " + c;
  out += "\n";
  char buf[160];
  for (const auto& row : budget.rows) {
    std::snprintf(buf, sizeof buf, "  %-36s %-14s %-14s", row.source.c_str(),
                  row.input_a.c_str(), row.input_b.c_str());
    out += buf;
    for (double v : row.contributions) {
      std::snprintf(buf, sizeof buf, "  %6.2f %%", 100.0 * v);
      out += buf;
    }
    out += "\n";
  }
  std::snprintf(buf, sizeof buf, "  %-36s %-14s %-14s", "Total expected error", "-", "-");
  out += buf;
  for (double v : budget.totals) {
    std::snprintf(buf, sizeof buf, "  %6.2f %%", 100.0 * v);
    out += buf;
  }
  out += "\n";
  if (budget.mc_trials > 0) {
    out += "  Monte Carlo cross-check (" + std::to_string(budget.mc_trials) + " trials) 1-sigma:";
    for (double v : budget.total_stddev) {
      std::snprintf(buf, sizeof buf, "  %5.2f %%", 100.0 * v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string link_budget_csv(const std::string& name, const photonlink::LinkBudget& budget,
                            int gates, double mu) {
  std::string out = "budget,entry,efficiency,squared\n";
  for (const auto& e : budget.entries) {
    out += name + "," + e.name + "," + format_double(e.efficiency) + "," +
           (e.squared ? "true" : "false") + "\n";
  }
  if (!budget.entries.empty()) {
    out += name + ",photonic_link_efficiency," + format_double(budget.product()) + ",false\n";
    out += name + ",success_probability_eta," +
           format_double(photonlink::link_success_probability(budget, gates, mu)) + ",false\n";
  }
  return out;
}

std::string rates_report(const config::RatesSpec& rates) {
  auto rate = [](double eta, double rep, double duty) {
    return protocol::success_rate_hz({rep, eta, duty});
  };
  const double nn = rate(rates.nn_eta, rates.nn_repetition_hz, rates.nn_duty);
  const double ee_lo = rate(rates.ee_eta_lo, rates.ee_repetition_hz, rates.ee_duty);
  const double ee_hi = rate(rates.ee_eta_hi, rates.ee_repetition_hz, rates.ee_duty);
  char buf[256];
  std::string out = "Success rates r_suc = eta * R * D\n";
  std::snprintf(buf, sizeof buf,
                "  nucleus-nucleus: eta=%.3g R=%.4g Hz D=%.3g -> %.3g mHz (reported %.3g mHz)\n",
                rates.nn_eta, rates.nn_repetition_hz, rates.nn_duty, 1e3 * nn,
                rates.reported_nn_mhz);
  out += buf;
  std::snprintf(
      buf, sizeof buf,
      "  electron-electron: eta in [%.3g, %.3g] R=%.4g Hz D=%.3g -> [%.3g, %.3g] mHz\n",
      rates.ee_eta_lo, rates.ee_eta_hi, rates.ee_repetition_hz, rates.ee_duty, 1e3 * ee_lo,
      1e3 * ee_hi);
  out += buf;
  std::snprintf(buf, sizeof buf, "  reported electron-electron range: [%.3g, %.3g] mHz\n",
                rates.reported_ee_lo_mhz, rates.reported_ee_hi_mhz);
  out += buf;
  out +=
      "  note: the electron-electron product eta*R*D does not reproduce the reported\n"
      "  endpoints under a single averaged duty cycle; the computed range is emitted\n"
      "  as-is rather than fitted to the reported one.\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream stream(p, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot open '" + path + "' for writing");
  stream << content;
}

}  // namespace qnetsim::report
