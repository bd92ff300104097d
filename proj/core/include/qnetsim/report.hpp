#pragma once

#include <string>
#include <vector>

#include "qnetsim/analysis.hpp"
#include "qnetsim/config.hpp"
#include "qnetsim/photonlink.hpp"
#include "qnetsim/protocol.hpp"

// Deterministic CSV/text emitters: identical inputs give byte-identical
// output regardless of shard count or platform locale.
namespace qnetsim::report {

std::string format_double(double value);  // shortest round-trippable, %.10g

std::string counts_csv(const protocol::TrialCounts& counts);

struct SweepRow {
  double value = 0;
  std::string target;   // phi_plus | phi_minus
  std::string variant;  // raw | ed
  double fidelity = 0;
  double stddev = 0;
  double success_rate_hz = 0;
};

std::string sweep_csv(const std::string& variable, const std::vector<SweepRow>& rows);

std::string budget_csv(const analysis::ErrorBudget& budget);
std::string budget_text(const analysis::ErrorBudget& budget);

std::string link_budget_csv(const std::string& name, const photonlink::LinkBudget& budget,
                            int gates, double mu);
std::string rates_report(const config::RatesSpec& rates);

void write_file(const std::string& path, const std::string& content);

}  // namespace qnetsim::report
