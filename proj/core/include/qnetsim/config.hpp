#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnetsim/analysis.hpp"
#include "qnetsim/cavity.hpp"
#include "qnetsim/photonlink.hpp"
#include "qnetsim/protocol.hpp"

// Sectioned key-value experiment configs: strict schema, units in key names,
// deterministic round-trip serialization. The exact schema is documented in
// docs/config.md.
namespace qnetsim::config {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  int line = 0;

  const Entry* find(const std::string& key) const;
};

struct Document {
  std::vector<Section> sections;

  static Document parse(const std::string& text);
  std::string serialize() const;

  const Section* find(const std::string& name) const;
  bool has(const std::string& section, const std::string& key) const;

  // Typed accessors; throw ConfigError with line/field context.
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key) const;
  long get_long_or(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  // Structural equality: section order, key order, and values.
  bool equivalent(const Document& other) const;
};

struct SweepSpec {
  std::string variable;  // mu | decoupling_duration_s | fiber_length_km
  std::vector<double> values;
};

struct RatesSpec {
  double nn_eta = 0, nn_repetition_hz = 0, nn_duty = 0;
  double ee_eta_lo = 0, ee_eta_hi = 0, ee_repetition_hz = 0, ee_duty = 0;
  double reported_nn_mhz = 0, reported_ee_lo_mhz = 0, reported_ee_hi_mhz = 0;
};

struct ExperimentConfig {
  protocol::ProtocolConfig protocol;
  std::optional<cavity::CavityParams> cavity_a;  // present when derived from a cavity model
  std::optional<cavity::CavityParams> cavity_b;
  std::optional<SweepSpec> sweep;
  std::optional<RatesSpec> rates;
  // Named link-efficiency budgets ([budget_*] sections, file order kept).
  std::vector<std::pair<std::string, photonlink::LinkBudget>> budgets;
  int budget_eval_gates = 1;
  double budget_eval_mu = 0.1;
  long budget_mc_trials = 0;
};

// Schema validation + construction. Unknown sections or keys are rejected.
ExperimentConfig build_experiment(const Document& doc);

}  // namespace qnetsim::config
