#include "qnetsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qnetsim::config {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

const Entry* Section::find(const std::string& key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

Document Document::parse(const std::string& text) {
  Document doc;
  Section* current = nullptr;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError("empty section name", line_no);
      for (const auto& s : doc.sections) {
        if (s.name == name) throw ConfigError("duplicate section '" + name + "'", line_no);
      }
      doc.sections.push_back({name, {}, line_no});
      current = &doc.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    if (!current) throw ConfigError("key outside any [section]", line_no);
    Entry entry;
    entry.key = trim(line.substr(0, eq));
    entry.value = trim(line.substr(eq + 1));
    entry.line = line_no;
    if (entry.key.empty()) throw ConfigError("empty key", line_no);
    if (current->find(entry.key))
      throw ConfigError("duplicate key '" + entry.key + "'", line_no, entry.key);
    current->entries.push_back(std::move(entry));
  }
  return doc;
}

std::string Document::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i) out += "\n";
    out += "[" + sections[i].name + "]\n";
    for (const auto& e : sections[i].entries) out += e.key + " = " + e.value + "\n";
  }
  return out;
}

const Section* Document::find(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

bool Document::has(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  return s && s->find(key);
}

namespace {

const Entry& require(const Document& doc, const std::string& section, const std::string& key) {
  const Section* s = doc.find(section);
  if (!s) throw ConfigError("missing section [" + section + "]", 0, section + "." + key);
  const Entry* e = s->find(key);
  if (!e) throw ConfigError("missing key", s->line, section + "." + key);
  return *e;
}

double parse_double(const Entry& e, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + e.value + "'", e.line, field);
  }
}

long parse_long(const Entry& e, const std::string& field) {
  try {
    std::size_t used = 0;
    const long v = std::stol(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + e.value + "'", e.line, field);
  }
}

}  // namespace

double Document::get_double(const std::string& section, const std::string& key) const {
  return parse_double(require(*this, section, key), section + "." + key);
}

double Document::get_double_or(const std::string& section, const std::string& key,
                               double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long Document::get_long(const std::string& section, const std::string& key) const {
  return parse_long(require(*this, section, key), section + "." + key);
}

long Document::get_long_or(const std::string& section, const std::string& key,
                           long fallback) const {
  return has(section, key) ? get_long(section, key) : fallback;
}

bool Document::get_bool_or(const std::string& section, const std::string& key,
                           bool fallback) const {
  if (!has(section, key)) return fallback;
  const Entry& e = *find(section)->find(key);
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError("expected true/false, got '" + e.value + "'", e.line, section + "." + key);
}

std::string Document::get_string(const std::string& section, const std::string& key) const {
  return require(*this, section, key).value;
}

std::string Document::get_string_or(const std::string& section, const std::string& key,
                                    const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

std::vector<double> Document::get_double_list(const std::string& section,
                                              const std::string& key) const {
  const Entry& e = require(*this, section, key);
  std::vector<double> out;
  std::string token;
  std::istringstream stream(e.value);
  while (std::getline(stream, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("expected a number list, got '" + e.value + "'", e.line,
                        section + "." + key);
    }
  }
  if (out.empty()) throw ConfigError("empty list", e.line, section + "." + key);
  return out;
}

void Document::set(const std::string& section, const std::string& key,
                   const std::string& value) {
  for (auto& s : sections) {
    if (s.name != section) continue;
    for (auto& e : s.entries) {
      if (e.key == key) {
        e.value = value;
        return;
      }
    }
    s.entries.push_back({key, value, 0});
    return;
  }
  sections.push_back({section, {{key, value, 0}}, 0});
}

bool Document::equivalent(const Document& other) const {
  if (sections.size() != other.sections.size()) return false;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& a = sections[i];
    const auto& b = other.sections[i];
    if (a.name != b.name || a.entries.size() != b.entries.size()) return false;
    for (std::size_t j = 0; j < a.entries.size(); ++j) {
      if (a.entries[j].key != b.entries[j].key || a.entries[j].value != b.entries[j].value)
        return false;
    }
  }
  return true;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"experiment",
       {"scheme", "trials", "seed", "error_detection", "single_photon_source"}},
      {"source", {"mu", "n_max"}},
      {"node_a", {}},  // handled by node_keys()
      {"node_b", {}},
      {"link",
       {"conversion", "fiber_coupling_a", "fiber_coupling_b", "free_space_a", "circulator",
        "extra_efficiency", "fiber_length_km", "fiber_attenuation_db_per_km",
        "fiber_excess_loss_db", "classical_fiber_km", "group_index"}},
      {"shifter", {"modulation_index", "harmonic", "eom_insertion_loss", "filter_transmission"}},
      {"qfc",
       {"dfg_efficiency", "sfg_efficiency", "filter_transmission", "total_override",
        "pump_detuning_hz"}},
      {"tdi",
       {"visibility_error", "detector_efficiency", "path_efficiency", "dark_count_rate_hz",
        "noise_photon_rate_hz", "detection_window_s"}},
      {"protocol",
       {"decoupling_xy8_n", "decoupling_duration_s", "contrast_rejection_probability",
        "duty_cycle", "repetition_overhead_s", "decoherence_exponent"}},
      {"budget_eval", {"gates", "mu", "mc_trials"}},
      {"sweep", {"variable", "values"}},
      {"rates",
       {"nn_eta", "nn_repetition_hz", "nn_duty", "ee_eta_lo", "ee_eta_hi", "ee_repetition_hz",
        "ee_duty", "reported_nn_mhz", "reported_ee_lo_mhz", "reported_ee_hi_mhz"}},
      {"output", {"csv", "json", "text"}},
  };
  return s;
}

const std::set<std::string>& node_keys() {
  static const std::set<std::string> keys = {
      "g_hz", "kappa_in_hz", "kappa_tot_hz", "gamma_hz", "omega_cavity_hz", "omega_siv_up_hz",
      "omega_siv_down_hz", "scan_lo_hz", "scan_hi_hz", "operating_frequency_hz", "r_high_abs",
      "r_high_phase_rad", "r_low_abs", "r_low_phase_rad", "mw_error", "readout_error",
      "nuclear_assignment_error", "readout_duration_s", "t2n_xy8_1_s", "t2n_xy8_128_s",
      "t2e_xy8_1_s"};
  return keys;
}

void validate_keys(const Document& doc) {
  for (const auto& section : doc.sections) {
    if (section.name.rfind("budget_", 0) == 0 && section.name != "budget_eval") {
      for (const auto& e : section.entries) {
        parse_double(e, section.name + "." + e.key);  // budgets: every value numeric
      }
      continue;
    }
    const auto it = schema().find(section.name);
    if (it == schema().end())
      throw ConfigError("unknown section [" + section.name + "]", section.line);
    const auto& allowed =
        (section.name == "node_a" || section.name == "node_b") ? node_keys() : it->second;
    for (const auto& e : section.entries) {
      if (!allowed.count(e.key))
        throw ConfigError("unknown key '" + e.key + "'", e.line, section.name + "." + e.key);
    }
  }
}

spinphoton::NodeConfig build_node(const Document& doc, const std::string& section,
                                  std::optional<cavity::CavityParams>* params_out) {
  spinphoton::NodeConfig node;
  const bool has_override = doc.has(section, "r_low_abs");
  if (has_override) {
    for (const char* key : {"r_high_abs", "r_high_phase_rad", "r_low_abs", "r_low_phase_rad"}) {
      if (!doc.has(section, key))
        throw ConfigError("reflectivity override requires '" + std::string(key) + "'",
                          doc.find(section)->line, section + "." + key);
    }
    node.reflectivities.r_high = std::polar(doc.get_double(section, "r_high_abs"),
                                            doc.get_double(section, "r_high_phase_rad"));
    node.reflectivities.r_low = std::polar(doc.get_double(section, "r_low_abs"),
                                           doc.get_double(section, "r_low_phase_rad"));
    node.reflectivities.operating_frequency_hz =
        doc.get_double_or(section, "operating_frequency_hz", 0.0);
    node.reflectivities.validate();
  } else {
    cavity::CavityParams params;
    params.g_hz = doc.get_double(section, "g_hz");
    params.kappa_in_hz = doc.get_double(section, "kappa_in_hz");
    params.kappa_tot_hz = doc.get_double(section, "kappa_tot_hz");
    params.gamma_hz = doc.get_double(section, "gamma_hz");
    params.omega_cavity_hz = doc.get_double(section, "omega_cavity_hz");
    params.omega_siv_up_hz = doc.get_double(section, "omega_siv_up_hz");
    params.omega_siv_down_hz = doc.get_double(section, "omega_siv_down_hz");
    params.validate();
    double operating;
    if (doc.has(section, "operating_frequency_hz")) {
      operating = doc.get_double(section, "operating_frequency_hz");
    } else {
      cavity::FrequencyScan scan;
      scan.lo_hz = doc.get_double(section, "scan_lo_hz");
      scan.hi_hz = doc.get_double(section, "scan_hi_hz");
      operating = cavity::max_contrast_frequency(params, scan).omega_hz;
    }
    node.reflectivities = cavity::reflectivities_at(params, operating);
    if (params_out) *params_out = params;
  }
  node.mw_error = doc.get_double_or(section, "mw_error", 0.0);
  node.readout_error = doc.get_double_or(section, "readout_error", 0.0);
  node.nuclear_assignment_error = doc.get_double_or(section, "nuclear_assignment_error", 0.0);
  node.readout_duration_s = doc.get_double_or(section, "readout_duration_s", 0.0);
  if (doc.has(section, "t2n_xy8_1_s"))
    node.t2_nuclear_s[1] = doc.get_double(section, "t2n_xy8_1_s");
  if (doc.has(section, "t2n_xy8_128_s"))
    node.t2_nuclear_s[128] = doc.get_double(section, "t2n_xy8_128_s");
  node.t2_electron_s = doc.get_double_or(section, "t2e_xy8_1_s", 0.0);

  for (double p : {node.mw_error, node.readout_error, node.nuclear_assignment_error}) {
    if (p < 0 || p > 1)
      throw ConfigError("probability outside [0,1]", doc.find(section)->line, section);
  }
  return node;
}

}  // namespace

ExperimentConfig build_experiment(const Document& doc) {
  validate_keys(doc);
  ExperimentConfig out;
  protocol::ProtocolConfig& cfg = out.protocol;

  if (doc.find("experiment")) {
    const std::string scheme = doc.get_string("experiment", "scheme");
    if (scheme == "ee") {
      cfg.scheme = protocol::Scheme::ee;
    } else if (scheme == "nn") {
      cfg.scheme = protocol::Scheme::nn;
    } else {
      throw ConfigError("scheme must be ee or nn", doc.find("experiment")->line,
                        "experiment.scheme");
    }
    cfg.trials = doc.get_long("experiment", "trials");
    if (cfg.trials <= 0)
      throw ConfigError("trials must be positive", doc.find("experiment")->line,
                        "experiment.trials");
    cfg.rng_seed = static_cast<std::uint64_t>(doc.get_long_or("experiment", "seed", 0));
    cfg.error_detection = doc.get_bool_or("experiment", "error_detection", false);
    cfg.single_photon_source = doc.get_bool_or("experiment", "single_photon_source", false);

    cfg.mu = doc.get_double_or("source", "mu", 0.0);
    cfg.photon_n_max = static_cast<int>(doc.get_long_or("source", "n_max", 2));

    cfg.node_a = build_node(doc, "node_a", &out.cavity_a);
    cfg.node_b = build_node(doc, "node_b", &out.cavity_b);

    const std::string conversion = doc.get_string_or("link", "conversion", "none");
    if (conversion == "none") {
      cfg.link.conversion = protocol::Conversion::none;
    } else if (conversion == "shifting") {
      cfg.link.conversion = protocol::Conversion::shifting;
    } else if (conversion == "qfc") {
      cfg.link.conversion = protocol::Conversion::qfc;
    } else {
      throw ConfigError("conversion must be none, shifting or qfc", doc.find("link")->line,
                        "link.conversion");
    }
    cfg.link.fiber_coupling_a = doc.get_double_or("link", "fiber_coupling_a", 1.0);
    cfg.link.fiber_coupling_b = doc.get_double_or("link", "fiber_coupling_b", 1.0);
    cfg.link.free_space_a = doc.get_double_or("link", "free_space_a", 1.0);
    cfg.link.circulator = doc.get_double_or("link", "circulator", 1.0);
    cfg.link.extra_efficiency = doc.get_double_or("link", "extra_efficiency", 1.0);
    const double fiber_km = doc.get_double_or("link", "fiber_length_km", 0.0);
    if (fiber_km > 0 || doc.has("link", "fiber_excess_loss_db")) {
      photonlink::FiberSegment segment;
      segment.length_km = fiber_km;
      segment.attenuation_db_per_km = doc.get_double_or("link", "fiber_attenuation_db_per_km", 0.3);
      segment.excess_loss_db = doc.get_double_or("link", "fiber_excess_loss_db", 0.0);
      cfg.link.fibers.push_back(segment);
    }
    cfg.link.classical.fiber_length_km = doc.get_double_or("link", "classical_fiber_km", 0.0);
    cfg.link.classical.group_index = doc.get_double_or("link", "group_index", 1.468);

    if (doc.find("shifter")) {
      cfg.link.shifter.modulation_index = doc.get_double_or("shifter", "modulation_index", 1.8412);
      cfg.link.shifter.harmonic =
          static_cast<int>(doc.get_long_or("shifter", "harmonic", 1));
      cfg.link.shifter.eom_insertion_loss =
          doc.get_double_or("shifter", "eom_insertion_loss", 0.5);
      cfg.link.shifter.filter_transmission =
          doc.get_double_or("shifter", "filter_transmission", 0.4);
    }
    if (doc.find("qfc")) {
      cfg.link.qfc.dfg_efficiency = doc.get_double_or("qfc", "dfg_efficiency", 0.33);
      cfg.link.qfc.sfg_efficiency = doc.get_double_or("qfc", "sfg_efficiency", 0.30);
      cfg.link.qfc.filter_transmission = doc.get_double_or("qfc", "filter_transmission", 0.545);
      if (doc.has("qfc", "total_override"))
        cfg.link.qfc.total_override = doc.get_double("qfc", "total_override");
      cfg.link.qfc.pump_detuning_hz = doc.get_double_or("qfc", "pump_detuning_hz", 13e9);
    }

    cfg.link.tdi.visibility_error = doc.get_double_or("tdi", "visibility_error", 0.02);
    cfg.link.tdi.detector_efficiency = doc.get_double_or("tdi", "detector_efficiency", 1.0);
    cfg.link.tdi.path_efficiency = doc.get_double_or("tdi", "path_efficiency", 1.0);
    cfg.link.tdi.dark_count_rate_hz = doc.get_double_or("tdi", "dark_count_rate_hz", 0.0);
    cfg.link.tdi.noise_photon_rate_hz = doc.get_double_or("tdi", "noise_photon_rate_hz", 0.0);
    cfg.link.tdi.detection_window_s = doc.get_double_or("tdi", "detection_window_s", 400e-9);

    cfg.decoupling.xy8_n = static_cast<int>(doc.get_long_or("protocol", "decoupling_xy8_n", 1));
    cfg.decoupling.duration_s = doc.get_double_or("protocol", "decoupling_duration_s", 0.0);
    cfg.contrast_rejection_probability =
        doc.get_double_or("protocol", "contrast_rejection_probability", 0.0);
    cfg.duty_cycle = doc.get_double_or("protocol", "duty_cycle", 1.0);
    cfg.repetition_overhead_s = doc.get_double_or("protocol", "repetition_overhead_s", 0.0);
    cfg.decoherence_exponent = doc.get_double_or("protocol", "decoherence_exponent", 2.0);
  }

  if (const Section* sweep = doc.find("sweep")) {
    SweepSpec spec;
    spec.variable = doc.get_string("sweep", "variable");
    if (spec.variable != "mu" && spec.variable != "decoupling_duration_s" &&
        spec.variable != "fiber_length_km") {
      throw ConfigError("unknown sweep variable '" + spec.variable + "'", sweep->line,
                        "sweep.variable");
    }
    spec.values = doc.get_double_list("sweep", "values");
    out.sweep = spec;
  }

  if (doc.find("rates")) {
    RatesSpec r;
    r.nn_eta = doc.get_double("rates", "nn_eta");
    r.nn_repetition_hz = doc.get_double("rates", "nn_repetition_hz");
    r.nn_duty = doc.get_double("rates", "nn_duty");
    r.ee_eta_lo = doc.get_double("rates", "ee_eta_lo");
    r.ee_eta_hi = doc.get_double("rates", "ee_eta_hi");
    r.ee_repetition_hz = doc.get_double("rates", "ee_repetition_hz");
    r.ee_duty = doc.get_double("rates", "ee_duty");
    r.reported_nn_mhz = doc.get_double("rates", "reported_nn_mhz");
    r.reported_ee_lo_mhz = doc.get_double("rates", "reported_ee_lo_mhz");
    r.reported_ee_hi_mhz = doc.get_double("rates", "reported_ee_hi_mhz");
    out.rates = r;
  }

  for (const auto& section : doc.sections) {
    if (section.name.rfind("budget_", 0) != 0 || section.name == "budget_eval") continue;
    photonlink::LinkBudget budget;
    for (const auto& e : section.entries) {
      photonlink::BudgetEntry entry;
      entry.efficiency = parse_double(e, section.name + "." + e.key);
      if (e.key.size() > 3 && e.key.substr(e.key.size() - 3) == "_sq") {
        entry.name = e.key.substr(0, e.key.size() - 3);
        entry.squared = true;
      } else {
        entry.name = e.key;
      }
      budget.entries.push_back(std::move(entry));
    }
    out.budgets.emplace_back(section.name.substr(7), std::move(budget));
  }
  if (doc.find("budget_eval")) {
    out.budget_eval_gates = static_cast<int>(doc.get_long_or("budget_eval", "gates", 1));
    out.budget_eval_mu = doc.get_double_or("budget_eval", "mu", 0.1);
    out.budget_mc_trials = doc.get_long_or("budget_eval", "mc_trials", 0);
  }
  return out;
}

}  // namespace qnetsim::config
