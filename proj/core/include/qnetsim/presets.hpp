#pragma once

#include <string>
#include <vector>

namespace qnetsim::config {

// Embedded experiment presets, one per reproduced figure or table.
std::vector<std::string> preset_names();
bool has_preset(const std::string& name);
std::string preset_text(const std::string& name);  // throws ConfigError for unknown names

}  // namespace qnetsim::config
