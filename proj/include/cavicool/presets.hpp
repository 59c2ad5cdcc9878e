#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavicool/params.hpp"

namespace cavicool {

// Bumped whenever a frozen preset value changes.
inline constexpr int kPresetVersion = 1;

// Re-derives detunings after overrides so that, e.g., a list of Omega values
// keeps Delta_bar = nu.
enum class DetuningRule {
  fixed,
  casc_sideband,
  casc_doppler,
  casc_strong,
  nabla_g_weak_sideband,
  nabla_g_weak_doppler,
  nabla_g_saturated_sideband,
  nabla_g_saturated_doppler,
};

std::string to_string(DetuningRule r);
std::optional<DetuningRule> detuning_rule(const std::string& name);
// Fields a rule writes; an explicit value for any of them disables the rule.
std::vector<std::string> rule_fields(DetuningRule r);
SystemParams apply_rule(DetuningRule r, const SystemParams& p);

struct Preset {
  std::string name;
  std::string description;
  SystemParams params;
  DetuningRule rule = DetuningRule::fixed;
  // Command defaults in config syntax (key, value).
  std::vector<std::pair<std::string, std::string>> options;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

}  // namespace cavicool
