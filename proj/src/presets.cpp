#include "cavicool/presets.hpp"

#include <array>
#include <stdexcept>

#include "cavicool/cooling.hpp"

namespace cavicool {

namespace {

struct RuleName {
  DetuningRule rule;
  const char* name;
};

constexpr std::array<RuleName, 8> kRuleNames = {{
    {DetuningRule::fixed, "fixed"},
    {DetuningRule::casc_sideband, "casc-sideband"},
    {DetuningRule::casc_doppler, "casc-doppler"},
    {DetuningRule::casc_strong, "casc-strong"},
    {DetuningRule::nabla_g_weak_sideband, "nabla-g-weak-sideband"},
    {DetuningRule::nabla_g_weak_doppler, "nabla-g-weak-doppler"},
    {DetuningRule::nabla_g_saturated_sideband, "nabla-g-saturated-sideband"},
    {DetuningRule::nabla_g_saturated_doppler, "nabla-g-saturated-doppler"},
}};

SystemParams point(double g, double kappa, double Omega, double Delta,
                   double Delta_c, double N, double eta, double eta_c) {
  SystemParams p;
  p.g = g;
  p.kappa = kappa;
  p.Omega = Omega;
  p.Delta = Delta;
  p.Delta_c = Delta_c;
  p.N = N;
  p.eta = eta;
  p.eta_c = eta_c;
  return p;
}

DetuningRule cell_rule(const std::string& name) {
  if (name == "casc-sb-weak") return DetuningRule::casc_sideband;
  if (name == "casc-doppler-weak") return DetuningRule::casc_doppler;
  if (name == "casc-sb-strong") return DetuningRule::casc_strong;
  if (name == "nabla-g-sb-weak") return DetuningRule::nabla_g_weak_sideband;
  if (name == "nabla-g-doppler-weak") return DetuningRule::nabla_g_weak_doppler;
  if (name == "nabla-g-saturated-sb") return DetuningRule::nabla_g_saturated_sideband;
  if (name == "nabla-g-saturated-doppler") return DetuningRule::nabla_g_saturated_doppler;
  return DetuningRule::fixed;
}

std::vector<Preset> build() {
  using Opts = std::vector<std::pair<std::string, std::string>>;
  const Opts wide = {{"omega_min", "-3"}, {"omega_max", "3"}, {"omega_points", "1201"}};
  const Opts scan = {{"delta_nu_min", "-0.05"},
                     {"delta_nu_max", "0.05"},
                     {"delta_nu_points", "201"},
                     {"scan_mode", "anharmonic"}};

  std::vector<Preset> out;
  out.push_back({"fig3a", "weak-drive CASC spectrum, ground-state cavity",
                 point(0.5, 5.0, 0.1, -1.0, 0.0, 0.0, 0.05, 0.0),
                 DetuningRule::fixed, wide});
  out.push_back({"fig3a-thermal", "weak-drive CASC spectrum, N = 0.5",
                 point(0.5, 5.0, 0.1, -1.0, 0.0, 0.5, 0.05, 0.0),
                 DetuningRule::fixed, wide});
  out.push_back({"fig4", "nabla-g spectrum, thermal cavity, strong blue drive",
                 point(0.01, 0.3, 2.0, 6.0, 7.0, 0.5, 0.0, 0.05),
                 DetuningRule::fixed,
                 {{"omega_min", "-10"}, {"omega_max", "10"}, {"omega_points", "2001"}}});
  out.push_back({"fig6", "weak-drive trap-frequency scan, eta = eta_c",
                 point(0.2, 4.0, 0.1, -1.0, 3.0, 0.0, 0.05, 0.05),
                 DetuningRule::fixed, scan});
  Preset fig7{"fig7", "strong-drive trap-frequency scan at Delta_bar = nu",
              point(0.2, 4.0, 0.65, 0.0, 3.0, 0.0, 0.05, 0.05),
              DetuningRule::casc_strong, scan};
  fig7.params = apply_rule(fig7.rule, fig7.params);
  out.push_back(fig7);
  out.push_back({"fig8", "saturated spectrum with interfering mechanisms",
                 point(0.3, 3.0, 0.2, 0.0, 3.0, 0.0, 0.05, 0.05),
                 DetuningRule::fixed, wide});

  for (const auto& name : table1_names()) {
    const auto p = table1_point(name, 0.0);
    if (!p) continue;
    out.push_back({name, "closed-form cell designated point", *p, cell_rule(name),
                   {{"cell", name}}});
  }
  return out;
}

}  // namespace

std::string to_string(DetuningRule r) {
  for (const auto& [rule, name] : kRuleNames)
    if (rule == r) return name;
  return "fixed";
}

std::optional<DetuningRule> detuning_rule(const std::string& name) {
  for (const auto& [rule, n] : kRuleNames)
    if (name == n) return rule;
  return std::nullopt;
}

std::vector<std::string> rule_fields(DetuningRule r) {
  switch (r) {
    case DetuningRule::fixed: return {};
    case DetuningRule::casc_sideband:
    case DetuningRule::casc_doppler:
    case DetuningRule::casc_strong: return {"Delta"};
    case DetuningRule::nabla_g_weak_sideband:
    case DetuningRule::nabla_g_weak_doppler: return {"Delta_c"};
    case DetuningRule::nabla_g_saturated_sideband:
    case DetuningRule::nabla_g_saturated_doppler: return {"Delta", "Delta_c"};
  }
  return {};
}

SystemParams apply_rule(DetuningRule r, const SystemParams& p) {
  switch (r) {
    case DetuningRule::fixed: return p;
    case DetuningRule::casc_sideband: return optimal::casc_sideband(p);
    case DetuningRule::casc_doppler: return optimal::casc_doppler(p);
    case DetuningRule::casc_strong: return optimal::casc_strong(p);
    case DetuningRule::nabla_g_weak_sideband: return optimal::nabla_g_weak_sideband(p);
    case DetuningRule::nabla_g_weak_doppler: return optimal::nabla_g_weak_doppler(p);
    case DetuningRule::nabla_g_saturated_sideband:
      return optimal::nabla_g_saturated_sideband(p);
    case DetuningRule::nabla_g_saturated_doppler:
      return optimal::nabla_g_saturated_doppler(p);
  }
  return p;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace cavicool
