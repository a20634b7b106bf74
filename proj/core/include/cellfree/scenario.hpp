#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cellfree/mat.hpp"

namespace cellfree {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Physical-layer configuration. Powers and the noise PSD are given in dB
/// units here; everything downstream works in linear scale, normalized to
/// the integrated noise power.
struct ScenarioConfig {
  int M = 15;                        // eAP count
  int K = 5;                         // UE count
  double radius_m = 18.0;            // coverage disc radius
  double kappa = 2.0;                // path-loss exponent, >= 2
  double sigma_sh_db = 8.0;          // shadow-fading std in dB
  double delta = 0.5;                // shadow correlation in [0, 1]
  double nakagami_m = 1.0;           // shape, >= 0.5
  double nakagami_omega = 1.0;       // spread, > 0
  double noise_psd_dbm_hz = -169.0;  // AWGN PSD
  double bandwidth_hz = 20e6;        // noise integration bandwidth
  double pilot_power_mw = 100.0;     // per-UE pilot power rho_k
  double data_power_mw = 100.0;      // per-UE data power p_k
  double sic_sensitivity_dbm = 1.0;  // receiver sensitivity P_s
  std::uint64_t seed = 1;

  // Nodes are never placed closer than this; the path-loss law diverges
  // as the link length goes to zero.
  double min_distance_m = 1.0;

  void validate() const;  // throws ConfigError

  double noise_mw() const;             // integrated noise power, mW
  double pilot_power_normalized() const;  // rho_k / noise
  double data_power_normalized() const;   // p_k / noise
  double sic_sensitivity_linear() const;  // 10^(P_s_dBm / 10)

  double gamma_shape() const { return nakagami_m; }
  double gamma_rate() const { return nakagami_m / nakagami_omega; }
};

/// Fixed node geometry for one run.
struct Scenario {
  ScenarioConfig config;
  std::vector<Point2> eap_positions;  // size M
  std::vector<Point2> ue_positions;   // size K
  Mat distances;                      // M x K, floored at min_distance_m
};

/// Places eAPs and UEs i.i.d. uniform over the disc. Deterministic in
/// config.seed.
Scenario generate_scenario(const ScenarioConfig& config);

/// Named presets: small (M=15, K=5), medium (M=50, K=15), large (M=70, K=20).
ScenarioConfig scenario_preset(const std::string& name);

/// key=value config file, one pair per line, '#' comments. Keys match the
/// ScenarioConfig field names (see README for the schema).
ScenarioConfig load_scenario_config(const std::string& path);
void save_scenario_config(const ScenarioConfig& config, const std::string& path);

}  // namespace cellfree
