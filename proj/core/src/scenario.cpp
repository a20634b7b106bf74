#include "cellfree/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cellfree/errors.hpp"
#include "cellfree/rng.hpp"

namespace cellfree {

namespace {
constexpr std::uint64_t kGeometryStream = 0x67656f6dULL;  // "geom"
}

void ScenarioConfig::validate() const {
  if (M < 1) throw ConfigError("M must be >= 1");
  if (K < 1) throw ConfigError("K must be >= 1");
  if (radius_m <= 0.0) throw ConfigError("radius_m must be > 0");
  if (kappa < 2.0) throw ConfigError("kappa must be >= 2");
  if (delta < 0.0 || delta > 1.0) throw ConfigError("delta must be in [0, 1]");
  if (sigma_sh_db < 0.0) throw ConfigError("sigma_sh_db must be >= 0");
  if (nakagami_m < 0.5) throw ConfigError("nakagami_m must be >= 0.5");
  if (nakagami_omega <= 0.0) throw ConfigError("nakagami_omega must be > 0");
  if (bandwidth_hz <= 0.0) throw ConfigError("bandwidth_hz must be > 0");
  if (pilot_power_mw <= 0.0) throw ConfigError("pilot_power_mw must be > 0");
  if (data_power_mw <= 0.0) throw ConfigError("data_power_mw must be > 0");
  if (min_distance_m <= 0.0) throw ConfigError("min_distance_m must be > 0");
}

double ScenarioConfig::noise_mw() const {
  return std::pow(10.0, noise_psd_dbm_hz / 10.0) * bandwidth_hz;
}

double ScenarioConfig::pilot_power_normalized() const { return pilot_power_mw / noise_mw(); }

double ScenarioConfig::data_power_normalized() const { return data_power_mw / noise_mw(); }

double ScenarioConfig::sic_sensitivity_linear() const {
  return std::pow(10.0, sic_sensitivity_dbm / 10.0);
}

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Rng rng = Rng::stream(config.seed, kGeometryStream);

  auto draw_point = [&rng, &config]() {
    const double r = config.radius_m * std::sqrt(rng.uniform());
    const double theta = rng.phase();
    return Point2{r * std::cos(theta), r * std::sin(theta)};
  };

  Scenario s;
  s.config = config;
  s.eap_positions.reserve(config.M);
  s.ue_positions.reserve(config.K);
  for (int m = 0; m < config.M; ++m) s.eap_positions.push_back(draw_point());
  for (int k = 0; k < config.K; ++k) s.ue_positions.push_back(draw_point());

  s.distances = Mat(config.M, config.K);
  for (int m = 0; m < config.M; ++m) {
    for (int k = 0; k < config.K; ++k) {
      const double dx = s.eap_positions[m].x - s.ue_positions[k].x;
      const double dy = s.eap_positions[m].y - s.ue_positions[k].y;
      s.distances(m, k) = std::max(std::hypot(dx, dy), config.min_distance_m);
    }
  }
  return s;
}

ScenarioConfig scenario_preset(const std::string& name) {
  ScenarioConfig c;
  if (name == "small") {
    c.M = 15;
    c.K = 5;
  } else if (name == "medium") {
    c.M = 50;
    c.K = 15;
  } else if (name == "large") {
    c.M = 70;
    c.K = 20;
  } else {
    throw ConfigError("unknown scenario preset: " + name);
  }
  return c;
}

namespace {

const std::map<std::string, double ScenarioConfig::*>& double_fields() {
  static const std::map<std::string, double ScenarioConfig::*> f = {
      {"radius_m", &ScenarioConfig::radius_m},
      {"kappa", &ScenarioConfig::kappa},
      {"sigma_sh_db", &ScenarioConfig::sigma_sh_db},
      {"delta", &ScenarioConfig::delta},
      {"nakagami_m", &ScenarioConfig::nakagami_m},
      {"nakagami_omega", &ScenarioConfig::nakagami_omega},
      {"noise_psd_dbm_hz", &ScenarioConfig::noise_psd_dbm_hz},
      {"bandwidth_hz", &ScenarioConfig::bandwidth_hz},
      {"pilot_power_mw", &ScenarioConfig::pilot_power_mw},
      {"data_power_mw", &ScenarioConfig::data_power_mw},
      {"sic_sensitivity_dbm", &ScenarioConfig::sic_sensitivity_dbm},
      {"min_distance_m", &ScenarioConfig::min_distance_m},
  };
  return f;
}

}  // namespace

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario config: " + path);
  ScenarioConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, value;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
      }
      continue;
    }
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    key = trim(line.substr(0, eq));
    value = trim(line.substr(eq + 1));
    try {
      if (key == "M") {
        c.M = std::stoi(value);
      } else if (key == "K") {
        c.K = std::stoi(value);
      } else if (key == "seed") {
        c.seed = std::stoull(value);
      } else if (auto it = double_fields().find(key); it != double_fields().end()) {
        c.*(it->second) = std::stod(value);
      } else {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  c.validate();
  return c;
}

void save_scenario_config(const ScenarioConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario config: " + path);
  out.precision(17);
  out << "M=" << c.M << "\n"
      << "K=" << c.K << "\n"
      << "seed=" << c.seed << "\n";
  for (const auto& [key, member] : double_fields()) {
    out << key << "=" << c.*member << "\n";
  }
}

}  // namespace cellfree
