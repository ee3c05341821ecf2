#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "esslog/drift.hpp"
#include "esslog/health.hpp"
#include "esslog/metrics.hpp"
#include "esslog/model.hpp"
#include "esslog/patterns.hpp"

namespace esslog {

/// Histogram bin widths for the report distributions.
struct BinningOptions {
  double c_rate_width = 0.005; //!< h^-1
  double temp_width = 1.0;     //!< degC
  double delta_t_width = 1.0;  //!< degC
  double daily_capacity_width = 5.0; //!< Ah
  double daily_energy_width = 0.25;  //!< kWh
};

/// Everything a run needs, assembled from defaults, an optional key-value
/// config file, then command-line overrides (flags win).
struct RunConfig {
  BatterySystemSpec battery;
  PatternRule patterns;
  GapPolicy gap;
  double tz_offset_hours = 8.0;
  BinningOptions bins;
  DriftSearch drift;
  FadeReference fade;
  CostScenario cost_a;
  CostScenario cost_b;
  bool has_cost_a = false;
  bool has_cost_b = false;
  int cost_horizon_years = 10;
  std::string config_hash = "0000000000000000"; //!< FNV-1a of the file bytes
};

/// Sectioned key-value file:
///   [section]
///   key = value      # comments with '#' or ';'
/// Numeric values may be plain decimals or simple fractions like 1/16.
class ConfigFile {
public:
  static ConfigFile load(const std::filesystem::path& path); // throws Error(BadConfig)
  static ConfigFile parse(std::string_view text, const std::string& origin = "<memory>");

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::optional<double> get_number(const std::string& section, const std::string& key) const;
  std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  const std::string& raw() const { return raw_; }

private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string raw_;
};

/// Defaults overlaid with the file when given. Throws Error(BadConfig) on
/// unparsable values or invariant violations.
RunConfig make_run_config(const std::optional<std::filesystem::path>& config_path);

} // namespace esslog
