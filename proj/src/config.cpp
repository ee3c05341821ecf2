#include "esslog/config.hpp"

#include <charconv>
#include <fstream>

#include "esslog/error.hpp"
#include "esslog/series_io.hpp"

namespace esslog {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  const std::size_t slash = text.find('/');
  if (slash != std::string_view::npos) {
    // simple fraction, e.g. 1/16
    double num = 0, den = 0;
    auto lhs = trim(text.substr(0, slash));
    auto rhs = trim(text.substr(slash + 1));
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), num);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), den);
    if (r1.ec != std::errc{} || r1.ptr != lhs.data() + lhs.size() || r2.ec != std::errc{} ||
        r2.ptr != rhs.data() + rhs.size() || den == 0)
      return std::nullopt;
    return num / den;
  }
  double v = 0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

} // namespace

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::BadConfig, "cannot open config " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(content, path.string());
}

ConfigFile ConfigFile::parse(std::string_view text, const std::string& origin) {
  ConfigFile cfg;
  cfg.raw_.assign(text.begin(), text.end());
  std::string section;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(Errc::BadConfig,
                    origin + ":" + std::to_string(line_no) + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      cfg.sections_[section]; // materialize even if empty
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::BadConfig,
                  origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty())
      throw Error(Errc::BadConfig, origin + ":" + std::to_string(line_no) + ": empty key");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::optional<double> ConfigFile::get_number(const std::string& section,
                                             const std::string& key) const {
  const auto v = get(section, key);
  if (!v) return std::nullopt;
  const auto n = parse_number(*v);
  if (!n) throw Error(Errc::BadConfig, "[" + section + "] " + key + ": not a number: " + *v);
  return n;
}

std::optional<bool> ConfigFile::get_bool(const std::string& section,
                                         const std::string& key) const {
  const auto v = get(section, key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw Error(Errc::BadConfig, "[" + section + "] " + key + ": not a boolean: " + *v);
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

namespace {

void apply(const ConfigFile& f, const std::string& sec, const std::string& key, double& out) {
  if (auto v = f.get_number(sec, key)) out = *v;
}
void apply(const ConfigFile& f, const std::string& sec, const std::string& key, int& out) {
  if (auto v = f.get_number(sec, key)) out = static_cast<int>(*v);
}
void apply_size(const ConfigFile& f, const std::string& sec, const std::string& key, std::size_t& out) {
  if (auto v = f.get_number(sec, key)) out = static_cast<std::size_t>(*v);
}
void apply(const ConfigFile& f, const std::string& sec, const std::string& key, bool& out) {
  if (auto v = f.get_bool(sec, key)) out = *v;
}

CostScenario read_scenario(const ConfigFile& f, const std::string& sec, bool& present) {
  CostScenario s;
  present = f.has_section(sec);
  if (!present) return s;
  if (auto v = f.get(sec, "name")) s.name = *v;
  apply(f, sec, "battery_price_usd_per_kwh", s.battery_price_usd_per_kwh);
  apply(f, sec, "energy_density_kwh_per_kg", s.energy_density_kwh_per_kg);
  apply(f, sec, "moving_price_usd_per_kg", s.moving_price_usd_per_kg);
  apply(f, sec, "pack_energy_kwh", s.pack_energy_kwh);
  apply(f, sec, "service_life_years", s.service_life_years);
  apply(f, sec, "include_moving", s.include_moving);
  return s;
}

} // namespace

RunConfig make_run_config(const std::optional<std::filesystem::path>& config_path) {
  RunConfig rc;
  if (!config_path) return rc;

  const ConfigFile f = ConfigFile::load(*config_path);
  rc.config_hash = fnv1a_hex(f.raw().data(), f.raw().size());

  apply(f, "battery", "nominal_capacity_ah", rc.battery.nominal_capacity_ah);
  apply(f, "battery", "nominal_voltage_v", rc.battery.nominal_voltage_v);
  apply(f, "battery", "series_count", rc.battery.series_count);
  apply(f, "battery", "parallel_count", rc.battery.parallel_count);
  apply(f, "battery", "cell_v_min", rc.battery.cell_v_min);
  apply(f, "battery", "cell_v_max", rc.battery.cell_v_max);
  apply(f, "battery", "temp_recommended_low_c", rc.battery.recommended_temp_low_c);
  apply(f, "battery", "temp_recommended_high_c", rc.battery.recommended_temp_high_c);
  apply(f, "battery", "max_cell_temp_spread_c", rc.battery.max_cell_temp_spread_c);
  if (!rc.battery.valid()) throw Error(Errc::BadConfig, "[battery] violates its invariants");

  apply(f, "patterns", "solar_high_min_ah", rc.patterns.solar_high_min_ah);
  apply(f, "patterns", "solar_low_max_ah", rc.patterns.solar_low_max_ah);
  apply(f, "patterns", "gen_min_current_frac", rc.patterns.gen_min_current_frac);
  apply(f, "patterns", "gen_min_duration_s", rc.patterns.gen_min_duration_s);
  apply(f, "patterns", "gen_max_rel_std_pct", rc.patterns.gen_max_rel_std_pct);
  apply(f, "patterns", "daylight_start_hour", rc.patterns.daylight_start_hour);
  apply(f, "patterns", "daylight_end_hour", rc.patterns.daylight_end_hour);
  apply_size(f, "patterns", "min_samples", rc.patterns.min_samples);
  if (!rc.patterns.valid()) throw Error(Errc::BadConfig, "[patterns] violates its invariants");

  if (auto v = f.get("analysis", "gap_policy")) {
    if (*v == "exclude")
      rc.gap.exclude = true;
    else if (*v == "raw")
      rc.gap.exclude = false;
    else
      throw Error(Errc::BadConfig, "[analysis] gap_policy must be exclude or raw");
  }
  apply(f, "analysis", "gap_threshold_s", rc.gap.threshold_s);
  apply(f, "analysis", "tz_offset_hours", rc.tz_offset_hours);
  apply(f, "analysis", "c_rate_bin_width", rc.bins.c_rate_width);
  apply(f, "analysis", "temp_bin_width", rc.bins.temp_width);
  apply(f, "analysis", "delta_t_bin_width", rc.bins.delta_t_width);
  apply(f, "analysis", "daily_capacity_bin_width", rc.bins.daily_capacity_width);
  apply(f, "analysis", "daily_energy_bin_width", rc.bins.daily_energy_width);

  apply(f, "drift", "max_shift_s", rc.drift.max_shift_s);
  apply(f, "drift", "coarse_step_s", rc.drift.coarse_step_s);
  apply(f, "drift", "refine_step_s", rc.drift.refine_step_s);
  apply(f, "drift", "refine_radius_steps", rc.drift.refine_radius_steps);
  apply(f, "drift", "phase_bins", rc.drift.phase_bins);
  apply(f, "drift", "min_span_days", rc.drift.min_span_days);

  apply(f, "health", "cycle_life", rc.fade.cycle_life);
  apply(f, "health", "eol_capacity_pct", rc.fade.eol_capacity_pct);
  if (!rc.fade.valid()) throw Error(Errc::BadConfig, "[health] violates its invariants");

  rc.cost_a = read_scenario(f, "cost.a", rc.has_cost_a);
  rc.cost_b = read_scenario(f, "cost.b", rc.has_cost_b);
  apply(f, "cost", "horizon_years", rc.cost_horizon_years);

  return rc;
}

} // namespace esslog
