#include "esslog/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "esslog/csv.hpp"
#include "esslog/error.hpp"

namespace esslog {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::P1: return "P1";
    case ScenarioKind::P2: return "P2";
    case ScenarioKind::P3: return "P3";
    case ScenarioKind::P4: return "P4";
    case ScenarioKind::HighSolarGenOn: return "HighSolarGenOn";
    case ScenarioKind::LowSolarGenOff: return "LowSolarGenOff";
  }
  return "P1";
}

std::optional<ScenarioKind> scenario_from_string(std::string_view s) {
  if (s == "P1") return ScenarioKind::P1;
  if (s == "P2") return ScenarioKind::P2;
  if (s == "P3") return ScenarioKind::P3;
  if (s == "P4") return ScenarioKind::P4;
  if (s == "HighSolarGenOn") return ScenarioKind::HighSolarGenOn;
  if (s == "LowSolarGenOff") return ScenarioKind::LowSolarGenOff;
  return std::nullopt;
}

double ocv_cell(double soc) {
  // LFP-style curve: steep tail, long flat plateau, steep knee.
  static constexpr double kSoc[] = {0.0, 0.10, 0.95, 1.0};
  static constexpr double kOcv[] = {2.50, 3.20, 3.35, 3.65};
  if (soc <= kSoc[0]) return kOcv[0];
  for (int i = 1; i < 4; ++i) {
    if (soc <= kSoc[i]) {
      const double w = (soc - kSoc[i - 1]) / (kSoc[i] - kSoc[i - 1]);
      return kOcv[i - 1] + w * (kOcv[i] - kOcv[i - 1]);
    }
  }
  return kOcv[3];
}

double ecm_voltage(double soc, double current_a, const EcmParams& params) {
  if (!(soc >= 0.0 && soc <= 1.0))
    throw Error(Errc::SocOutOfRange, "soc " + std::to_string(soc) + " outside [0, 1]");
  const double cell = ocv_cell(soc) + current_a * params.r_cell_ohm / params.parallel_count;
  return params.series_count * cell;
}

DayScenario preset_day(ScenarioKind kind, CivilDate date, std::uint64_t seed) {
  DayScenario s;
  s.kind = kind;
  s.date = date;
  s.seed = seed;
  switch (kind) {
    case ScenarioKind::P1:
      s.night_discharge_a = 4.0;
      s.solar_peak_a = 20.0;
      s.solar_jitter = 0.0;
      s.generator_on = false;
      s.load_noise_a = 3.0;
      s.start_soc = 0.50;
      break;
    case ScenarioKind::P2:
      s.night_discharge_a = 1.6;
      s.solar_peak_a = 12.0;
      s.solar_jitter = 0.5;
      s.generator_on = false;
      s.load_noise_a = 1.5;
      s.start_soc = 0.50;
      break;
    case ScenarioKind::P3:
      s.night_discharge_a = 5.0;
      s.solar_peak_a = 12.0;
      s.solar_jitter = 0.5;
      s.generator_on = true;
      s.generator_start_hour = 17.5;
      s.generator_end_hour = 20.5;
      s.load_noise_a = 1.5;
      s.start_soc = 0.60;
      break;
    case ScenarioKind::P4:
      s.night_discharge_a = 5.0;
      s.solar_peak_a = -0.5; // low solar never overcomes the daytime load
      s.solar_jitter = 0.5;
      s.generator_on = true;
      s.generator_start_hour = 17.25;
      s.generator_end_hour = 22.25;
      s.load_noise_a = 1.5;
      s.start_soc = 0.65;
      break;
    case ScenarioKind::HighSolarGenOn:
      s.night_discharge_a = 4.0;
      s.solar_peak_a = 20.0;
      s.solar_jitter = 0.0;
      s.generator_on = true;
      s.generator_start_hour = 17.5;
      s.generator_end_hour = 19.5;
      s.load_noise_a = 3.0;
      s.start_soc = 0.40;
      break;
    case ScenarioKind::LowSolarGenOff:
      s.night_discharge_a = 0.3;
      s.solar_peak_a = 3.0;
      s.solar_jitter = 0.5;
      s.generator_on = false;
      s.load_noise_a = 0.25;
      s.start_soc = 0.50;
      break;
  }
  return s;
}

namespace {

constexpr double kGenNoiseA = 0.2;
constexpr double kTruthStepS = 0.01; // 10 ms ground-truth resolution

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

struct DropEvent {
  double start_s = 0.0; //!< seconds from local midnight
  double end_s = 0.0;
  double factor = 1.0;
};

std::vector<DropEvent> make_drop_events(const DayScenario& sc, SplitMix64& rng) {
  std::vector<DropEvent> events;
  if (sc.solar_jitter <= 0) return events;
  const double day_lo = sc.daylight_start_hour * 3600.0;
  const double day_hi = sc.daylight_end_hour * 3600.0;
  const double mean_gap = 300.0 / sc.solar_jitter; // seconds between events
  double t = day_lo;
  while (true) {
    t += -mean_gap * std::log(1.0 - rng.uniform());
    if (t >= day_hi) break;
    DropEvent e;
    e.start_s = t;
    e.end_s = std::min(day_hi, t + rng.uniform(30.0, 120.0));
    e.factor = rng.uniform(0.1, 0.7);
    events.push_back(e);
    t = e.end_s;
  }
  return events;
}

double envelope_at(const std::vector<DropEvent>& events, double tod_s) {
  for (const auto& e : events) {
    if (tod_s < e.start_s) break;
    if (tod_s < e.end_s) return e.factor;
  }
  return 1.0;
}

} // namespace

GeneratedDay generate_day(const DayScenario& sc, const EcmParams& ecm, bool compute_truth) {
  if (!(sc.cadence_s > 0)) throw Error(Errc::BadScenario, "cadence must be positive");
  if (sc.night_discharge_a < 0 || sc.generator_a < 0)
    throw Error(Errc::BadScenario, "currents must be non-negative");

  const double day_start =
      static_cast<double>(days_from_civil(sc.date)) * kSecondsPerDay - sc.tz_offset_hours * 3600.0;

  // Independent deterministic streams per concern.
  SplitMix64 noise_rng(sc.seed ^ 0xA5A5A5A5A5A5A5A5ull);
  SplitMix64 drop_rng(sc.seed ^ 0x0123456789ABCDEFull);
  SplitMix64 misc_rng(sc.seed ^ 0x5DEECE66Dull);

  const std::vector<DropEvent> drops = make_drop_events(sc, drop_rng);

  double temp_phase[kTempCount];
  for (double& p : temp_phase) p = misc_rng.uniform(0.0, 2.0 * 3.14159265358979323846);

  // Knot grid over the day, final knot pinned to the next midnight.
  const std::size_t intervals = static_cast<std::size_t>(std::ceil(kSecondsPerDay / sc.cadence_s));
  std::vector<double> knot_t(intervals + 1);
  for (std::size_t k = 0; k < intervals; ++k) knot_t[k] = static_cast<double>(k) * sc.cadence_s;
  knot_t[intervals] = kSecondsPerDay;

  const double day_lo = sc.daylight_start_hour * 3600.0;
  const double day_hi = sc.daylight_end_hour * 3600.0;
  const double gen_lo = sc.generator_start_hour * 3600.0;
  const double gen_hi = sc.generator_end_hour * 3600.0;
  const double bump_amp = sc.solar_peak_a + sc.night_discharge_a;

  // The profile is the piecewise-linear interpolation of these knot values;
  // emission, ground truth and the ingest pipeline all see the same function.
  std::vector<double> knot_i(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double tod = knot_t[k];
    const bool gen = sc.generator_on && tod >= gen_lo && tod < gen_hi;
    double base = -sc.night_discharge_a;
    if (tod >= day_lo && tod <= day_hi && bump_amp != 0.0) {
      const double u = (tod - day_lo) / (day_hi - day_lo);
      const double sine = std::sin(3.14159265358979323846 * u);
      base += bump_amp * sine * sine * envelope_at(drops, tod);
    }
    double noise_bound = sc.load_noise_a;
    if (gen) {
      base = sc.generator_a; // regulated by the genset charger
      noise_bound = kGenNoiseA;
    }
    const double noise = noise_rng.uniform(-noise_bound, noise_bound);
    knot_i[k] = round_to(base + noise, 1000.0);
  }

  // Exact state of charge at the knots (trapezoid of a piecewise-linear I).
  const double cap_as = 3600.0 * ecm.cell_capacity_ah * ecm.parallel_count; // pack Ah in A*s
  std::vector<double> knot_soc(intervals + 1);
  knot_soc[0] = sc.start_soc;
  for (std::size_t k = 1; k <= intervals; ++k) {
    const double dq = 0.5 * (knot_i[k - 1] + knot_i[k]) * (knot_t[k] - knot_t[k - 1]);
    knot_soc[k] = std::clamp(knot_soc[k - 1] + dq / cap_as, 0.02, 0.98);
  }

  GeneratedDay out;
  out.truth.date = sc.date;
  out.truth.kind = sc.kind;
  out.truth.generator_on = sc.generator_on;
  switch (sc.kind) {
    case ScenarioKind::P1: out.truth.expected_pattern = DayPattern::P1; break;
    case ScenarioKind::P2: out.truth.expected_pattern = DayPattern::P2; break;
    case ScenarioKind::P3: out.truth.expected_pattern = DayPattern::P3; break;
    case ScenarioKind::P4: out.truth.expected_pattern = DayPattern::P4; break;
    default: out.truth.expected_pattern = DayPattern::Unclassified; break;
  }

  // Ground truth at 10 ms resolution against the same piecewise-linear
  // profile; the voltage follows the continuous ECM state.
  if (compute_truth) {
    double c_chg = 0.0, c_dis = 0.0, e_chg = 0.0, e_dis = 0.0;
    for (std::size_t k = 0; k < intervals; ++k) {
      const double h = knot_t[k + 1] - knot_t[k];
      const double i0 = knot_i[k];
      const double di = (knot_i[k + 1] - i0) / h;
      const long steps = std::lround(h / kTruthStepS);
      const double dt = h / static_cast<double>(steps);
      double soc = knot_soc[k];
      double prev_i = i0;
      double prev_v = ecm_voltage(soc, prev_i, ecm);
      for (long s = 1; s <= steps; ++s) {
        const double cur_i = i0 + di * (static_cast<double>(s) * dt);
        soc = std::clamp(soc + 0.5 * (prev_i + cur_i) * dt / cap_as, 0.02, 0.98);
        const double cur_v = ecm_voltage(soc, cur_i, ecm);
        const double dq = 0.5 * (prev_i + cur_i) * dt;
        const double de = 0.5 * (prev_i * prev_v + cur_i * cur_v) * dt;
        if (prev_i + cur_i >= 0) {
          c_chg += dq;
          e_chg += de;
        } else {
          c_dis -= dq;
          e_dis -= de;
        }
        prev_i = cur_i;
        prev_v = cur_v;
      }
    }
    out.truth.c_chg_ah = c_chg / 3600.0;
    out.truth.c_dis_ah = c_dis / 3600.0;
    out.truth.e_chg_kwh = e_chg / 3.6e6;
    out.truth.e_dis_kwh = e_dis / 3.6e6;
  }

  // Emit one sample per knot except the final midnight knot (owned by the
  // next day).
  out.samples.reserve(intervals);
  const double spread = std::max(0.0, sc.temp_spread_max_c - 0.2);
  static constexpr double kOffsetFrac[kTempCount] = {0.0, 0.30, 0.60, 0.90};
  for (std::size_t k = 0; k < intervals; ++k) {
    TelemetrySample s;
    s.timestamp = day_start + knot_t[k];
    s.current = static_cast<float>(knot_i[k]);
    const double pack_v = ecm_voltage(knot_soc[k], knot_i[k], ecm);
    s.v_total = static_cast<float>(round_to(pack_v, 1000.0));
    const double cell_v = pack_v / ecm.series_count;
    for (int c = 0; c < kCellCount; ++c)
      s.v_cell[c] = static_cast<float>(round_to(cell_v, 1000.0));
    const double hours = knot_t[k] / 3600.0;
    const double base_t =
        sc.temp_base_c +
        sc.temp_daily_swing_c * std::sin(2.0 * 3.14159265358979323846 * (hours - 10.0) / 24.0);
    for (int c = 0; c < kTempCount; ++c) {
      const double wobble =
          0.03 * spread *
          std::sin(2.0 * 3.14159265358979323846 * hours / 24.0 + temp_phase[c]);
      s.temp[c] = static_cast<float>(round_to(base_t + kOffsetFrac[c] * spread + wobble, 100.0));
    }
    out.samples.push_back(s);
  }
  out.truth.sample_count = out.samples.size();
  return out;
}

std::vector<DayScenario> mixed_scenarios(int days, CivilDate start, std::uint64_t base_seed,
                                         double cadence_s) {
  static constexpr ScenarioKind kCycle[] = {
      ScenarioKind::P1, ScenarioKind::P2,             ScenarioKind::P3,
      ScenarioKind::P4, ScenarioKind::HighSolarGenOn, ScenarioKind::LowSolarGenOff};
  SplitMix64 seeder(base_seed);
  std::vector<DayScenario> out;
  out.reserve(static_cast<std::size_t>(days));
  std::int64_t day0 = days_from_civil(start);
  for (int i = 0; i < days; ++i) {
    DayScenario sc =
        preset_day(kCycle[i % 6], civil_from_days(day0 + i), seeder.next());
    sc.cadence_s = cadence_s;
    out.push_back(sc);
  }
  return out;
}

CorpusManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir) {
  if (spec.days.empty()) throw Error(Errc::BadScenario, "corpus needs at least one day");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::UnwritableOutput, out_dir.string() + ": " + ec.message());

  const DayScenario& first = spec.days.front();
  const DayScenario& last = spec.days.back();
  const double tau0 = static_cast<double>(days_from_civil(first.date)) * kSecondsPerDay -
                      first.tz_offset_hours * 3600.0;
  const double tauN = static_cast<double>(days_from_civil(last.date) + 1) * kSecondsPerDay -
                      last.tz_offset_hours * 3600.0;
  const double span = tauN - tau0;
  const double total_shift = spec.drift_s_per_day * (span / kSecondsPerDay);

  CorpusManifest manifest;
  manifest.injected.reference_time = tau0;
  manifest.injected.span_seconds = span;
  manifest.injected.total_shift = total_shift;

  auto warp = [&](double tau) { return tau + total_shift * (tau - tau0) / span; };

  std::string buffer;
  for (const DayScenario& sc : spec.days) {
    GeneratedDay day = generate_day(sc, spec.ecm, spec.compute_truth);
    const std::string file = "bms_" + format_date(sc.date) + ".csv";
    buffer.clear();
    buffer.reserve(day.samples.size() * 160 + 256);
    buffer += expected_csv_header();
    buffer += '\n';
    for (TelemetrySample s : day.samples) {
      if (total_shift != 0.0) s.timestamp = warp(s.timestamp);
      append_csv_row(buffer, s);
    }
    std::ofstream out(out_dir / file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::UnwritableOutput, (out_dir / file).string());
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    manifest.files.push_back(file);
    manifest.truths.push_back(day.truth);
  }

  nlohmann::ordered_json j;
  j["format"] = "esslog-truth-manifest";
  j["version"] = 1;
  j["drift"] = {{"rate_s_per_day", spec.drift_s_per_day},
                {"total_shift_s", total_shift},
                {"reference_time", tau0},
                {"span_seconds", span}};
  nlohmann::ordered_json days = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < manifest.truths.size(); ++i) {
    const GroundTruth& t = manifest.truths[i];
    days.push_back({{"file", manifest.files[i]},
                    {"date", format_date(t.date)},
                    {"kind", to_string(t.kind)},
                    {"expected_pattern", to_string(t.expected_pattern)},
                    {"generator_on", t.generator_on},
                    {"c_chg_ah", t.c_chg_ah},
                    {"c_dis_ah", t.c_dis_ah},
                    {"e_chg_kwh", t.e_chg_kwh},
                    {"e_dis_kwh", t.e_dis_kwh},
                    {"samples", t.sample_count}});
  }
  j["days"] = std::move(days);
  std::ofstream mf(out_dir / "truth_manifest.json", std::ios::binary | std::ios::trunc);
  if (!mf) throw Error(Errc::UnwritableOutput, (out_dir / "truth_manifest.json").string());
  mf << j.dump(2) << '\n';

  return manifest;
}

} // namespace esslog
