#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "esslog/drift.hpp"
#include "esslog/model.hpp"

namespace esslog {

/// splitmix64; pinned by name so corpora are reproducible across builds and
/// platforms (no library distribution objects involved).
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  /// [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

enum class ScenarioKind : std::uint8_t { P1, P2, P3, P4, HighSolarGenOn, LowSolarGenOff };

const char* to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_from_string(std::string_view s);

/// Day-profile parameters. The current profile is piecewise linear between
/// cadence knots: a constant night load, a sin^2 solar bump whose net noon
/// peak is solar_peak_a, an optional regulated generator block, multiplicative
/// drop events on the solar part (solar_jitter), and uniform knot noise.
struct DayScenario {
  ScenarioKind kind = ScenarioKind::P1;
  CivilDate date{2016, 10, 14};
  double tz_offset_hours = 8.0;
  double cadence_s = 15.0;
  std::uint64_t seed = 1;

  double night_discharge_a = 5.0; //!< house load, discharges the pack at night
  double solar_peak_a = 20.0;     //!< net current at clear-sky solar noon
  double solar_jitter = 0.0;      //!< 0 = smooth; 1 = heavy intermittent drops
  double generator_a = 18.0;      //!< regulated net charge current while running
  double generator_start_hour = 17.5;
  double generator_end_hour = 20.5;
  bool generator_on = false;
  double load_noise_a = 2.0; //!< uniform +-bound applied at each knot
  double daylight_start_hour = 9.0;
  double daylight_end_hour = 17.0;

  double start_soc = 0.55;
  double temp_base_c = 15.0;
  double temp_daily_swing_c = 3.0;
  double temp_spread_max_c = 4.0;
};

/// Tuned per-pattern defaults. Profiles are balanced so each day's charge
/// throughput covers its discharge; the daily energy difference then isolates
/// the ohmic loss of the cell model.
DayScenario preset_day(ScenarioKind kind, CivilDate date, std::uint64_t seed);

/// Resistance-only equivalent-circuit cell model with an LFP-style open
/// circuit voltage: flat 3.2-3.35 V plateau, steep tails below 10% and above
/// 95% state of charge.
struct EcmParams {
  double r_cell_ohm = 0.1; //!< tuned so the daily energy loss lands in 10-15%
  int series_count = 16;
  int parallel_count = 5;
  double cell_capacity_ah = 50.0;
};

/// Pack voltage = series * (ocv_cell(soc) + current * R_cell / parallel).
/// Throws Error(SocOutOfRange) outside [0, 1].
double ecm_voltage(double soc, double current_a, const EcmParams& params = {});
double ocv_cell(double soc);

/// What the generator knows to be true about one emitted day; computed from
/// the continuous profile at 10 ms resolution.
struct GroundTruth {
  CivilDate date;
  ScenarioKind kind = ScenarioKind::P1;
  DayPattern expected_pattern = DayPattern::P1;
  bool generator_on = false;
  double c_chg_ah = 0.0;
  double c_dis_ah = 0.0;
  double e_chg_kwh = 0.0;
  double e_dis_kwh = 0.0;
  std::size_t sample_count = 0;
};

struct GeneratedDay {
  std::vector<TelemetrySample> samples; //!< true (undrifted) timestamps
  GroundTruth truth;
};

/// Deterministic for a given scenario; same seed, same bytes.
GeneratedDay generate_day(const DayScenario& scenario, const EcmParams& ecm = {},
                          bool compute_truth = true);

struct CorpusSpec {
  std::vector<DayScenario> days;
  double drift_s_per_day = 0.0; //!< injected clock drift, warps emitted timestamps
  EcmParams ecm;
  //! Skips the 10 ms truth integration (fields left zero) for bulk corpora
  //! that only exercise throughput, not value checks.
  bool compute_truth = true;
};

struct CorpusManifest {
  DriftModel injected; //!< the affine warp applied to emitted timestamps
  std::vector<GroundTruth> truths;
  std::vector<std::string> files;
};

/// Cycles the six pattern cells over consecutive dates.
std::vector<DayScenario> mixed_scenarios(int days, CivilDate start, std::uint64_t base_seed,
                                         double cadence_s = 15.0);

/// Writes one CSV file per day in the ingest schema (timestamps warped by the
/// injected drift) plus truth_manifest.json; returns the manifest.
CorpusManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir);

} // namespace esslog
