#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "esslog/civil_time.hpp"

namespace esslog {

inline constexpr int kCellCount = 16;
inline constexpr int kTempCount = 4;
inline constexpr int kValueFieldCount = 1 + kCellCount + 1 + kTempCount; // V_tot, V01..V16, I, T1..T4

// Plausibility gates. Sanity bounds only; much wider than the operating
// window so that faulty-cell readings are ingested rather than rejected.
inline constexpr double kMaxPlausibleTotalVolts = 80.0;
inline constexpr double kMaxPlausibleCellVolts = 5.0;

/// One BMS record. Charge current is positive, discharge negative.
struct TelemetrySample {
  double timestamp = 0.0; //!< seconds since epoch, sub-second allowed
  float v_total = 0.0f;   //!< pack voltage [V]
  std::array<float, kCellCount> v_cell{};
  float current = 0.0f;   //!< signed pack current [A]
  std::array<float, kTempCount> temp{}; //!< pack temperatures [degC], unordered sensors
};

/// Pack nameplate data and operating windows.
struct BatterySystemSpec {
  double nominal_capacity_ah = 250.0;
  double nominal_voltage_v = 48.0;
  int series_count = 16;
  int parallel_count = 5;
  double cell_v_min = 2.5;
  double cell_v_max = 3.65;
  double recommended_temp_low_c = 15.0;
  double recommended_temp_high_c = 35.0;
  double max_cell_temp_spread_c = 5.0;

  bool valid() const {
    return nominal_capacity_ah > 0 && series_count >= 1 && parallel_count >= 1 &&
           cell_v_min < cell_v_max;
  }
};

/// Field names in CSV column order (after the timestamp).
const std::array<std::string, kValueFieldCount>& value_field_names();

enum class FieldState : std::uint8_t { Ok, Missing, Malformed };

/// A candidate record before validation. Produced by the CSV tokenizer.
struct RawRecord {
  std::optional<double> timestamp;
  FieldState timestamp_state = FieldState::Missing;
  std::array<double, kValueFieldCount> values{};
  std::array<FieldState, kValueFieldCount> states{};

  RawRecord() { states.fill(FieldState::Missing); }
};

/// Typed reason a record was not ingested. Carries enough context to audit
/// every dropped row.
struct Rejection {
  std::size_t line = 0; //!< 1-based line number in the source file, 0 if n/a
  std::string field;
  std::string reason; //!< "MalformedField" | "OutOfPlausibleRange" | "MissingField"
  std::string detail;
};

/// Total function: every input yields a sample or a typed rejection.
std::variant<TelemetrySample, Rejection> validate_sample(const RawRecord& raw);

struct SourceFileEntry {
  std::string name;
  std::size_t rows_parsed = 0;
  std::size_t rows_rejected = 0;
};

/// Column-oriented sample store. Timestamps strictly increasing once merged.
/// Value objects are immutable by convention after construction; analysis
/// code reads the columns concurrently without synchronization.
class TimeSeries {
public:
  std::vector<double> t;
  std::vector<float> v_total;
  std::vector<float> current;
  std::vector<float> v_cell; //!< interleaved, kCellCount per row
  std::vector<float> temp;   //!< interleaved, kTempCount per row
  std::vector<SourceFileEntry> provenance;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }

  void reserve(std::size_t n);
  void append(const TelemetrySample& s);
  TelemetrySample sample(std::size_t i) const;

  /// True when timestamps are strictly increasing.
  bool monotonic() const;
};

enum class DayPattern : std::uint8_t { P1, P2, P3, P4, Unclassified };
enum class SolarLevel : std::uint8_t { High, Medium, Low };

const char* to_string(DayPattern p);
const char* to_string(SolarLevel s);
std::optional<DayPattern> pattern_from_string(std::string_view s);

/// Per-calendar-day accounting. delta_c/delta_e are exact identities of the
/// charge/discharge fields.
struct DailySummary {
  CivilDate date;
  double c_chg_ah = 0.0;
  double c_dis_ah = 0.0;
  double e_chg_kwh = 0.0;
  double e_dis_kwh = 0.0;
  double dt_max_c = 0.0;
  std::size_t sample_count = 0;
  DayPattern pattern = DayPattern::Unclassified;
  bool generator_on = false;
  SolarLevel solar_level = SolarLevel::Low;
  double solar_ah = 0.0;

  double delta_c_ah() const { return c_chg_ah - c_dis_ah; }
  double delta_e_kwh() const { return e_chg_kwh - e_dis_kwh; }
};

enum class WeightKind : std::uint8_t { TimeWeighted, CountWeighted };

/// Binned distribution normalized to unit mass. Values outside the edge
/// range accumulate into the underflow/overflow fields, which participate
/// in the unit-sum invariant.
struct ProbabilityHistogram {
  std::vector<double> bin_edges;     //!< ascending, size = bins + 1
  std::vector<double> probabilities; //!< size = bins
  double underflow = 0.0;
  double overflow = 0.0;
  WeightKind weight_kind = WeightKind::TimeWeighted;

  double total_mass() const;
  /// Probability mass at or above the given value (includes overflow).
  double mass_at_or_above(double value) const;
};

/// Inputs of the replacement-cost model.
struct CostScenario {
  std::string name;
  double battery_price_usd_per_kwh = 0.0;
  double energy_density_kwh_per_kg = 0.0;
  double moving_price_usd_per_kg = 0.0;
  double pack_energy_kwh = 0.0;
  int service_life_years = 1;
  bool include_moving = true;

  bool valid() const {
    return battery_price_usd_per_kwh > 0 && energy_density_kwh_per_kg > 0 &&
           moving_price_usd_per_kg > 0 && pack_energy_kwh > 0 && service_life_years >= 1;
  }
};

} // namespace esslog
