#pragma once

#include <span>
#include <vector>

#include "esslog/metrics.hpp"
#include "esslog/model.hpp"

namespace esslog {

/// Day-classification thresholds. Solar cutoffs scale with nominal capacity
/// relative to the 250 Ah reference pack; the generator signature is a
/// sustained near-constant charge block.
struct PatternRule {
  double solar_high_min_ah = 60.0;
  double solar_low_max_ah = 20.0;
  double gen_min_current_frac = 0.04; //!< fraction of Cap_N per hour (10 A at 250 Ah)
  double gen_min_duration_s = 1800.0;
  double gen_max_rel_std_pct = 5.0;
  double daylight_start_hour = 9.0;
  double daylight_end_hour = 17.0;
  std::size_t min_samples = 100; //!< thinner days are Unclassified, not guessed

  bool valid() const {
    return solar_low_max_ah < solar_high_min_ah && gen_min_duration_s > 0 &&
           daylight_start_hour < daylight_end_hour;
  }
  /// Solar thresholds for a pack, scaled by nominal capacity.
  double scaled_high_min(const BatterySystemSpec& spec) const {
    return solar_high_min_ah * spec.nominal_capacity_ah / 250.0;
  }
  double scaled_low_max(const BatterySystemSpec& spec) const {
    return solar_low_max_ah * spec.nominal_capacity_ah / 250.0;
  }
};

struct GeneratorSegment {
  double start = 0.0;
  double end = 0.0;
  double mean_current_a = 0.0;
  double relative_std_pct = 0.0;
};

struct GeneratorDetection {
  bool on = false;
  std::vector<GeneratorSegment> segments;
};

struct SolarAssessment {
  SolarLevel level = SolarLevel::Low;
  double solar_ah = 0.0;
};

/// Contiguous sample view of one day.
struct DaySlice {
  std::span<const double> t;
  std::span<const float> current;
};

/// ON iff some all-charging window of at least gen_min_duration has mean
/// current >= gen_min_current_frac * Cap_N and relative std within bound.
/// Overlapping qualifying windows merge into segments.
GeneratorDetection detect_generator(const DaySlice& day, const PatternRule& rule,
                                    const BatterySystemSpec& spec, const GapPolicy& gap = {});

/// Daytime charge amp-hours with generator segments excised, graded against
/// the (scaled) solar thresholds. High has a closed lower bound.
SolarAssessment solar_level(const DaySlice& day, const GeneratorDetection& generator,
                            const PatternRule& rule, const BatterySystemSpec& spec,
                            double tz_offset_hours, const GapPolicy& gap = {});

/// The pattern grid itself: (High, OFF) -> P1, (Medium, OFF) -> P2,
/// (Medium, ON) -> P3, (Low, ON) -> P4, remaining cells Unclassified.
DayPattern classify_cell(SolarLevel solar, bool generator_on);

struct DayClassification {
  DayPattern pattern = DayPattern::Unclassified;
  SolarAssessment solar;
  GeneratorDetection generator;
};

DayClassification classify_day(const DaySlice& day, const PatternRule& rule,
                               const BatterySystemSpec& spec, double tz_offset_hours,
                               const GapPolicy& gap = {});

} // namespace esslog
