#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "esslog/model.hpp"

namespace esslog {

/// How sampling holes are treated by integrals and time weights. Under
/// exclusion (default), intervals longer than the threshold contribute
/// nothing; integrating across a multi-hour outage would invent energy.
struct GapPolicy {
  bool exclude = true;
  double threshold_s = 600.0;

  double limit_s() const {
    return exclude ? threshold_s : std::numeric_limits<double>::infinity();
  }
};

struct Interval {
  double start = 0.0;
  double end = 0.0;
};

/// Charge/discharge accumulation over an interval; unit is Ah or kWh
/// depending on the producing operation.
struct AccumulationResult {
  double charge = 0.0;
  double discharge = 0.0;
  Interval interval;
};

struct AnnualRow {
  std::string label;
  double c_chg_ah = 0.0;
  double c_dis_ah = 0.0;
  double cr_loss_pct = 0.0;
  double cycles = 0.0;
  double e_chg_kwh = 0.0;
  double e_dis_kwh = 0.0;
  double er_loss_pct = 0.0;
};

struct PowerChannelStats {
  double max_w = 0.0;
  double min_w = 0.0;
  double mean_w = 0.0;
  double std_w = 0.0;
  double fluctuation_pct = 0.0; //!< 100 * std / mean
};

enum class CurrentDirection : std::uint8_t { Charge, Discharge, Idle };

struct CRateValue {
  double per_hour = 0.0;
  CurrentDirection direction = CurrentDirection::Idle;
};

/// C_R = |I| / Cap_N, tagged by the sign of I.
CRateValue c_rate(double current_a, const BatterySystemSpec& spec);

/// Composite trapezoid with non-uniform spacing; exact for piecewise-linear
/// integrands. One point integrates to 0 by convention. Throws
/// Error(NonMonotonicTime) unless t is strictly increasing.
double trapezoid_integral(std::span<const double> t, std::span<const double> f);

/// Ampere-hours of charge and discharge over the interval. The integrand is
/// split at linear zero crossings of the current so a sign change inside a
/// sampling interval lands on the correct side exactly. Interval endpoints
/// falling between samples are linearly interpolated.
AccumulationResult accumulate_capacity(const TimeSeries& series, Interval interval,
                                       const GapPolicy& gap = {});

/// Kilowatt-hours, integrand I(t) * V_tot(t), split at current zero crossings.
AccumulationResult accumulate_energy(const TimeSeries& series, Interval interval,
                                     const GapPolicy& gap = {});

/// 100 * (chg - dis) / chg. Throws Error(ZeroCharge) when chg <= 0.
double loss_rate(double chg, double dis);

/// Equivalent full cycles: discharge amp-hours over nominal capacity.
double cycle_count(double dis_ah, const BatterySystemSpec& spec);

/// Temperature spread of a sample: max - min over the pack sensors.
double temp_spread(const TelemetrySample& sample);

/// Time-weighted histogram: each sample's value weighted by its holding
/// duration (time to the next sample; the last sample has unknown holding
/// time and weight 0). Values outside the edges go to underflow/overflow.
/// A null mask includes every sample; masked-out samples contribute neither
/// value nor time. Throws Error(NoFiniteWeights) when no weight remains.
ProbabilityHistogram time_weighted_histogram(std::span<const double> t,
                                             std::span<const float> value,
                                             std::span<const double> bin_edges,
                                             const GapPolicy& gap = {},
                                             const std::uint8_t* mask = nullptr);

/// Count-weighted histogram over plain values (used for per-day quantities).
ProbabilityHistogram count_histogram(std::span<const double> values,
                                     std::span<const double> bin_edges);

/// Ascending edges covering [lo, hi] with the given width, aligned to
/// multiples of the width.
std::vector<double> make_bin_edges(double lo, double hi, double width);

struct DailyOptions {
  double tz_offset_hours = 8.0; //!< site zone; local civil midnight day boundary
  GapPolicy gap;
};

/// Contiguous index range [begin, end) of one local calendar day.
struct DayRange {
  std::int64_t day = 0; //!< local day index (days since epoch)
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::vector<DayRange> day_ranges(const TimeSeries& series, double tz_offset_hours);

/// One summary per local calendar day that has samples; pattern fields are
/// left Unclassified here and filled by the classification layer.
std::vector<DailySummary> daily_summaries(const TimeSeries& series, const BatterySystemSpec& spec,
                                          const DailyOptions& options = {});

/// Calendar-interval rows plus an "All time" row whose capacities equal the
/// column-wise sums of the interval rows.
std::vector<AnnualRow> annual_report(std::span<const DailySummary> summaries,
                                     const BatterySystemSpec& spec);

/// Time-weighted statistics of a power channel (hold semantics). Throws
/// Error(ZeroMean) when the mean vanishes (fluctuation undefined) and
/// Error(EmptyInterval) with fewer than 2 points.
PowerChannelStats power_channel_stats(std::span<const double> t, std::span<const double> watts,
                                      const GapPolicy& gap = {});

} // namespace esslog
