#pragma once

#include <cstddef>

#include "esslog/model.hpp"

namespace esslog {

/// Affine clock repair. The correction pins the first raw timestamp and
/// removes a shift that accumulated linearly over the span:
///   corrected(t) = t - total_shift * (t - reference_time) / span_seconds
/// so corrected(t_start) = t_start exactly and the last sample moves earlier
/// by exactly total_shift.
struct DriftModel {
  double reference_time = 0.0; //!< t_start of the raw series
  double span_seconds = 0.0;   //!< t_end - t_start
  double total_shift = 0.0;    //!< seconds accumulated over the span

  double rate_s_per_day() const {
    return span_seconds > 0 ? total_shift / (span_seconds / kSecondsPerDay) : 0.0;
  }
  double corrected(double t) const {
    return span_seconds > 0 ? t - total_shift * (t - reference_time) / span_seconds : t;
  }
};

struct DriftSearch {
  double max_shift_s = 21600.0;  //!< grid covers [-max_shift, +max_shift]
  double coarse_step_s = 60.0;
  double refine_step_s = 5.0;
  int refine_radius_steps = 2;   //!< refine within +-radius coarse steps
  double period_s = kSecondsPerDay;
  int phase_bins = 96;           //!< 15-minute bins
  double min_span_days = 14.0;
  //! The coarse grid runs on a stride-decimated view capped at this many
  //! samples; refinement always scores the full series.
  std::size_t max_coarse_samples = 1000000;
};

/// Fraction of total-voltage variance explained by the daily phase:
/// 1 - (pooled within-phase variance / total variance), clamped to [0, 1].
/// A constant signal has no variance to explain and scores 0 by convention.
double periodicity_score(const TimeSeries& series, double period_s, int phase_bins = 96);

/// Grid search for the total shift that maximizes the periodicity score of
/// the corrected series; ties break toward smaller |total_shift|.
/// Throws Error(SpanTooShort) when the series covers < min_span_days.
DriftModel estimate_drift(const TimeSeries& series, const DriftSearch& search = {});

/// Re-times every sample through the model; values untouched, order
/// preserved. Throws Error(NonMonotonicResult) if the correction would
/// invert time order (|rate| >= one day per day).
TimeSeries apply_drift_correction(const TimeSeries& series, const DriftModel& model);

} // namespace esslog
