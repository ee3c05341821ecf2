#include "esslog/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "esslog/error.hpp"
#include "esslog/kernels.hpp"

namespace esslog {

CRateValue c_rate(double current_a, const BatterySystemSpec& spec) {
  if (!(spec.nominal_capacity_ah > 0))
    throw Error(Errc::BadScenario, "nominal capacity must be positive");
  CRateValue v;
  v.per_hour = std::fabs(current_a) / spec.nominal_capacity_ah;
  v.direction = current_a > 0   ? CurrentDirection::Charge
                : current_a < 0 ? CurrentDirection::Discharge
                                : CurrentDirection::Idle;
  return v;
}

double trapezoid_integral(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw Error(Errc::NonMonotonicTime, "t and f length mismatch");
  if (t.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    if (!(dt > 0)) throw Error(Errc::NonMonotonicTime, "timestamps must strictly increase");
    acc += 0.5 * (f[i - 1] + f[i]) * dt;
  }
  return acc;
}

namespace {

// Contribution of one interval with endpoint currents (a, b) and integrand
// endpoints (f0, f1): trapezoid split at the current zero crossing. Mirrors
// the kernels' per-interval math; used for the partial boundary intervals.
void split_interval(double h, double a, double b, double f0, double f1, double& charge,
                    double& discharge) {
  if (!(h > 0)) return;
  double w0 = 1.0, w1 = 1.0;
  if (a * b < 0.0) {
    const double theta = a / (a - b);
    w0 = theta;
    w1 = 1.0 - theta;
  }
  const double half_h = 0.5 * h;
  charge += half_h * (w0 * std::max(f0, 0.0) + w1 * std::max(f1, 0.0));
  discharge += half_h * (w0 * std::max(-f0, 0.0) + w1 * std::max(-f1, 0.0));
}

struct EndpointValues {
  double current = 0.0;
  double integrand = 0.0;
};

EndpointValues interpolate(const TimeSeries& s, std::size_t left, double at, bool power) {
  const double t0 = s.t[left], t1 = s.t[left + 1];
  const double w = (at - t0) / (t1 - t0);
  EndpointValues v;
  v.current = s.current[left] + w * (s.current[left + 1] - s.current[left]);
  if (power) {
    const double p0 = static_cast<double>(s.current[left]) * s.v_total[left];
    const double p1 = static_cast<double>(s.current[left + 1]) * s.v_total[left + 1];
    v.integrand = p0 + w * (p1 - p0);
  } else {
    v.integrand = v.current;
  }
  return v;
}

kernels::SplitAccum accumulate_split(const TimeSeries& series, Interval interval,
                                     const GapPolicy& gap, bool power) {
  if (!(interval.end > interval.start))
    throw Error(Errc::EmptyInterval, "interval end must exceed start");
  if (series.empty()) throw Error(Errc::EmptyInterval, "series is empty");

  const double lo = std::max(interval.start, series.t.front());
  const double hi = std::min(interval.end, series.t.back());
  kernels::SplitAccum acc;
  if (!(hi > lo)) return acc; // no overlap with the sampled span

  const double limit = gap.limit_s();
  const auto kind = power ? kernels::Integrand::Power : kernels::Integrand::Current;

  // Sample index range fully inside [lo, hi].
  const auto first_it = std::lower_bound(series.t.begin(), series.t.end(), lo);
  const auto last_it = std::upper_bound(series.t.begin(), series.t.end(), hi);
  const std::size_t first = static_cast<std::size_t>(first_it - series.t.begin());
  const std::size_t last = static_cast<std::size_t>(last_it - series.t.begin()); // one past

  if (first >= last) {
    // Entire interval falls between two adjacent samples.
    const std::size_t left = first - 1;
    if (series.t[left + 1] - series.t[left] <= limit) {
      const auto e0 = interpolate(series, left, lo, power);
      const auto e1 = interpolate(series, left, hi, power);
      split_interval(hi - lo, e0.current, e1.current, e0.integrand, e1.integrand, acc.charge,
                     acc.discharge);
    }
    return acc;
  }

  // Bulk: intervals between samples [first, last).
  const kernels::SplitAccum bulk =
      kernels::split_trapezoid(series.t.data() + first, series.current.data() + first,
                               series.v_total.data() + first, last - first, kind, limit);
  acc.charge += bulk.charge;
  acc.discharge += bulk.discharge;

  // Left partial interval [lo, t[first]).
  if (first > 0 && lo < series.t[first]) {
    const std::size_t left = first - 1;
    if (series.t[left + 1] - series.t[left] <= limit) {
      const auto e0 = interpolate(series, left, lo, power);
      const double b = series.current[first];
      const double f1 = power ? static_cast<double>(series.current[first]) * series.v_total[first]
                              : static_cast<double>(series.current[first]);
      split_interval(series.t[first] - lo, e0.current, b, e0.integrand, f1, acc.charge,
                     acc.discharge);
    }
  }

  // Right partial interval (t[last-1], hi].
  if (last < series.size() && hi > series.t[last - 1]) {
    const std::size_t left = last - 1;
    if (series.t[left + 1] - series.t[left] <= limit) {
      const auto e1 = interpolate(series, left, hi, power);
      const double a = series.current[left];
      const double f0 = power ? static_cast<double>(series.current[left]) * series.v_total[left]
                              : static_cast<double>(series.current[left]);
      split_interval(hi - series.t[left], a, e1.current, f0, e1.integrand, acc.charge,
                     acc.discharge);
    }
  }

  return acc;
}

} // namespace

AccumulationResult accumulate_capacity(const TimeSeries& series, Interval interval,
                                       const GapPolicy& gap) {
  const auto acc = accumulate_split(series, interval, gap, false);
  return {acc.charge / 3600.0, acc.discharge / 3600.0, interval};
}

AccumulationResult accumulate_energy(const TimeSeries& series, Interval interval,
                                     const GapPolicy& gap) {
  const auto acc = accumulate_split(series, interval, gap, true);
  return {acc.charge / 3.6e6, acc.discharge / 3.6e6, interval};
}

double loss_rate(double chg, double dis) {
  if (!(chg > 0)) throw Error(Errc::ZeroCharge, "loss rate undefined for zero charge");
  return 100.0 * (chg - dis) / chg;
}

double cycle_count(double dis_ah, const BatterySystemSpec& spec) {
  if (!(spec.nominal_capacity_ah > 0))
    throw Error(Errc::BadScenario, "nominal capacity must be positive");
  return dis_ah / spec.nominal_capacity_ah;
}

double temp_spread(const TelemetrySample& sample) {
  float lo = sample.temp[0], hi = sample.temp[0];
  for (float v : sample.temp) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return static_cast<double>(hi) - static_cast<double>(lo);
}

namespace {

ProbabilityHistogram normalize(std::vector<double> mass, double under, double over,
                               std::span<const double> edges, WeightKind kind) {
  double total = under + over;
  for (double m : mass) total += m;
  if (!(total > 0)) throw Error(Errc::NoFiniteWeights, "no weight to normalize");
  ProbabilityHistogram h;
  h.bin_edges.assign(edges.begin(), edges.end());
  h.probabilities.resize(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) h.probabilities[i] = mass[i] / total;
  h.underflow = under / total;
  h.overflow = over / total;
  h.weight_kind = kind;
  return h;
}

void deposit(double value, double weight, std::span<const double> edges, std::vector<double>& mass,
             double& under, double& over) {
  if (!(weight > 0) || !std::isfinite(value)) return;
  if (value < edges.front()) {
    under += weight;
  } else if (value >= edges.back()) {
    over += weight;
  } else {
    const auto it = std::upper_bound(edges.begin(), edges.end(), value);
    mass[static_cast<std::size_t>(it - edges.begin()) - 1] += weight;
  }
}

} // namespace

ProbabilityHistogram time_weighted_histogram(std::span<const double> t,
                                             std::span<const float> value,
                                             std::span<const double> bin_edges,
                                             const GapPolicy& gap, const std::uint8_t* mask) {
  if (bin_edges.size() < 2 || !std::is_sorted(bin_edges.begin(), bin_edges.end()))
    throw Error(Errc::BadConfig, "need at least two ascending bin edges");
  if (t.size() != value.size()) throw Error(Errc::NonMonotonicTime, "t and value length mismatch");
  if (t.empty()) throw Error(Errc::NoFiniteWeights, "empty series");

  const double limit = gap.limit_s();
  std::vector<double> mass(bin_edges.size() - 1, 0.0);
  double under = 0.0, over = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (mask && !mask[i]) continue;
    double w = t[i + 1] - t[i];
    if (!(w > 0) || w > limit) continue; // data hole: unknown holding time
    deposit(value[i], w, bin_edges, mass, under, over);
  }
  // Last sample: unknown holding time, weight 0.
  return normalize(std::move(mass), under, over, bin_edges, WeightKind::TimeWeighted);
}

ProbabilityHistogram count_histogram(std::span<const double> values,
                                     std::span<const double> bin_edges) {
  if (bin_edges.size() < 2 || !std::is_sorted(bin_edges.begin(), bin_edges.end()))
    throw Error(Errc::BadConfig, "need at least two ascending bin edges");
  std::vector<double> mass(bin_edges.size() - 1, 0.0);
  double under = 0.0, over = 0.0;
  for (double v : values) deposit(v, 1.0, bin_edges, mass, under, over);
  return normalize(std::move(mass), under, over, bin_edges, WeightKind::CountWeighted);
}

std::vector<double> make_bin_edges(double lo, double hi, double width) {
  if (!(width > 0)) throw Error(Errc::BadConfig, "bin width must be positive");
  const double first = std::floor(lo / width) * width;
  std::vector<double> edges;
  edges.push_back(first);
  // Last edge strictly above hi so the maximum value lands inside a bin.
  while (edges.back() <= hi) edges.push_back(first + width * static_cast<double>(edges.size()));
  return edges;
}

std::vector<DayRange> day_ranges(const TimeSeries& series, double tz_offset_hours) {
  std::vector<DayRange> out;
  std::size_t i = 0;
  while (i < series.size()) {
    const std::int64_t day = local_day_index(series.t[i], tz_offset_hours);
    const double day_end =
        static_cast<double>(day + 1) * kSecondsPerDay - tz_offset_hours * 3600.0;
    std::size_t j = i;
    while (j < series.size() && series.t[j] < day_end) ++j;
    out.push_back({day, i, j});
    i = j;
  }
  return out;
}

std::vector<DailySummary> daily_summaries(const TimeSeries& series, const BatterySystemSpec& spec,
                                          const DailyOptions& options) {
  (void)spec;
  std::vector<DailySummary> out;
  if (series.empty()) return out;

  const double tz = options.tz_offset_hours;
  for (const DayRange& r : day_ranges(series, tz)) {
    const double day_start = static_cast<double>(r.day) * kSecondsPerDay - tz * 3600.0;

    double dt_max = 0.0;
    for (std::size_t j = r.begin; j < r.end; ++j) {
      float lo = series.temp[j * kTempCount], hi = lo;
      for (int c = 1; c < kTempCount; ++c) {
        const float v = series.temp[j * kTempCount + c];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      dt_max = std::max(dt_max, static_cast<double>(hi) - static_cast<double>(lo));
    }

    DailySummary s;
    s.date = civil_from_days(r.day);
    const Interval interval{day_start, day_start + kSecondsPerDay};
    const auto cap = accumulate_capacity(series, interval, options.gap);
    const auto en = accumulate_energy(series, interval, options.gap);
    s.c_chg_ah = cap.charge;
    s.c_dis_ah = cap.discharge;
    s.e_chg_kwh = en.charge;
    s.e_dis_kwh = en.discharge;
    s.dt_max_c = dt_max;
    s.sample_count = r.end - r.begin;
    out.push_back(s);
  }
  return out;
}

std::vector<AnnualRow> annual_report(std::span<const DailySummary> summaries,
                                     const BatterySystemSpec& spec) {
  std::vector<AnnualRow> rows;
  if (summaries.empty()) return rows;

  auto finish = [&spec](AnnualRow& row) {
    row.cr_loss_pct = row.c_chg_ah > 0 ? loss_rate(row.c_chg_ah, row.c_dis_ah) : 0.0;
    row.er_loss_pct = row.e_chg_kwh > 0 ? loss_rate(row.e_chg_kwh, row.e_dis_kwh) : 0.0;
    row.cycles = cycle_count(row.c_dis_ah, spec);
  };

  AnnualRow total;
  total.label = "All time";

  std::size_t i = 0;
  while (i < summaries.size()) {
    const int year = summaries[i].date.year;
    AnnualRow row;
    CivilDate first = summaries[i].date;
    CivilDate last = first;
    while (i < summaries.size() && summaries[i].date.year == year) {
      const DailySummary& d = summaries[i];
      row.c_chg_ah += d.c_chg_ah;
      row.c_dis_ah += d.c_dis_ah;
      row.e_chg_kwh += d.e_chg_kwh;
      row.e_dis_kwh += d.e_dis_kwh;
      last = d.date;
      ++i;
    }
    const bool full_year =
        first.month == 1 && first.day == 1 && last.month == 12 && last.day == 31;
    row.label = full_year ? std::to_string(year) : format_date(first) + " ~ " + format_date(last);
    finish(row);
    rows.push_back(row);

    total.c_chg_ah += row.c_chg_ah;
    total.c_dis_ah += row.c_dis_ah;
    total.e_chg_kwh += row.e_chg_kwh;
    total.e_dis_kwh += row.e_dis_kwh;
  }

  finish(total);
  rows.push_back(total);
  return rows;
}

PowerChannelStats power_channel_stats(std::span<const double> t, std::span<const double> watts,
                                      const GapPolicy& gap) {
  if (t.size() != watts.size() || t.size() < 2)
    throw Error(Errc::EmptyInterval, "need at least 2 (t, W) points");
  const double limit = gap.limit_s();

  PowerChannelStats s;
  s.max_w = *std::max_element(watts.begin(), watts.end());
  s.min_w = *std::min_element(watts.begin(), watts.end());

  double wsum = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double w = t[i + 1] - t[i];
    if (!(w > 0) || w > limit) continue;
    wsum += w;
    m1 += w * watts[i];
    m2 += w * watts[i] * watts[i];
  }
  if (!(wsum > 0)) throw Error(Errc::NoFiniteWeights, "no positive holding time");
  s.mean_w = m1 / wsum;
  s.std_w = std::sqrt(std::max(0.0, m2 / wsum - s.mean_w * s.mean_w));
  if (s.mean_w == 0.0) throw Error(Errc::ZeroMean, "fluctuation undefined for zero mean");
  s.fluctuation_pct = 100.0 * s.std_w / s.mean_w;
  return s;
}

} // namespace esslog
