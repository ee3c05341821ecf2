#include "esslog/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "esslog/civil_time.hpp"

namespace esslog {

namespace {

struct PrefixSums {
  std::vector<double> s1; //!< prefix sum of current
  std::vector<double> s2; //!< prefix sum of current^2
};

PrefixSums make_prefix(std::span<const float> current) {
  PrefixSums p;
  p.s1.resize(current.size() + 1, 0.0);
  p.s2.resize(current.size() + 1, 0.0);
  for (std::size_t i = 0; i < current.size(); ++i) {
    const double c = current[i];
    p.s1[i + 1] = p.s1[i] + c;
    p.s2[i + 1] = p.s2[i] + c * c;
  }
  return p;
}

struct WindowStats {
  double mean = 0.0;
  double rel_std_pct = 0.0;
};

WindowStats window_stats(const PrefixSums& p, std::size_t a, std::size_t b /*inclusive*/) {
  const double n = static_cast<double>(b - a + 1);
  const double mean = (p.s1[b + 1] - p.s1[a]) / n;
  const double var = std::max(0.0, (p.s2[b + 1] - p.s2[a]) / n - mean * mean);
  WindowStats w;
  w.mean = mean;
  w.rel_std_pct = mean > 0 ? 100.0 * std::sqrt(var) / mean : 0.0;
  return w;
}

/// Charge amp-hours of the piecewise-linear current over [x0, x1] within the
/// slice; exact positive-part integral, additive over any partition.
double charge_ah_over(const DaySlice& day, double x0, double x1, double gap_limit) {
  if (!(x1 > x0) || day.t.size() < 2) return 0.0;
  double charge_as = 0.0;
  for (std::size_t k = 0; k + 1 < day.t.size(); ++k) {
    const double t0 = day.t[k], t1 = day.t[k + 1];
    if (t1 <= x0) continue;
    if (t0 >= x1) break;
    const double h_full = t1 - t0;
    if (!(h_full > 0) || h_full > gap_limit) continue;
    const double lo = std::max(t0, x0);
    const double hi = std::min(t1, x1);
    if (!(hi > lo)) continue;
    const double ia = day.current[k];
    const double ib = day.current[k + 1];
    const double a = ia + (ib - ia) * (lo - t0) / h_full;
    const double b = ia + (ib - ia) * (hi - t0) / h_full;
    const double h = hi - lo;
    if (a >= 0 && b >= 0) {
      charge_as += 0.5 * h * (a + b);
    } else if (a > 0 && b < 0) {
      const double theta = a / (a - b);
      charge_as += 0.5 * h * theta * a;
    } else if (a < 0 && b > 0) {
      const double theta = a / (a - b);
      charge_as += 0.5 * h * (1.0 - theta) * b;
    }
  }
  return charge_as / 3600.0;
}

} // namespace

GeneratorDetection detect_generator(const DaySlice& day, const PatternRule& rule,
                                    const BatterySystemSpec& spec, const GapPolicy& gap) {
  GeneratorDetection det;
  const std::size_t n = day.t.size();
  if (n < 2) return det;

  const double min_mean = rule.gen_min_current_frac * spec.nominal_capacity_ah;
  const double gap_limit = gap.limit_s();
  const PrefixSums prefix = make_prefix(day.current);

  // Sliding minimal-duration windows; monotonic deques track the window's
  // minimum current and maximum sample spacing.
  std::deque<std::size_t> min_i;  // indices, current ascending
  std::deque<std::size_t> max_dt; // interval indices, dt descending

  std::vector<std::pair<std::size_t, std::size_t>> spans; // qualifying [a, b] index windows
  std::size_t j = 0;
  auto push_sample = [&](std::size_t k) {
    while (!min_i.empty() && day.current[min_i.back()] >= day.current[k]) min_i.pop_back();
    min_i.push_back(k);
    if (k > 0) {
      const double dt = day.t[k] - day.t[k - 1];
      while (!max_dt.empty() && day.t[max_dt.back()] - day.t[max_dt.back() - 1] <= dt)
        max_dt.pop_back();
      max_dt.push_back(k);
    }
  };
  push_sample(0);

  for (std::size_t i = 0; i < n; ++i) {
    while (j < i) push_sample(++j); // keep the deque invariant if i overtakes j
    while (j + 1 < n && day.t[j] - day.t[i] < rule.gen_min_duration_s) push_sample(++j);
    if (day.t[j] - day.t[i] < rule.gen_min_duration_s) break; // tail too short

    // evict entries left of i
    while (!min_i.empty() && min_i.front() < i) min_i.pop_front();
    while (!max_dt.empty() && max_dt.front() <= i) max_dt.pop_front();

    const bool all_charging = !min_i.empty() && day.current[min_i.front()] > 0.0f;
    const bool contiguous =
        max_dt.empty() || day.t[max_dt.front()] - day.t[max_dt.front() - 1] <= gap_limit;
    if (all_charging && contiguous) {
      const WindowStats w = window_stats(prefix, i, j);
      if (w.mean >= min_mean && w.rel_std_pct <= rule.gen_max_rel_std_pct) {
        if (!spans.empty() && i <= spans.back().second)
          spans.back().second = std::max(spans.back().second, j);
        else
          spans.emplace_back(i, j);
      }
    }
  }

  for (const auto& [a, b] : spans) {
    const WindowStats w = window_stats(prefix, a, b);
    GeneratorSegment seg;
    seg.start = day.t[a];
    seg.end = day.t[b];
    seg.mean_current_a = w.mean;
    seg.relative_std_pct = w.rel_std_pct;
    det.segments.push_back(seg);
  }
  det.on = !det.segments.empty();
  return det;
}

SolarAssessment solar_level(const DaySlice& day, const GeneratorDetection& generator,
                            const PatternRule& rule, const BatterySystemSpec& spec,
                            double tz_offset_hours, const GapPolicy& gap) {
  SolarAssessment out;
  if (day.t.empty()) return out;

  const std::int64_t d = local_day_index(day.t.front(), tz_offset_hours);
  const double day_start = static_cast<double>(d) * kSecondsPerDay - tz_offset_hours * 3600.0;
  const double win_lo = day_start + rule.daylight_start_hour * 3600.0;
  const double win_hi = day_start + rule.daylight_end_hour * 3600.0;

  double ah = charge_ah_over(day, win_lo, win_hi, gap.limit_s());
  for (const auto& seg : generator.segments) {
    const double lo = std::max(win_lo, seg.start);
    const double hi = std::min(win_hi, seg.end);
    if (hi > lo) ah -= charge_ah_over(day, lo, hi, gap.limit_s());
  }
  ah = std::max(0.0, ah);

  out.solar_ah = ah;
  const double high_min = rule.scaled_high_min(spec);
  const double low_max = rule.scaled_low_max(spec);
  out.level = ah >= high_min ? SolarLevel::High
              : ah < low_max ? SolarLevel::Low
                             : SolarLevel::Medium;
  return out;
}

DayPattern classify_cell(SolarLevel solar, bool generator_on) {
  switch (solar) {
    case SolarLevel::High: return generator_on ? DayPattern::Unclassified : DayPattern::P1;
    case SolarLevel::Medium: return generator_on ? DayPattern::P3 : DayPattern::P2;
    case SolarLevel::Low: return generator_on ? DayPattern::P4 : DayPattern::Unclassified;
  }
  return DayPattern::Unclassified;
}

DayClassification classify_day(const DaySlice& day, const PatternRule& rule,
                               const BatterySystemSpec& spec, double tz_offset_hours,
                               const GapPolicy& gap) {
  DayClassification c;
  if (day.t.size() < rule.min_samples) return c; // too thin to judge
  c.generator = detect_generator(day, rule, spec, gap);
  c.solar = solar_level(day, c.generator, rule, spec, tz_offset_hours, gap);
  c.pattern = classify_cell(c.solar.level, c.generator.on);
  return c;
}

} // namespace esslog
