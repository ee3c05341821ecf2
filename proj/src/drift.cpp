#include "esslog/drift.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "esslog/error.hpp"
#include "esslog/kernels.hpp"

namespace esslog {

namespace {

/// Float views of the series prepared for phase folding: phase0 = t mod P,
/// u = normalized position in the span. Epoch timestamps do not fit in
/// float, their phase and span position do.
struct FoldView {
  std::vector<float> phase0;
  std::vector<float> u;
  std::vector<float> v;
};

FoldView make_fold_view(const TimeSeries& series, double period, std::size_t stride) {
  FoldView view;
  const std::size_t n = (series.size() + stride - 1) / stride;
  view.phase0.reserve(n);
  view.u.reserve(n);
  view.v.reserve(n);
  const double t0 = series.t.front();
  const double span = series.t.back() - t0;
  const double inv_span = span > 0 ? 1.0 / span : 0.0;
  for (std::size_t i = 0; i < series.size(); i += stride) {
    double ph = std::fmod(series.t[i], period);
    if (ph < 0) ph += period;
    view.phase0.push_back(static_cast<float>(ph));
    view.u.push_back(static_cast<float>((series.t[i] - t0) * inv_span));
    view.v.push_back(series.v_total[i]);
  }
  return view;
}

double score_from_moments(const kernels::BinMoments* bins, int nbins) {
  double count = 0.0, sum = 0.0, sumsq = 0.0, within = 0.0;
  for (int b = 0; b < nbins; ++b) {
    count += bins[b].count;
    sum += bins[b].sum;
    sumsq += bins[b].sumsq;
    if (bins[b].count > 0) within += bins[b].sumsq - bins[b].sum * bins[b].sum / bins[b].count;
  }
  if (count <= 0) return 0.0;
  const double total = sumsq - sum * sum / count;
  if (!(total > 1e-12)) return 0.0; // constant signal: nothing to explain
  return std::clamp(1.0 - within / total, 0.0, 1.0);
}

double score_shift(const FoldView& view, float shift, float period, int nbins) {
  std::vector<kernels::BinMoments> bins(static_cast<std::size_t>(nbins));
  kernels::phase_fold(view.phase0.data(), view.u.data(), view.v.data(), view.phase0.size(),
                      shift, period, nbins, bins.data());
  return score_from_moments(bins.data(), nbins);
}

/// Evaluates all candidate shifts (parallel over candidates, deterministic
/// gather) and returns the index of the best score; ties prefer smaller
/// |shift|, then the smaller shift.
std::size_t best_candidate(const FoldView& view, const std::vector<double>& shifts, float period,
                           int nbins) {
  std::vector<double> scores(shifts.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t pieces = std::min<std::size_t>(hw, shifts.size());
  if (pieces <= 1) {
    for (std::size_t i = 0; i < shifts.size(); ++i)
      scores[i] = score_shift(view, static_cast<float>(shifts[i]), period, nbins);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(pieces);
    for (std::size_t p = 0; p < pieces; ++p) {
      workers.emplace_back([&, p] {
        for (std::size_t i = p; i < shifts.size(); i += pieces)
          scores[i] = score_shift(view, static_cast<float>(shifts[i]), period, nbins);
      });
    }
    for (auto& w : workers) w.join();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < shifts.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
    } else if (scores[i] == scores[best]) {
      const double ai = std::fabs(shifts[i]);
      const double ab = std::fabs(shifts[best]);
      if (ai < ab || (ai == ab && shifts[i] < shifts[best])) best = i;
    }
  }
  return best;
}

} // namespace

double periodicity_score(const TimeSeries& series, double period_s, int phase_bins) {
  if (series.empty()) throw Error(Errc::EmptyInterval, "periodicity_score on empty series");
  if (!(period_s > 0)) throw Error(Errc::NonMonotonicTime, "period must be positive");
  FoldView view = make_fold_view(series, period_s, 1);
  return score_shift(view, 0.0f, static_cast<float>(period_s), phase_bins);
}

DriftModel estimate_drift(const TimeSeries& series, const DriftSearch& search) {
  if (series.size() < 2) throw Error(Errc::SpanTooShort, "series has fewer than 2 samples");
  const double span = series.t.back() - series.t.front();
  if (span < search.min_span_days * kSecondsPerDay)
    throw Error(Errc::SpanTooShort, "series spans " + std::to_string(span / kSecondsPerDay) +
                                        " days, need " + std::to_string(search.min_span_days));

  const float period = static_cast<float>(search.period_s);
  const int nbins = search.phase_bins;

  // Coarse grid on a decimated view.
  const std::size_t stride =
      std::max<std::size_t>(1, series.size() / std::max<std::size_t>(1, search.max_coarse_samples));
  FoldView coarse_view = make_fold_view(series, search.period_s, stride);

  std::vector<double> coarse;
  for (double s = -search.max_shift_s; s <= search.max_shift_s + 1e-9; s += search.coarse_step_s)
    coarse.push_back(s);
  const std::size_t ci = best_candidate(coarse_view, coarse, period, nbins);
  const double center = coarse[ci];

  // Refinement at full resolution around the coarse winner.
  const double radius = search.refine_radius_steps * search.coarse_step_s;
  FoldView full_view = stride == 1 ? std::move(coarse_view)
                                   : make_fold_view(series, search.period_s, 1);
  std::vector<double> fine;
  for (double s = center - radius; s <= center + radius + 1e-9; s += search.refine_step_s)
    fine.push_back(std::clamp(s, -search.max_shift_s, search.max_shift_s));
  const std::size_t fi = best_candidate(full_view, fine, period, nbins);

  DriftModel model;
  model.reference_time = series.t.front();
  model.span_seconds = span;
  model.total_shift = fine[fi];
  return model;
}

TimeSeries apply_drift_correction(const TimeSeries& series, const DriftModel& model) {
  if (!std::isfinite(model.total_shift) || !std::isfinite(model.span_seconds) ||
      !std::isfinite(model.reference_time))
    throw Error(Errc::NonMonotonicResult, "drift model is not finite");
  if (model.span_seconds > 0 && model.total_shift >= model.span_seconds)
    throw Error(Errc::NonMonotonicResult,
                "correction rate >= 86400 s/day would invert sample order");

  TimeSeries out = series;
  if (model.span_seconds <= 0 || model.total_shift == 0.0) return out;
  const double scale = model.total_shift / model.span_seconds;
  for (double& t : out.t) t -= scale * (t - model.reference_time);
  return out;
}

} // namespace esslog
