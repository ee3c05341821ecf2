#include "esslog/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "esslog/error.hpp"
#include "esslog/patterns.hpp"
#include "esslog/version.hpp"

namespace esslog {

namespace {

using njson = nlohmann::ordered_json;

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

ProbabilityHistogram safe_time_weighted(std::span<const double> t, std::span<const float> value,
                                        std::span<const double> edges, const GapPolicy& gap,
                                        const std::uint8_t* mask) {
  try {
    return time_weighted_histogram(t, value, edges, gap, mask);
  } catch (const Error& e) {
    if (e.code() != Errc::NoFiniteWeights) throw;
    ProbabilityHistogram h; // nothing matched the mask; keep an empty shell
    h.bin_edges.assign(edges.begin(), edges.end());
    h.probabilities.assign(edges.size() - 1, 0.0);
    return h;
  }
}

njson histogram_json(const ProbabilityHistogram& h) {
  njson j;
  j["weight_kind"] = h.weight_kind == WeightKind::TimeWeighted ? "time" : "count";
  j["bin_edges"] = h.bin_edges;
  j["probabilities"] = h.probabilities;
  j["underflow"] = h.underflow;
  j["overflow"] = h.overflow;
  return j;
}

njson annual_json(const std::vector<AnnualRow>& rows) {
  njson arr = njson::array();
  for (const AnnualRow& r : rows) {
    arr.push_back({{"interval", r.label},
                   {"c_chg_ah", r.c_chg_ah},
                   {"c_dis_ah", r.c_dis_ah},
                   {"cr_loss_pct", r.cr_loss_pct},
                   {"cycles", r.cycles},
                   {"e_chg_kwh", r.e_chg_kwh},
                   {"e_dis_kwh", r.e_dis_kwh},
                   {"er_loss_pct", r.er_loss_pct}});
  }
  return arr;
}

njson provenance_json(const Provenance& p) {
  return njson{{"tool_version", p.tool_version},
               {"config_hash", p.config_hash},
               {"input_hash", p.input_hash},
               {"rows", p.rows}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::UnwritableOutput, path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

} // namespace

AnalysisBundle analyze_series(const TimeSeries& series, const RunConfig& config) {
  AnalysisBundle b;
  if (series.empty()) throw Error(Errc::MissingSeries, "series has no samples");

  const double tz = config.tz_offset_hours;
  DailyOptions dopt;
  dopt.tz_offset_hours = tz;
  dopt.gap = config.gap;
  b.days = daily_summaries(series, config.battery, dopt);

  const std::vector<DayRange> ranges = day_ranges(series, tz);
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const DayRange& r = ranges[i];
    DaySlice slice{std::span(series.t).subspan(r.begin, r.end - r.begin),
                   std::span(series.current).subspan(r.begin, r.end - r.begin)};
    const DayClassification c =
        classify_day(slice, config.patterns, config.battery, tz, config.gap);
    b.days[i].pattern = c.pattern;
    b.days[i].generator_on = c.generator.on;
    b.days[i].solar_level = c.solar.level;
    b.days[i].solar_ah = c.solar.solar_ah;
  }

  b.annual = annual_report(b.days, config.battery);

  const std::size_t n = series.size();

  // C-rate distributions, charge and discharge normalized separately.
  {
    std::vector<float> crate(n);
    std::vector<std::uint8_t> chg(n), dis(n);
    const double inv_cap = 1.0 / config.battery.nominal_capacity_ah;
    float max_crate = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
      const float cur = series.current[i];
      const float cr = static_cast<float>(std::fabs(cur) * inv_cap);
      crate[i] = cr;
      chg[i] = cur > 0 ? 1 : 0;
      dis[i] = cur < 0 ? 1 : 0;
      max_crate = std::max(max_crate, cr);
    }
    const auto edges = make_bin_edges(0.0, max_crate, config.bins.c_rate_width);
    b.crate_charge = safe_time_weighted(series.t, crate, edges, config.gap, chg.data());
    b.crate_discharge = safe_time_weighted(series.t, crate, edges, config.gap, dis.data());
  }

  // Temperature and spread distributions; spread statistics.
  {
    std::vector<float> tmax(n), tmin(n), spread(n);
    float lo_all = series.temp.empty() ? 0.0f : series.temp[0];
    float hi_all = lo_all;
    for (std::size_t i = 0; i < n; ++i) {
      float lo = series.temp[i * kTempCount], hi = lo;
      for (int c = 1; c < kTempCount; ++c) {
        const float v = series.temp[i * kTempCount + c];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      tmax[i] = hi;
      tmin[i] = lo;
      spread[i] = hi - lo;
      lo_all = std::min(lo_all, lo);
      hi_all = std::max(hi_all, hi);
    }
    const auto t_edges = make_bin_edges(lo_all, hi_all, config.bins.temp_width);
    float max_spread = 0.0f;
    for (float s : spread) max_spread = std::max(max_spread, s);
    const auto dt_edges = make_bin_edges(0.0, max_spread, config.bins.delta_t_width);
    b.temp_max = safe_time_weighted(series.t, tmax, t_edges, config.gap, nullptr);
    b.temp_min = safe_time_weighted(series.t, tmin, t_edges, config.gap, nullptr);
    b.delta_t = safe_time_weighted(series.t, spread, dt_edges, config.gap, nullptr);

    const double limit = config.gap.limit_s();
    double wsum = 0.0, wmean = 0.0, wwithin = 0.0;
    double dt_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) dt_max = std::max(dt_max, static_cast<double>(spread[i]));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double w = series.t[i + 1] - series.t[i];
      if (!(w > 0) || w > limit) continue;
      wsum += w;
      wmean += w * spread[i];
      if (spread[i] < config.battery.max_cell_temp_spread_c) wwithin += w;
    }
    b.dt_stats.max_c = dt_max;
    b.dt_stats.time_weighted_mean_c = wsum > 0 ? wmean / wsum : 0.0;
    b.dt_stats.fraction_within_spread = wsum > 0 ? wwithin / wsum : 0.0;
  }

  // Per-day quantity distributions (count weighted).
  {
    std::vector<double> cc, cd, dc, ec, ed, de;
    cc.reserve(b.days.size());
    for (const DailySummary& d : b.days) {
      cc.push_back(d.c_chg_ah);
      cd.push_back(d.c_dis_ah);
      dc.push_back(d.delta_c_ah());
      ec.push_back(d.e_chg_kwh);
      ed.push_back(d.e_dis_kwh);
      de.push_back(d.delta_e_kwh());
    }
    auto span_of = [](const std::vector<double>& v) {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return std::pair<double, double>(*lo, *hi);
    };
    const auto [cc_lo, cc_hi] = span_of(cc);
    const auto [cd_lo, cd_hi] = span_of(cd);
    const auto cap_edges = make_bin_edges(std::min(cc_lo, cd_lo), std::max(cc_hi, cd_hi),
                                          config.bins.daily_capacity_width);
    const auto [dc_lo, dc_hi] = span_of(dc);
    const auto dcap_edges = make_bin_edges(dc_lo, dc_hi, config.bins.daily_capacity_width);
    const auto [ec_lo, ec_hi] = span_of(ec);
    const auto [ed_lo, ed_hi] = span_of(ed);
    const auto en_edges = make_bin_edges(std::min(ec_lo, ed_lo), std::max(ec_hi, ed_hi),
                                         config.bins.daily_energy_width);
    const auto [de_lo, de_hi] = span_of(de);
    const auto den_edges = make_bin_edges(de_lo, de_hi, config.bins.daily_energy_width);
    b.daily_c_chg = count_histogram(cc, cap_edges);
    b.daily_c_dis = count_histogram(cd, cap_edges);
    b.daily_delta_c = count_histogram(dc, dcap_edges);
    b.daily_e_chg = count_histogram(ec, en_edges);
    b.daily_e_dis = count_histogram(ed, en_edges);
    b.daily_delta_e = count_histogram(de, den_edges);
  }

  // Day x phase colormap matrix of mean total voltage.
  {
    const int bins = config.drift.phase_bins;
    b.matrix.phase_bins = bins;
    b.matrix.dates.reserve(ranges.size());
    b.matrix.mean_v.assign(ranges.size() * static_cast<std::size_t>(bins),
                           std::numeric_limits<double>::quiet_NaN());
    std::vector<double> sum(static_cast<std::size_t>(bins));
    std::vector<double> count(static_cast<std::size_t>(bins));
    const double bin_width = kSecondsPerDay / bins;
    for (std::size_t r = 0; r < ranges.size(); ++r) {
      b.matrix.dates.push_back(civil_from_days(ranges[r].day));
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(count.begin(), count.end(), 0.0);
      const double day_start =
          static_cast<double>(ranges[r].day) * kSecondsPerDay - tz * 3600.0;
      for (std::size_t i = ranges[r].begin; i < ranges[r].end; ++i) {
        int bin = static_cast<int>((series.t[i] - day_start) / bin_width);
        bin = std::clamp(bin, 0, bins - 1);
        sum[static_cast<std::size_t>(bin)] += series.v_total[i];
        count[static_cast<std::size_t>(bin)] += 1.0;
      }
      for (int c = 0; c < bins; ++c) {
        if (count[static_cast<std::size_t>(c)] > 0)
          b.matrix.mean_v[r * static_cast<std::size_t>(bins) + static_cast<std::size_t>(c)] =
              sum[static_cast<std::size_t>(c)] / count[static_cast<std::size_t>(c)];
      }
    }
  }

  double total_dis = 0.0;
  for (const DailySummary& d : b.days) total_dis += d.c_dis_ah;
  b.total_cycles = cycle_count(total_dis, config.battery);
  b.health = estimate_remaining_capacity(b.total_cycles, config.fade);

  return b;
}

namespace {

void write_annual_csv(const std::filesystem::path& path, const std::vector<AnnualRow>& rows) {
  std::string out = "interval,c_chg_ah,c_dis_ah,cr_loss_pct,cycles,e_chg_kwh,e_dis_kwh,er_loss_pct\n";
  for (const AnnualRow& r : rows) {
    out += r.label;
    out += ',' + fmt(r.c_chg_ah) + ',' + fmt(r.c_dis_ah) + ',' + fmt(r.cr_loss_pct) + ',' +
           fmt(r.cycles) + ',' + fmt(r.e_chg_kwh) + ',' + fmt(r.e_dis_kwh) + ',' +
           fmt(r.er_loss_pct) + '\n';
  }
  write_text(path, out);
}

void write_daily_csv(const std::filesystem::path& path, const std::vector<DailySummary>& days) {
  std::string out =
      "date,c_chg_ah,c_dis_ah,delta_c_ah,e_chg_kwh,e_dis_kwh,delta_e_kwh,dt_max_c,samples,"
      "pattern,generator_on,solar_level,solar_ah\n";
  for (const DailySummary& d : days) {
    out += format_date(d.date);
    out += ',' + fmt(d.c_chg_ah) + ',' + fmt(d.c_dis_ah) + ',' + fmt(d.delta_c_ah()) + ',' +
           fmt(d.e_chg_kwh) + ',' + fmt(d.e_dis_kwh) + ',' + fmt(d.delta_e_kwh()) + ',' +
           fmt(d.dt_max_c) + ',' + std::to_string(d.sample_count) + ',' + to_string(d.pattern) +
           ',' + (d.generator_on ? "true" : "false") + ',' + to_string(d.solar_level) + ',' +
           fmt(d.solar_ah) + '\n';
  }
  write_text(path, out);
}

void append_histogram_csv(std::string& out, const char* name, const ProbabilityHistogram& h) {
  if (h.underflow > 0)
    out += std::string(name) + ",underflow,,," + fmt(h.underflow) + '\n';
  for (std::size_t i = 0; i < h.probabilities.size(); ++i) {
    out += std::string(name) + ",bin," + fmt(h.bin_edges[i]) + ',' + fmt(h.bin_edges[i + 1]) +
           ',' + fmt(h.probabilities[i]) + '\n';
  }
  if (h.overflow > 0) out += std::string(name) + ",overflow,,," + fmt(h.overflow) + '\n';
}

void write_matrix_csv(const std::filesystem::path& path, const DayPhaseMatrix& m) {
  std::string out = "date";
  for (int c = 0; c < m.phase_bins; ++c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, ",b%02d", c);
    out += buf;
  }
  out += '\n';
  for (std::size_t r = 0; r < m.dates.size(); ++r) {
    out += format_date(m.dates[r]);
    for (int c = 0; c < m.phase_bins; ++c) {
      out += ',';
      out += fmt(m.mean_v[r * static_cast<std::size_t>(m.phase_bins) + static_cast<std::size_t>(c)]);
    }
    out += '\n';
  }
  write_text(path, out);
}

} // namespace

void write_analysis_bundle(const std::filesystem::path& outdir, const AnalysisBundle& bundle,
                           const Provenance& prov) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw Error(Errc::UnwritableOutput, outdir.string() + ": " + ec.message());

  write_annual_csv(outdir / "annual_report.csv", bundle.annual);
  write_daily_csv(outdir / "daily_summaries.csv", bundle.days);
  write_matrix_csv(outdir / "day_phase_matrix.csv", bundle.matrix);

  std::string hists = "histogram,part,bin_lo,bin_hi,probability\n";
  append_histogram_csv(hists, "c_rate_charge", bundle.crate_charge);
  append_histogram_csv(hists, "c_rate_discharge", bundle.crate_discharge);
  append_histogram_csv(hists, "temp_max", bundle.temp_max);
  append_histogram_csv(hists, "temp_min", bundle.temp_min);
  append_histogram_csv(hists, "delta_t", bundle.delta_t);
  append_histogram_csv(hists, "daily_c_chg", bundle.daily_c_chg);
  append_histogram_csv(hists, "daily_c_dis", bundle.daily_c_dis);
  append_histogram_csv(hists, "daily_delta_c", bundle.daily_delta_c);
  append_histogram_csv(hists, "daily_e_chg", bundle.daily_e_chg);
  append_histogram_csv(hists, "daily_e_dis", bundle.daily_e_dis);
  append_histogram_csv(hists, "daily_delta_e", bundle.daily_delta_e);
  write_text(outdir / "histograms.csv", hists);

  njson j;
  j["format"] = "esslog-report";
  j["version"] = 1;
  j["provenance"] = provenance_json(prov);
  j["days"] = bundle.days.size();

  std::map<std::string, std::size_t> pattern_counts;
  for (const DailySummary& d : bundle.days) pattern_counts[to_string(d.pattern)]++;
  j["pattern_counts"] = pattern_counts;

  j["annual"] = annual_json(bundle.annual);
  j["delta_t"] = {{"max_c", bundle.dt_stats.max_c},
                  {"time_weighted_mean_c", bundle.dt_stats.time_weighted_mean_c},
                  {"fraction_within_spread", bundle.dt_stats.fraction_within_spread}};
  j["health"] = {{"equivalent_cycles", bundle.total_cycles},
                 {"remaining_capacity_pct", bundle.health.remaining_pct},
                 {"beyond_reference", bundle.health.beyond_reference}};
  j["histograms"] = {{"c_rate_charge", histogram_json(bundle.crate_charge)},
                     {"c_rate_discharge", histogram_json(bundle.crate_discharge)},
                     {"temp_max", histogram_json(bundle.temp_max)},
                     {"temp_min", histogram_json(bundle.temp_min)},
                     {"delta_t", histogram_json(bundle.delta_t)},
                     {"daily_c_chg", histogram_json(bundle.daily_c_chg)},
                     {"daily_c_dis", histogram_json(bundle.daily_c_dis)},
                     {"daily_delta_c", histogram_json(bundle.daily_delta_c)},
                     {"daily_e_chg", histogram_json(bundle.daily_e_chg)},
                     {"daily_e_dis", histogram_json(bundle.daily_e_dis)},
                     {"daily_delta_e", histogram_json(bundle.daily_delta_e)}};
  write_text(outdir / "report.json", j.dump(2) + "\n");
}

void write_patterns_csv(const std::filesystem::path& path,
                        const std::vector<DailySummary>& days) {
  std::string out = "date,pattern,solar_level,solar_ah,generator_on,samples\n";
  for (const DailySummary& d : days) {
    out += format_date(d.date);
    out += std::string(",") + to_string(d.pattern) + ',' + to_string(d.solar_level) + ',' +
           fmt(d.solar_ah) + ',' + (d.generator_on ? "true" : "false") + ',' +
           std::to_string(d.sample_count) + '\n';
  }
  write_text(path, out);
}

CostReport make_cost_report(const CostScenario& a, const CostScenario& b, int horizon_years) {
  CostReport r;
  r.curve_a = cumulative_cost_curve(a, horizon_years);
  r.curve_b = cumulative_cost_curve(b, horizon_years);
  r.a_over_b = crossover_year(r.curve_a, r.curve_b);
  return r;
}

void write_cost_report(const std::filesystem::path& outdir, const CostReport& report,
                       const Provenance& prov) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw Error(Errc::UnwritableOutput, outdir.string() + ": " + ec.message());

  std::string csv = "year," + report.curve_a.name + "_usd," + report.curve_b.name + "_usd\n";
  for (int y = 1; y <= report.curve_a.horizon_years(); ++y) {
    csv += std::to_string(y) + ',' + fmt(report.curve_a.at_year(y)) + ',' +
           fmt(report.curve_b.at_year(y)) + '\n';
  }
  write_text(outdir / "cost_curves.csv", csv);

  njson j;
  j["format"] = "esslog-cost-report";
  j["version"] = 1;
  j["provenance"] = provenance_json(prov);
  j["curves"] = {{report.curve_a.name, report.curve_a.cumulative_usd},
                 {report.curve_b.name, report.curve_b.cumulative_usd}};
  if (report.a_over_b) {
    j["crossover"] = {{"first_costlier", report.curve_a.name},
                      {"becomes_costlier_than", report.curve_b.name},
                      {"year", report.a_over_b->year},
                      {"immediate", report.a_over_b->immediate}};
  } else {
    j["crossover"] = nullptr;
  }
  write_text(outdir / "cost_report.json", j.dump(2) + "\n");
}

} // namespace esslog
