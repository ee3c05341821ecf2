#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "esslog/config.hpp"
#include "esslog/cost.hpp"
#include "esslog/health.hpp"
#include "esslog/metrics.hpp"
#include "esslog/model.hpp"

namespace esslog {

/// Day x phase-bin matrix of mean total voltage (colormap source). Row-major;
/// empty cells are NaN and render as blanks in CSV.
struct DayPhaseMatrix {
  std::vector<CivilDate> dates;
  int phase_bins = 96;
  std::vector<double> mean_v;
};

struct DeltaTStats {
  double max_c = 0.0;
  double time_weighted_mean_c = 0.0;
  double fraction_within_spread = 0.0; //!< time fraction with dT < battery spec bound
};

struct AnalysisBundle {
  std::vector<DailySummary> days; //!< pattern fields filled
  std::vector<AnnualRow> annual;
  ProbabilityHistogram crate_charge;
  ProbabilityHistogram crate_discharge;
  ProbabilityHistogram temp_max;
  ProbabilityHistogram temp_min;
  ProbabilityHistogram delta_t;
  ProbabilityHistogram daily_c_chg;
  ProbabilityHistogram daily_c_dis;
  ProbabilityHistogram daily_delta_c;
  ProbabilityHistogram daily_e_chg;
  ProbabilityHistogram daily_e_dis;
  ProbabilityHistogram daily_delta_e;
  DayPhaseMatrix matrix;
  DeltaTStats dt_stats;
  double total_cycles = 0.0;
  CapacityEstimate health;
};

/// The full numeric pipeline: daily accounting, classification, reference
/// distributions, annual rows, voltage colormap matrix, and the health
/// estimate. Deterministic for fixed inputs and config.
AnalysisBundle analyze_series(const TimeSeries& series, const RunConfig& config);

/// Provenance header carried by every report file.
struct Provenance {
  std::string tool_version;
  std::string config_hash;
  std::string input_hash;
  std::size_t rows = 0;
};

/// Writes annual_report.{json,csv}, histograms.{json,csv},
/// daily_summaries.csv, day_phase_matrix.csv, and report.json into outdir.
void write_analysis_bundle(const std::filesystem::path& outdir, const AnalysisBundle& bundle,
                           const Provenance& prov);

/// patterns.csv: one row per classified day.
void write_patterns_csv(const std::filesystem::path& path,
                        const std::vector<DailySummary>& days);

struct CostReport {
  CostCurve curve_a;
  CostCurve curve_b;
  std::optional<Crossover> a_over_b; //!< first year a costs more than b
};

CostReport make_cost_report(const CostScenario& a, const CostScenario& b, int horizon_years);
void write_cost_report(const std::filesystem::path& outdir, const CostReport& report,
                       const Provenance& prov);

} // namespace esslog
