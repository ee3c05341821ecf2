// esslog: reconstructs, analyzes and reports on long-term battery-management
// telemetry from an off-grid PV storage system. See README.md for the
// subcommand and file-format reference.
#include <fnmatch.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "esslog/config.hpp"
#include "esslog/csv.hpp"
#include "esslog/drift.hpp"
#include "esslog/error.hpp"
#include "esslog/kernels.hpp"
#include "esslog/report.hpp"
#include "esslog/series_io.hpp"
#include "esslog/synth.hpp"
#include "esslog/version.hpp"

namespace fs = std::filesystem;
using namespace esslog;

namespace {

int map_exit_code(Errc code) {
  switch (code) {
    case Errc::NoInputFiles:
    case Errc::BadScenario:
    case Errc::BadConfig:
    case Errc::MissingSeries:
    case Errc::UnwritableOutput:
      return 2;
    default:
      return 1;
  }
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& patterns) {
  std::vector<fs::path> files;
  for (const std::string& pattern : patterns) {
    const fs::path p(pattern);
    if (pattern.find_first_of("*?[") != std::string::npos) {
      const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
      const std::string leaf = p.filename().string();
      if (fs::is_directory(dir)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
          if (!entry.is_regular_file()) continue;
          const std::string name = entry.path().filename().string();
          if (fnmatch(leaf.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
        }
      }
    } else if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
          files.push_back(entry.path());
      }
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

/// Parses files on a small worker pool; output order is the sorted file
/// order, independent of scheduling.
std::vector<ParsedFile> parse_files(const std::vector<fs::path>& files,
                                    const ParseOptions& options) {
  std::vector<ParsedFile> parsed(files.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, files.size());
  auto parse_one = [&](std::size_t i) {
    try {
      parsed[i] = parse_bms_csv_file(files[i], options);
    } catch (const Error& e) {
      // Unreadable file: keep it in the manifest as fully rejected.
      parsed[i].name = files[i].filename().string();
      Rejection r;
      r.line = 0;
      r.field = "(file)";
      r.reason = errc_name(e.code());
      r.detail = e.what();
      parsed[i].rejections.push_back(std::move(r));
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) parse_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < files.size(); i += workers) parse_one(i);
      });
    for (auto& t : pool) t.join();
  }
  return parsed;
}

struct IngestArtifacts {
  TimeSeries series;
  std::vector<Rejection> rejections;
  IngestReport report;
};

IngestArtifacts run_ingest(const std::vector<fs::path>& files, const ParseOptions& popt,
                           const DriftSearch& search, bool correct_drift) {
  IngestArtifacts art;
  std::vector<ParsedFile> parsed = parse_files(files, popt);

  art.report.files = files.size();
  for (const auto& p : parsed) {
    art.report.rows_parsed += p.samples.size();
    art.report.rows_rejected += p.rejections.size();
    for (const auto& r : p.rejections) {
      Rejection tagged = r;
      tagged.detail = p.name + ": " + tagged.detail;
      art.rejections.push_back(std::move(tagged));
    }
  }

  art.series = merge_series(std::move(parsed));
  art.report.rows_merged = art.series.size();

  if (art.series.size() >= 2) {
    const double span_days =
        (art.series.t.back() - art.series.t.front()) / kSecondsPerDay;
    art.report.score_raw = periodicity_score(art.series, search.period_s, search.phase_bins);
    if (correct_drift && span_days >= search.min_span_days) {
      art.report.drift = estimate_drift(art.series, search);
      art.series = apply_drift_correction(art.series, art.report.drift);
      art.report.drift_applied = true;
      art.report.score_corrected =
          periodicity_score(art.series, search.period_s, search.phase_bins);
    } else {
      art.report.drift.reference_time = art.series.t.front();
      art.report.drift.span_seconds = art.series.t.back() - art.series.t.front();
      art.report.score_corrected = art.report.score_raw;
    }
  }
  return art;
}

std::vector<DayScenario> scenarios_from_mix(const std::string& mix, int days, CivilDate start,
                                            std::uint64_t seed, double cadence) {
  std::vector<ScenarioKind> kinds;
  std::size_t pos = 0;
  while (pos <= mix.size()) {
    const std::size_t comma = mix.find(',', pos);
    const std::string token =
        mix.substr(pos, comma == std::string::npos ? comma : comma - pos);
    pos = comma == std::string::npos ? mix.size() + 1 : comma + 1;
    if (token.empty()) continue;
    const auto kind = scenario_from_string(token);
    if (!kind) throw Error(Errc::BadScenario, "unknown pattern '" + token + "' in --mix");
    kinds.push_back(*kind);
  }
  if (kinds.empty()) throw Error(Errc::BadScenario, "--mix lists no patterns");

  SplitMix64 seeder(seed);
  std::vector<DayScenario> out;
  out.reserve(static_cast<std::size_t>(days));
  const std::int64_t day0 = days_from_civil(start);
  for (int i = 0; i < days; ++i) {
    DayScenario sc = preset_day(kinds[static_cast<std::size_t>(i) % kinds.size()],
                                civil_from_days(day0 + i), seeder.next());
    sc.cadence_s = cadence;
    out.push_back(sc);
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"esslog: off-grid battery telemetry reconstruction and analytics"};
  app.set_version_flag("--version", std::string("esslog ") + kToolVersion);
  app.require_subcommand(1);

  std::string backend = "auto";
  app.add_option("--backend", backend, "compute backend: auto | scalar | avx2")
      ->capture_default_str();

  std::optional<fs::path> config_path;
  app.add_option("--config", config_path, "key-value configuration file");

  // ingest
  auto* cmd_ingest = app.add_subcommand("ingest", "parse daily CSVs, repair clock drift, "
                                                  "write the consolidated series");
  std::vector<std::string> in_patterns;
  fs::path out_dir;
  bool flip_current = false;
  bool no_drift = false;
  cmd_ingest->add_option("--input,-i", in_patterns, "input files, directories or globs")
      ->required();
  cmd_ingest->add_option("--output,-o", out_dir, "output directory")->required();
  cmd_ingest->add_flag("--flip-current", flip_current,
                       "negate I for opposite-sign-convention sources");
  cmd_ingest->add_flag("--no-drift", no_drift, "skip clock-drift estimation and correction");

  // drift
  auto* cmd_drift = app.add_subcommand("drift", "estimate the clock-drift model and print it");
  fs::path drift_series;
  std::vector<std::string> drift_patterns;
  cmd_drift->add_option("--series", drift_series, "consolidated series file");
  cmd_drift->add_option("--input,-i", drift_patterns, "raw CSV inputs (alternative to --series)");

  // analyze / classify / report share inputs
  fs::path series_path;
  std::string gap_policy;
  std::optional<double> tz_override;
  auto add_series_opts = [&](CLI::App* cmd, bool needs_output) {
    cmd->add_option("--series", series_path, "consolidated series file")->required();
    if (needs_output) cmd->add_option("--output,-o", out_dir, "output directory")->required();
    cmd->add_option("--gap-policy", gap_policy, "exclude | raw");
    cmd->add_option("--tz-offset", tz_override, "site zone, hours east of UTC");
  };
  auto* cmd_analyze =
      app.add_subcommand("analyze", "emit the numeric report bundle for a series");
  add_series_opts(cmd_analyze, true);
  auto* cmd_classify = app.add_subcommand("classify", "emit per-day pattern labels");
  add_series_opts(cmd_classify, true);
  auto* cmd_report =
      app.add_subcommand("report", "analyze + classify: the full report bundle");
  add_series_opts(cmd_report, true);

  // cost
  auto* cmd_cost = app.add_subcommand("cost", "cost curves and crossover for two scenarios");
  std::optional<int> horizon_override;
  cmd_cost->add_option("--output,-o", out_dir, "output directory")->required();
  cmd_cost->add_option("--horizon", horizon_override, "horizon in years");

  // simulate
  auto* cmd_simulate =
      app.add_subcommand("simulate", "generate a synthetic telemetry corpus with ground truth");
  int sim_days = 30;
  std::uint64_t sim_seed = 42;
  double sim_drift = 0.0;
  double sim_cadence = 15.0;
  std::string sim_start = "2016-10-14";
  std::string sim_mix = "P1,P2,P3,P4,HighSolarGenOn,LowSolarGenOff";
  cmd_simulate->add_option("--output,-o", out_dir, "output directory")->required();
  cmd_simulate->add_option("--days", sim_days, "number of days")->capture_default_str();
  cmd_simulate->add_option("--seed", sim_seed, "base seed")->capture_default_str();
  cmd_simulate->add_option("--drift", sim_drift, "injected clock drift, seconds per day")
      ->capture_default_str();
  cmd_simulate->add_option("--cadence", sim_cadence, "sample cadence in seconds")
      ->capture_default_str();
  cmd_simulate->add_option("--start-date", sim_start, "first day, YYYY-MM-DD")
      ->capture_default_str();
  cmd_simulate->add_option("--mix", sim_mix, "comma-separated pattern cycle")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2; // usage problems are exit 2; --help/--version stay 0
  }

  try {
    if (!kernels::set_backend_by_name(backend))
      throw Error(Errc::BadConfig, "backend '" + backend + "' not available on this CPU");

    RunConfig rc = make_run_config(config_path);
    if (!gap_policy.empty()) {
      if (gap_policy == "exclude")
        rc.gap.exclude = true;
      else if (gap_policy == "raw")
        rc.gap.exclude = false;
      else
        throw Error(Errc::BadConfig, "--gap-policy must be exclude or raw");
    }
    if (tz_override) rc.tz_offset_hours = *tz_override;

    if (cmd_ingest->parsed()) {
      const auto files = expand_inputs(in_patterns);
      if (files.empty()) throw Error(Errc::NoInputFiles, "no input files match");
      ParseOptions popt;
      popt.flip_current = flip_current;
      IngestArtifacts art = run_ingest(files, popt, rc.drift, !no_drift);

      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw Error(Errc::UnwritableOutput, out_dir.string() + ": " + ec.message());
      write_series(out_dir / "series.essb", art.series);
      write_ingest_manifest(out_dir / "manifest.json", art.series, art.rejections, art.report,
                            rc.config_hash);

      std::printf("ingested %zu files: %zu rows merged, %zu rejected\n", art.report.files,
                  art.report.rows_merged, art.report.rows_rejected);
      if (art.report.drift_applied)
        std::printf("drift: total shift %.1f s over %.1f days (%.3f s/day), score %.4f -> %.4f\n",
                    art.report.drift.total_shift,
                    art.report.drift.span_seconds / kSecondsPerDay,
                    art.report.drift.rate_s_per_day(), art.report.score_raw,
                    art.report.score_corrected);
      else
        std::printf("drift: not applied\n");
      return 0;
    }

    if (cmd_drift->parsed()) {
      TimeSeries series;
      if (!drift_series.empty()) {
        series = read_series(drift_series);
      } else {
        const auto files = expand_inputs(drift_patterns);
        if (files.empty()) throw Error(Errc::NoInputFiles, "no input files match");
        series = merge_series(parse_files(files, {}));
      }
      const DriftModel model = estimate_drift(series, rc.drift);
      const double raw = periodicity_score(series, rc.drift.period_s, rc.drift.phase_bins);
      const TimeSeries corrected = apply_drift_correction(series, model);
      const double fixed = periodicity_score(corrected, rc.drift.period_s, rc.drift.phase_bins);
      nlohmann::ordered_json j{{"reference_time", model.reference_time},
                               {"span_seconds", model.span_seconds},
                               {"total_shift_s", model.total_shift},
                               {"rate_s_per_day", model.rate_s_per_day()},
                               {"periodicity_score_raw", raw},
                               {"periodicity_score_corrected", fixed}};
      std::printf("%s\n", j.dump(2).c_str());
      return 0;
    }

    if (cmd_analyze->parsed() || cmd_classify->parsed() || cmd_report->parsed()) {
      const TimeSeries series = read_series(series_path);
      if (series.empty()) throw Error(Errc::MissingSeries, "series has no samples");
      const AnalysisBundle bundle = analyze_series(series, rc);
      Provenance prov{kToolVersion, rc.config_hash, hash_file_hex(series_path), series.size()};

      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw Error(Errc::UnwritableOutput, out_dir.string() + ": " + ec.message());

      if (cmd_analyze->parsed() || cmd_report->parsed())
        write_analysis_bundle(out_dir, bundle, prov);
      if (cmd_classify->parsed() || cmd_report->parsed())
        write_patterns_csv(out_dir / "patterns.csv", bundle.days);

      std::printf("%zu days analyzed, %zu samples\n", bundle.days.size(), series.size());
      return 0;
    }

    if (cmd_cost->parsed()) {
      if (!rc.has_cost_a || !rc.has_cost_b)
        throw Error(Errc::BadScenario, "config must define [cost.a] and [cost.b]");
      if (horizon_override) rc.cost_horizon_years = *horizon_override;
      if (rc.cost_a.name.empty()) rc.cost_a.name = "scenario_a";
      if (rc.cost_b.name.empty()) rc.cost_b.name = "scenario_b";
      const CostReport report = make_cost_report(rc.cost_a, rc.cost_b, rc.cost_horizon_years);
      Provenance prov{kToolVersion, rc.config_hash, "", 0};
      write_cost_report(out_dir, report, prov);
      if (report.a_over_b)
        std::printf("%s overtakes %s in year %d%s\n", report.curve_a.name.c_str(),
                    report.curve_b.name.c_str(), report.a_over_b->year,
                    report.a_over_b->immediate ? " (immediate)" : "");
      else
        std::printf("no crossover within %d years\n", rc.cost_horizon_years);
      return 0;
    }

    if (cmd_simulate->parsed()) {
      const auto start = parse_date(sim_start);
      if (!start) throw Error(Errc::BadScenario, "--start-date must be YYYY-MM-DD");
      if (sim_days < 1) throw Error(Errc::BadScenario, "--days must be at least 1");
      CorpusSpec spec;
      spec.days = scenarios_from_mix(sim_mix, sim_days, *start, sim_seed, sim_cadence);
      spec.drift_s_per_day = sim_drift;
      const CorpusManifest manifest = generate_corpus(spec, out_dir);
      std::printf("wrote %zu day files + truth_manifest.json (drift %.3f s/day, total %.1f s)\n",
                  manifest.files.size(), sim_drift, manifest.injected.total_shift);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "esslog: %s\n", e.what());
    return map_exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "esslog: internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
