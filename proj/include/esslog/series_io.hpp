#pragma once

#include <filesystem>
#include <string>

#include "esslog/drift.hpp"
#include "esslog/model.hpp"

namespace esslog {

/// Consolidated columnar container, one file per ingest run:
///   magic "ESSLOGB1", u32 version, u32 reserved, u64 row count,
///   then contiguous column arrays: t (f64), v_total (f32), current (f32),
///   v_cell (16 x f32 interleaved), temp (4 x f32 interleaved).
/// Little-endian; written and read with plain array I/O.
void write_series(const std::filesystem::path& path, const TimeSeries& series);
TimeSeries read_series(const std::filesystem::path& path);

/// FNV-1a 64 over a byte range, hex encoded; provenance fingerprints only.
std::string fnv1a_hex(const void* data, std::size_t size);
std::string hash_file_hex(const std::filesystem::path& path);

struct IngestReport {
  std::size_t files = 0;
  std::size_t rows_parsed = 0;
  std::size_t rows_rejected = 0;
  std::size_t rows_merged = 0;
  DriftModel drift;
  bool drift_applied = false;
  double score_raw = 0.0;
  double score_corrected = 0.0;
};

/// Sidecar manifest describing an ingest run: sources, row counts, the first
/// rejections in detail, and the fitted drift model.
void write_ingest_manifest(const std::filesystem::path& path, const TimeSeries& series,
                           const std::vector<Rejection>& rejections, const IngestReport& report,
                           const std::string& config_hash);

} // namespace esslog
