#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "esslog/model.hpp"

namespace esslog {

struct ParseOptions {
  bool flip_current = false; //!< negate I for sources with the opposite sign convention
};

/// One parsed daily file, rows in file order. Malformed rows are logged,
/// never silently dropped.
struct ParsedFile {
  std::string name;
  std::vector<TelemetrySample> samples;
  std::vector<Rejection> rejections;
  std::size_t rows_total = 0; //!< data rows seen (excluding the header)
};

/// Expected header: time,V_tot,V01,...,V16,I,T1,T2,T3,T4
std::string expected_csv_header();

/// Throws Error(EmptyFile) on empty content and Error(UnreadableHeader) when
/// the first line does not match the schema.
ParsedFile parse_bms_csv(std::string_view content, const std::string& name,
                         const ParseOptions& options = {});
ParsedFile parse_bms_csv_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Merges per-file batches into one monotonic series: global sort by
/// timestamp with a stable file-name tiebreak, exact-duplicate timestamps
/// collapsed keeping the first. Result is independent of batch order and of
/// any parallel parse schedule.
TimeSeries merge_series(std::vector<ParsedFile> batches);

/// Serializes one sample as a CSV row (used by the synthetic generator and
/// report emission; exact inverse of the parser at the printed precision).
void append_csv_row(std::string& out, const TelemetrySample& s);

} // namespace esslog
