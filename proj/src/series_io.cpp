#include "esslog/series_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "esslog/error.hpp"
#include "esslog/version.hpp"

namespace esslog {

namespace {

constexpr char kMagic[8] = {'E', 'S', 'S', 'L', 'O', 'G', 'B', '1'};

template <typename T>
void write_array(std::ofstream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_array(std::ifstream& in, std::vector<T>& v, std::size_t count) {
  v.resize(count);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T)));
}

} // namespace

void write_series(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::UnwritableOutput, path.string());
  const std::uint32_t version = 1, reserved = 0;
  const std::uint64_t n = series.size();
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  out.write(reinterpret_cast<const char*>(&n), 8);
  write_array(out, series.t);
  write_array(out, series.v_total);
  write_array(out, series.current);
  write_array(out, series.v_cell);
  write_array(out, series.temp);
  if (!out) throw Error(Errc::UnwritableOutput, path.string());
}

TimeSeries read_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingSeries, "cannot open " + path.string());
  char magic[8];
  std::uint32_t version = 0, reserved = 0;
  std::uint64_t n = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&reserved), 4);
  in.read(reinterpret_cast<char*>(&n), 8);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0 || version != 1)
    throw Error(Errc::MissingSeries, path.string() + " is not an esslog series file");
  TimeSeries s;
  read_array(in, s.t, n);
  read_array(in, s.v_total, n);
  read_array(in, s.current, n);
  read_array(in, s.v_cell, n * kCellCount);
  read_array(in, s.temp, n * kTempCount);
  if (!in) throw Error(Errc::MissingSeries, path.string() + " is truncated");
  return s;
}

std::string fnv1a_hex(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hash_file_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "0000000000000000";
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(content.data(), content.size());
}

void write_ingest_manifest(const std::filesystem::path& path, const TimeSeries& series,
                           const std::vector<Rejection>& rejections, const IngestReport& report,
                           const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["format"] = "esslog-series-manifest";
  j["version"] = 1;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = config_hash;
  j["rows"] = report.rows_merged;
  j["rows_parsed"] = report.rows_parsed;
  j["rows_rejected"] = report.rows_rejected;

  nlohmann::ordered_json sources = nlohmann::ordered_json::array();
  for (const auto& src : series.provenance)
    sources.push_back(
        {{"name", src.name}, {"rows", src.rows_parsed}, {"rejected", src.rows_rejected}});
  j["sources"] = std::move(sources);

  constexpr std::size_t kMaxDetailed = 1000;
  nlohmann::ordered_json rej = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rejections.size() && i < kMaxDetailed; ++i) {
    const Rejection& r = rejections[i];
    rej.push_back(
        {{"line", r.line}, {"field", r.field}, {"reason", r.reason}, {"detail", r.detail}});
  }
  j["rejections"] = std::move(rej);
  j["rejections_truncated"] = rejections.size() > kMaxDetailed;

  j["drift"] = {{"applied", report.drift_applied},
                {"reference_time", report.drift.reference_time},
                {"span_seconds", report.drift.span_seconds},
                {"total_shift_s", report.drift.total_shift},
                {"rate_s_per_day", report.drift.rate_s_per_day()},
                {"periodicity_score_raw", report.score_raw},
                {"periodicity_score_corrected", report.score_corrected}};

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::UnwritableOutput, path.string());
  out << j.dump(2) << '\n';
}

} // namespace esslog
