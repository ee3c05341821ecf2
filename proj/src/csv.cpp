#include "esslog/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "esslog/error.hpp"

namespace esslog {

std::string expected_csv_header() {
  std::string h = "time";
  for (const auto& name : value_field_names()) {
    h += ',';
    h += name;
  }
  return h;
}

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool header_matches(std::string_view line) {
  // Token-wise comparison, tolerant of surrounding whitespace and a BOM.
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
    line.remove_prefix(3);
  const auto& names = value_field_names();
  std::size_t field = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    const std::string_view token =
        trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
    if (field == 0) {
      if (token != "time") return false;
    } else {
      if (field > names.size() || token != names[field - 1]) return false;
    }
    ++field;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return field == names.size() + 1;
}

} // namespace

ParsedFile parse_bms_csv(std::string_view content, const std::string& name,
                         const ParseOptions& options) {
  ParsedFile out;
  out.name = name;

  if (trim(strip_cr(content)).empty()) throw Error(Errc::EmptyFile, name + " has no content");

  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_header = false;

  while (pos <= content.size()) {
    const std::size_t eol = content.find('\n', pos);
    std::string_view line = content.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
    ++line_no;
    line = strip_cr(line);
    if (trim(line).empty()) continue;

    if (!saw_header) {
      if (!header_matches(line))
        throw Error(Errc::UnreadableHeader, name + ": header row does not match schema");
      saw_header = true;
      continue;
    }

    ++out.rows_total;
    RawRecord raw;
    std::size_t field = 0;
    std::size_t cursor = 0;
    bool too_many = false;
    while (cursor <= line.size()) {
      const std::size_t comma = line.find(',', cursor);
      const std::string_view token =
          line.substr(cursor, comma == std::string_view::npos ? comma : comma - cursor);
      if (field == 0) {
        auto ts = parse_timestamp(trim(token));
        raw.timestamp = ts;
        raw.timestamp_state = trim(token).empty() ? FieldState::Missing
                              : ts                ? FieldState::Ok
                                                  : FieldState::Malformed;
      } else if (field <= static_cast<std::size_t>(kValueFieldCount)) {
        double v = 0.0;
        if (trim(token).empty()) {
          raw.states[field - 1] = FieldState::Missing;
        } else if (parse_double(token, v)) {
          raw.values[field - 1] = v;
          raw.states[field - 1] = FieldState::Ok;
        } else {
          raw.states[field - 1] = FieldState::Malformed;
        }
      } else {
        too_many = true;
      }
      ++field;
      if (comma == std::string_view::npos) break;
      cursor = comma + 1;
    }

    if (too_many) {
      Rejection r;
      r.line = line_no;
      r.field = "(row)";
      r.reason = "MalformedField";
      r.detail = "more than " + std::to_string(kValueFieldCount + 1) + " columns";
      out.rejections.push_back(std::move(r));
      continue;
    }

    auto result = validate_sample(raw);
    if (std::holds_alternative<TelemetrySample>(result)) {
      TelemetrySample s = std::get<TelemetrySample>(result);
      if (options.flip_current) s.current = -s.current;
      out.samples.push_back(s);
    } else {
      Rejection r = std::get<Rejection>(std::move(result));
      r.line = line_no;
      out.rejections.push_back(std::move(r));
    }
  }

  if (!saw_header) throw Error(Errc::UnreadableHeader, name + ": no header row");
  return out;
}

ParsedFile parse_bms_csv_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::EmptyFile, "cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_bms_csv(content, path.filename().string(), options);
}

TimeSeries merge_series(std::vector<ParsedFile> batches) {
  // Deterministic regardless of input batch order: batches are processed in
  // file-name order, then stable-sorted by timestamp.
  std::sort(batches.begin(), batches.end(),
            [](const ParsedFile& a, const ParsedFile& b) { return a.name < b.name; });

  std::size_t total = 0;
  for (const auto& b : batches) total += b.samples.size();

  std::vector<const TelemetrySample*> rows;
  rows.reserve(total);
  for (const auto& b : batches)
    for (const auto& s : b.samples) rows.push_back(&s);

  std::stable_sort(rows.begin(), rows.end(),
                   [](const TelemetrySample* a, const TelemetrySample* b) {
                     return a->timestamp < b->timestamp;
                   });

  TimeSeries series;
  series.reserve(total);
  double last_t = 0.0;
  bool have_last = false;
  for (const TelemetrySample* s : rows) {
    if (have_last && s->timestamp == last_t) continue; // keep first duplicate
    series.append(*s);
    last_t = s->timestamp;
    have_last = true;
  }

  series.provenance.reserve(batches.size());
  for (const auto& b : batches)
    series.provenance.push_back({b.name, b.samples.size(), b.rejections.size()});
  return series;
}

namespace {

void append_fixed(std::string& out, double value, int decimals) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  out.append(buf, ptr);
  (void)ec;
}

} // namespace

void append_csv_row(std::string& out, const TelemetrySample& s) {
  out += format_timestamp(s.timestamp);
  out += ',';
  append_fixed(out, s.v_total, 3);
  for (float v : s.v_cell) {
    out += ',';
    append_fixed(out, v, 3);
  }
  out += ',';
  append_fixed(out, s.current, 3);
  for (float t : s.temp) {
    out += ',';
    append_fixed(out, t, 2);
  }
  out += '\n';
}

} // namespace esslog
