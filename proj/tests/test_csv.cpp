#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "esslog/csv.hpp"
#include "esslog/error.hpp"
#include "esslog/synth.hpp"
#include "helpers.hpp"

using namespace esslog;

namespace {

std::string make_row(const std::string& ts, double v, double i) {
  std::string row = ts + "," + std::to_string(v);
  for (int c = 0; c < kCellCount; ++c) row += "," + std::to_string(v / 16.0);
  row += "," + std::to_string(i);
  row += ",20.0,20.5,21.0,21.5";
  return row;
}

std::string small_file(int rows, int corrupt_at = -1) {
  std::string content = expected_csv_header() + "\n";
  for (int r = 0; r < rows; ++r) {
    char ts[32];
    std::snprintf(ts, sizeof ts, "2017-03-01 00:%02d:%02d", (r * 15) / 60, (r * 15) % 60);
    if (r == corrupt_at)
      content += std::string(ts) + ",not_a_number,oops\n";
    else
      content += make_row(ts, 52.0 + 0.01 * r, r % 2 ? 5.0 : -5.0) + "\n";
  }
  return content;
}

} // namespace

TEST_CASE("well-formed file parses with an empty rejection log") {
  const auto parsed = parse_bms_csv(small_file(3), "day1.csv");
  CHECK(parsed.samples.size() == 3);
  CHECK(parsed.rejections.empty());
  CHECK(parsed.rows_total == 3);
  CHECK(parsed.samples[1].current == doctest::Approx(5.0));
}

TEST_CASE("one corrupt line is logged with its line number, others survive") {
  const auto parsed = parse_bms_csv(small_file(60, 41), "day2.csv");
  CHECK(parsed.samples.size() == 59);
  REQUIRE(parsed.rejections.size() == 1);
  CHECK(parsed.rejections[0].line == 43); // header is line 1, row r at line r+2
  CHECK(parsed.rejections[0].reason == "MalformedField");
}

TEST_CASE("header and emptiness errors are typed") {
  CHECK_THROWS_AS(parse_bms_csv("", "e.csv"), Error);
  CHECK_THROWS_AS(parse_bms_csv("   \n  \n", "w.csv"), Error);
  try {
    parse_bms_csv("time,V_tot,bogus\n1,2,3\n", "h.csv");
    FAIL("expected UnreadableHeader");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnreadableHeader);
  }
}

TEST_CASE("carriage returns and blank lines are tolerated") {
  std::string content = expected_csv_header() + "\r\n";
  content += make_row("2017-03-01 10:00:00", 52.0, 4.0) + "\r\n\r\n";
  const auto parsed = parse_bms_csv(content, "crlf.csv");
  CHECK(parsed.samples.size() == 1);
}

TEST_CASE("flip-current negates the sign convention at ingest") {
  ParseOptions flip;
  flip.flip_current = true;
  const auto parsed = parse_bms_csv(small_file(2), "f.csv", flip);
  CHECK(parsed.samples[0].current == doctest::Approx(5.0));  // row 0 was -5
  CHECK(parsed.samples[1].current == doctest::Approx(-5.0)); // row 1 was +5
}

TEST_CASE("too many columns is a malformed row, not a crash") {
  std::string content = expected_csv_header() + "\n";
  content += make_row("2017-03-01 10:00:00", 52.0, 4.0) + ",99\n";
  const auto parsed = parse_bms_csv(content, "wide.csv");
  CHECK(parsed.samples.empty());
  REQUIRE(parsed.rejections.size() == 1);
  CHECK(parsed.rejections[0].reason == "MalformedField");
}

TEST_CASE("merge sorts out-of-order batches and drops exact duplicate timestamps") {
  ParsedFile day2;
  day2.name = "b.csv";
  ParsedFile day1;
  day1.name = "a.csv";
  TelemetrySample s;
  s.timestamp = 200.0;
  s.current = 2.0f;
  day2.samples.push_back(s);
  s.timestamp = 100.0;
  s.current = 1.0f;
  day1.samples.push_back(s);
  s.timestamp = 200.0; // duplicated boundary row, later file name
  s.current = 99.0f;
  day1.samples.push_back(s);

  // batch order must not matter
  auto merged = merge_series({day2, day1});
  REQUIRE(merged.size() == 2);
  CHECK(merged.t[0] == 100.0);
  CHECK(merged.t[1] == 200.0);
  // "a.csv" sorts first, so its value wins the duplicate slot
  CHECK(merged.current[1] == doctest::Approx(99.0));

  auto merged2 = merge_series({day1, day2});
  CHECK(merged2.t == merged.t);
  CHECK(merged2.current == merged.current);
}

TEST_CASE("merge output is independent of partitioning (sorted oracle)") {
  // One deterministic pool of rows partitioned two different ways must give
  // identical series.
  SplitMix64 rng(0xBEEF);
  std::vector<TelemetrySample> rows(500);
  double t = 0.0;
  for (auto& r : rows) {
    t += rng.uniform(1.0, 30.0);
    r.timestamp = t;
    r.current = static_cast<float>(rng.uniform(-10, 10));
    r.v_total = 52.0f;
  }

  auto partition = [&](int batches, std::uint64_t seed) {
    std::vector<ParsedFile> files(static_cast<std::size_t>(batches));
    for (int b = 0; b < batches; ++b)
      files[static_cast<std::size_t>(b)].name = "f" + std::to_string(b) + ".csv";
    SplitMix64 pick(seed);
    for (const auto& r : rows)
      files[static_cast<std::size_t>(pick.next() % static_cast<std::uint64_t>(batches))]
          .samples.push_back(r);
    // shuffle batch order
    for (std::size_t i = files.size(); i > 1; --i)
      std::swap(files[i - 1], files[pick.next() % i]);
    return files;
  };

  // Oracle: single-threaded sort of the raw rows.
  std::vector<TelemetrySample> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TelemetrySample& a, const TelemetrySample& b) {
                     return a.timestamp < b.timestamp;
                   });

  const auto a = merge_series(partition(100, 1));
  const auto b = merge_series(partition(7, 2));
  REQUIRE(a.size() == sorted.size());
  REQUIRE(b.size() == sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    CHECK(a.t[i] == sorted[i].timestamp);
    CHECK(b.t[i] == sorted[i].timestamp);
    CHECK(a.current[i] == b.current[i]);
  }
}

TEST_CASE("csv row emission round trips through the parser") {
  TelemetrySample s;
  s.timestamp = *parse_timestamp("2018-06-01 12:34:56");
  s.v_total = 53.125f;
  for (int c = 0; c < kCellCount; ++c) s.v_cell[c] = 3.321f;
  s.current = -4.875f;
  s.temp = {18.25f, 19.5f, 20.75f, 21.0f};

  std::string content = expected_csv_header() + "\n";
  append_csv_row(content, s);
  const auto parsed = parse_bms_csv(content, "rt.csv");
  REQUIRE(parsed.samples.size() == 1);
  const auto& r = parsed.samples[0];
  CHECK(r.timestamp == s.timestamp);
  CHECK(r.v_total == doctest::Approx(s.v_total).epsilon(1e-6));
  CHECK(r.current == doctest::Approx(s.current).epsilon(1e-6));
  CHECK(r.temp[2] == doctest::Approx(s.temp[2]).epsilon(1e-6));
}
