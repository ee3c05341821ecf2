#include <doctest.h>

#include "esslog/civil_time.hpp"
#include "esslog/model.hpp"
#include "esslog/synth.hpp"

using namespace esslog;

namespace {

RawRecord good_record() {
  RawRecord r;
  r.timestamp = 1476374400.0;
  r.timestamp_state = FieldState::Ok;
  r.values[0] = 48.1;
  for (int i = 0; i < kCellCount; ++i) r.values[1 + i] = 3.2;
  r.values[1 + kCellCount] = 5.0;
  r.values[2 + kCellCount + 0] = 20.0;
  r.values[2 + kCellCount + 1] = 21.0;
  r.values[2 + kCellCount + 2] = 20.0;
  r.values[2 + kCellCount + 3] = 22.0;
  r.states.fill(FieldState::Ok);
  return r;
}

} // namespace

TEST_CASE("validate_sample accepts a full plausible record") {
  const auto result = validate_sample(good_record());
  REQUIRE(std::holds_alternative<TelemetrySample>(result));
  const auto& s = std::get<TelemetrySample>(result);
  CHECK(s.v_total == doctest::Approx(48.1));
  CHECK(s.current == doctest::Approx(5.0));
  CHECK(s.temp[3] == doctest::Approx(22.0));
}

TEST_CASE("validate_sample rejects out-of-gate total voltage") {
  RawRecord r = good_record();
  r.values[0] = 500.0;
  const auto result = validate_sample(r);
  REQUIRE(std::holds_alternative<Rejection>(result));
  CHECK(std::get<Rejection>(result).reason == "OutOfPlausibleRange");
  CHECK(std::get<Rejection>(result).field == "V_tot");
}

TEST_CASE("validate_sample reports the missing field for short records") {
  RawRecord r = good_record();
  r.states[16] = FieldState::Missing; // 16th cell voltage absent
  const auto result = validate_sample(r);
  REQUIRE(std::holds_alternative<Rejection>(result));
  CHECK(std::get<Rejection>(result).reason == "MissingField");
  CHECK(std::get<Rejection>(result).field == "V16");
}

TEST_CASE("validate_sample flags malformed numerics and bad timestamps") {
  RawRecord r = good_record();
  r.states[1 + kCellCount] = FieldState::Malformed;
  auto result = validate_sample(r);
  REQUIRE(std::holds_alternative<Rejection>(result));
  CHECK(std::get<Rejection>(result).reason == "MalformedField");
  CHECK(std::get<Rejection>(result).field == "I");

  RawRecord r2 = good_record();
  r2.timestamp_state = FieldState::Missing;
  result = validate_sample(r2);
  REQUIRE(std::holds_alternative<Rejection>(result));
  CHECK(std::get<Rejection>(result).field == "time");
}

TEST_CASE("faulty cells inside the plausibility gate are ingested") {
  RawRecord r = good_record();
  r.values[3] = 0.967; // failed cell reading; must not be rejected
  const auto result = validate_sample(r);
  REQUIRE(std::holds_alternative<TelemetrySample>(result));
  CHECK(std::get<TelemetrySample>(result).v_cell[2] == doctest::Approx(0.967));
}

TEST_CASE("validate_sample is total over fuzzed records") {
  SplitMix64 rng(0xFEED);
  for (int trial = 0; trial < 500; ++trial) {
    RawRecord r;
    const double roll = rng.uniform();
    r.timestamp_state = roll < 0.1   ? FieldState::Missing
                        : roll < 0.2 ? FieldState::Malformed
                                     : FieldState::Ok;
    if (r.timestamp_state == FieldState::Ok) r.timestamp = rng.uniform(-1e10, 1e10);
    for (int f = 0; f < kValueFieldCount; ++f) {
      const double fr = rng.uniform();
      if (fr < 0.05) {
        r.states[f] = FieldState::Missing;
      } else if (fr < 0.1) {
        r.states[f] = FieldState::Malformed;
      } else {
        r.states[f] = FieldState::Ok;
        const double magnitude = rng.uniform();
        r.values[f] = magnitude < 0.9 ? rng.uniform(-10, 90) : rng.uniform(-1e30, 1e30);
      }
    }
    const auto result = validate_sample(r); // must not throw
    if (std::holds_alternative<Rejection>(result)) {
      const auto& rej = std::get<Rejection>(result);
      CHECK(!rej.field.empty());
      CHECK(!rej.reason.empty());
    }
  }
}

TEST_CASE("daily summary deltas are exact identities") {
  DailySummary d;
  d.c_chg_ah = 81.25;
  d.c_dis_ah = 65.0625;
  d.e_chg_kwh = 4.125;
  d.e_dis_kwh = 3.5;
  CHECK(d.delta_c_ah() == 81.25 - 65.0625);
  CHECK(d.delta_e_kwh() == 4.125 - 3.5);
}

TEST_CASE("probability histogram mass accounting") {
  ProbabilityHistogram h;
  h.bin_edges = {0.0, 1.0, 2.0};
  h.probabilities = {0.25, 0.5};
  h.underflow = 0.05;
  h.overflow = 0.2;
  CHECK(h.total_mass() == doctest::Approx(1.0));
  CHECK(h.mass_at_or_above(1.0) == doctest::Approx(0.7));
  CHECK(h.mass_at_or_above(2.0) == doctest::Approx(0.2));
}

TEST_CASE("time series round trips samples and checks monotonicity") {
  TimeSeries s;
  TelemetrySample a;
  a.timestamp = 10.0;
  a.current = -3.5f;
  a.v_cell[7] = 3.31f;
  TelemetrySample b = a;
  b.timestamp = 25.0;
  s.append(a);
  s.append(b);
  CHECK(s.size() == 2);
  CHECK(s.sample(0).v_cell[7] == doctest::Approx(3.31));
  CHECK(s.monotonic());
  TelemetrySample c = a; // duplicate timestamp breaks strict order
  s.append(c);
  CHECK(!s.monotonic());
}

TEST_CASE("civil time round trips and timestamp parsing") {
  CHECK(days_from_civil({1970, 1, 1}) == 0);
  CHECK(days_from_civil({2016, 10, 14}) == 17088);
  for (std::int64_t d : {-1000L, 0L, 17088L, 20000L}) {
    CHECK(days_from_civil(civil_from_days(d)) == d);
  }
  const auto ts = parse_timestamp("2016-10-14 08:30:15");
  REQUIRE(ts.has_value());
  CHECK(format_timestamp(*ts) == "2016-10-14 08:30:15");
  CHECK(parse_timestamp("2016-10-14 08:30:15.25").value() == doctest::Approx(*ts + 0.25));
  CHECK(!parse_timestamp("2016-13-14 08:30:15").has_value());
  CHECK(!parse_timestamp("garbage").has_value());
  CHECK(!parse_date("2021-02-29").has_value());

  // Day boundaries at the +8 site zone: local midnight is 16:00 UTC.
  const double midnight_utc8 = *parse_timestamp("2016-10-13 16:00:00");
  CHECK(local_day_index(midnight_utc8, 8.0) == 17088);
  CHECK(local_day_index(midnight_utc8 - 1.0, 8.0) == 17087);
}
