#include "esslog/model.hpp"

#include <cmath>

#include "esslog/error.hpp"

namespace esslog {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MalformedField: return "MalformedField";
    case Errc::OutOfPlausibleRange: return "OutOfPlausibleRange";
    case Errc::MissingField: return "MissingField";
    case Errc::UnreadableHeader: return "UnreadableHeader";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::SpanTooShort: return "SpanTooShort";
    case Errc::NonMonotonicResult: return "NonMonotonicResult";
    case Errc::NonMonotonicTime: return "NonMonotonicTime";
    case Errc::EmptyInterval: return "EmptyInterval";
    case Errc::ZeroCharge: return "ZeroCharge";
    case Errc::ZeroMean: return "ZeroMean";
    case Errc::NoFiniteWeights: return "NoFiniteWeights";
    case Errc::SocOutOfRange: return "SocOutOfRange";
    case Errc::MismatchedHorizon: return "MismatchedHorizon";
    case Errc::NoInputFiles: return "NoInputFiles";
    case Errc::UnwritableOutput: return "UnwritableOutput";
    case Errc::MissingSeries: return "MissingSeries";
    case Errc::BadScenario: return "BadScenario";
    case Errc::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

const std::array<std::string, kValueFieldCount>& value_field_names() {
  static const std::array<std::string, kValueFieldCount> names = [] {
    std::array<std::string, kValueFieldCount> n;
    n[0] = "V_tot";
    for (int i = 0; i < kCellCount; ++i) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "V%02d", i + 1);
      n[1 + i] = buf;
    }
    n[1 + kCellCount] = "I";
    for (int i = 0; i < kTempCount; ++i) n[2 + kCellCount + i] = "T" + std::to_string(i + 1);
    return n;
  }();
  return names;
}

namespace {

Rejection reject(const std::string& field, const char* reason, std::string detail) {
  Rejection r;
  r.field = field;
  r.reason = reason;
  r.detail = std::move(detail);
  return r;
}

} // namespace

std::variant<TelemetrySample, Rejection> validate_sample(const RawRecord& raw) {
  const auto& names = value_field_names();

  if (raw.timestamp_state == FieldState::Missing)
    return reject("time", "MissingField", "no timestamp");
  if (raw.timestamp_state == FieldState::Malformed || !raw.timestamp)
    return reject("time", "MalformedField", "unparsable timestamp");

  for (int i = 0; i < kValueFieldCount; ++i) {
    if (raw.states[i] == FieldState::Missing)
      return reject(names[i], "MissingField", "field absent");
    if (raw.states[i] == FieldState::Malformed)
      return reject(names[i], "MalformedField", "not numeric");
    if (!std::isfinite(raw.values[i]))
      return reject(names[i], "OutOfPlausibleRange", "non-finite value");
  }

  const double v_tot = raw.values[0];
  if (v_tot < 0.0 || v_tot > kMaxPlausibleTotalVolts)
    return reject(names[0], "OutOfPlausibleRange",
                  "V_tot " + std::to_string(v_tot) + " outside [0, 80] V");
  for (int i = 0; i < kCellCount; ++i) {
    const double v = raw.values[1 + i];
    if (v < 0.0 || v > kMaxPlausibleCellVolts)
      return reject(names[1 + i], "OutOfPlausibleRange",
                    "cell voltage " + std::to_string(v) + " outside [0, 5] V");
  }

  TelemetrySample s;
  s.timestamp = *raw.timestamp;
  s.v_total = static_cast<float>(v_tot);
  for (int i = 0; i < kCellCount; ++i) s.v_cell[i] = static_cast<float>(raw.values[1 + i]);
  s.current = static_cast<float>(raw.values[1 + kCellCount]);
  for (int i = 0; i < kTempCount; ++i)
    s.temp[i] = static_cast<float>(raw.values[2 + kCellCount + i]);
  return s;
}

void TimeSeries::reserve(std::size_t n) {
  t.reserve(n);
  v_total.reserve(n);
  current.reserve(n);
  v_cell.reserve(n * kCellCount);
  temp.reserve(n * kTempCount);
}

void TimeSeries::append(const TelemetrySample& s) {
  t.push_back(s.timestamp);
  v_total.push_back(s.v_total);
  current.push_back(s.current);
  v_cell.insert(v_cell.end(), s.v_cell.begin(), s.v_cell.end());
  temp.insert(temp.end(), s.temp.begin(), s.temp.end());
}

TelemetrySample TimeSeries::sample(std::size_t i) const {
  TelemetrySample s;
  s.timestamp = t[i];
  s.v_total = v_total[i];
  s.current = current[i];
  for (int c = 0; c < kCellCount; ++c) s.v_cell[c] = v_cell[i * kCellCount + c];
  for (int c = 0; c < kTempCount; ++c) s.temp[c] = temp[i * kTempCount + c];
  return s;
}

bool TimeSeries::monotonic() const {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) return false;
  return true;
}

const char* to_string(DayPattern p) {
  switch (p) {
    case DayPattern::P1: return "P1";
    case DayPattern::P2: return "P2";
    case DayPattern::P3: return "P3";
    case DayPattern::P4: return "P4";
    case DayPattern::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

const char* to_string(SolarLevel s) {
  switch (s) {
    case SolarLevel::High: return "High";
    case SolarLevel::Medium: return "Medium";
    case SolarLevel::Low: return "Low";
  }
  return "Low";
}

std::optional<DayPattern> pattern_from_string(std::string_view s) {
  if (s == "P1") return DayPattern::P1;
  if (s == "P2") return DayPattern::P2;
  if (s == "P3") return DayPattern::P3;
  if (s == "P4") return DayPattern::P4;
  if (s == "Unclassified") return DayPattern::Unclassified;
  return std::nullopt;
}

double ProbabilityHistogram::total_mass() const {
  double m = underflow + overflow;
  for (double p : probabilities) m += p;
  return m;
}

double ProbabilityHistogram::mass_at_or_above(double value) const {
  double m = overflow;
  for (std::size_t b = 0; b < probabilities.size(); ++b) {
    if (bin_edges[b] >= value) m += probabilities[b];
  }
  return m;
}

} // namespace esslog
