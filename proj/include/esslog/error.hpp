#pragma once

#include <stdexcept>
#include <string>

namespace esslog {

enum class Errc {
  MalformedField,
  OutOfPlausibleRange,
  MissingField,
  UnreadableHeader,
  EmptyFile,
  DegenerateVariance,
  SpanTooShort,
  NonMonotonicResult,
  NonMonotonicTime,
  EmptyInterval,
  ZeroCharge,
  ZeroMean,
  NoFiniteWeights,
  SocOutOfRange,
  MismatchedHorizon,
  NoInputFiles,
  UnwritableOutput,
  MissingSeries,
  BadScenario,
  BadConfig,
};

const char* errc_name(Errc code);

/// Exception carrying a typed error code; thrown on contract violations.
/// Row-level ingest problems are reported as Rejection values, not thrown.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace esslog
