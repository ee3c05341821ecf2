#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "esslog/model.hpp"
#include "esslog/synth.hpp"

namespace testutil {

/// Independent fine-step quadrature oracle: midpoint Riemann sums of the
/// positive/negative parts of I and I*V over [a, b]. Used to check the
/// trapezoid accumulation path; shares no code with it.
struct SplitOracle {
  double charge_ah = 0.0;
  double discharge_ah = 0.0;
  double charge_kwh = 0.0;
  double discharge_kwh = 0.0;
};

inline SplitOracle riemann_split(const std::function<double(double)>& current,
                                 const std::function<double(double)>& voltage, double a, double b,
                                 double step = 0.01) {
  SplitOracle o;
  const long n = std::lround((b - a) / step);
  const double h = (b - a) / static_cast<double>(n);
  for (long k = 0; k < n; ++k) {
    const double t = a + (static_cast<double>(k) + 0.5) * h;
    const double i = current(t);
    const double p = i * voltage(t);
    if (i >= 0) {
      o.charge_ah += i * h;
      o.charge_kwh += p * h;
    } else {
      o.discharge_ah -= i * h;
      o.discharge_kwh -= p * h;
    }
  }
  o.charge_ah /= 3600.0;
  o.discharge_ah /= 3600.0;
  o.charge_kwh /= 3.6e6;
  o.discharge_kwh /= 3.6e6;
  return o;
}

/// Exact positive/negative-part integrals of a piecewise-linear function,
/// derived from antiderivatives (independent of the implementation's
/// zero-crossing split formula): uses max(f,0) = (f + |f|) / 2 and the exact
/// integral of |f| over a linear segment.
struct LinearSplitOracle {
  double positive = 0.0; //!< unit * seconds
  double negative = 0.0;
};

inline LinearSplitOracle linear_split_exact(const std::vector<double>& t,
                                            const std::vector<double>& f) {
  LinearSplitOracle o;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double h = t[i] - t[i - 1];
    const double a = f[i - 1], b = f[i];
    const double signed_part = 0.5 * h * (a + b);
    double abs_part;
    if (a * b >= 0) {
      abs_part = 0.5 * h * (std::fabs(a) + std::fabs(b));
    } else {
      abs_part = 0.5 * h * (a * a + b * b) / std::fabs(a - b);
    }
    o.positive += 0.5 * (abs_part + signed_part);
    o.negative += 0.5 * (abs_part - signed_part);
  }
  return o;
}

/// Builds a series from parallel vectors; cells mirror v_total/16, temps a
/// fixed mild spread unless given.
inline esslog::TimeSeries make_series(const std::vector<double>& t, const std::vector<double>& i,
                                      const std::vector<double>& v) {
  esslog::TimeSeries s;
  s.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    esslog::TelemetrySample smp;
    smp.timestamp = t[k];
    smp.current = static_cast<float>(i[k]);
    smp.v_total = static_cast<float>(v.empty() ? 52.0 : v[k]);
    for (auto& c : smp.v_cell) c = smp.v_total / 16.0f;
    smp.temp = {20.0f, 21.0f, 21.5f, 22.0f};
    s.append(smp);
  }
  return s;
}

/// Unique scratch directory under the system temp root, removed on
/// destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    base_ = std::filesystem::temp_directory_path() /
            ("esslog_test_" + tag + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  const std::filesystem::path& path() const { return base_; }

private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path base_;
};

/// Local-midnight epoch of a civil date at the given zone offset.
inline double day_start_epoch(const esslog::CivilDate& d, double tz_hours) {
  return static_cast<double>(esslog::days_from_civil(d)) * esslog::kSecondsPerDay -
         tz_hours * 3600.0;
}

} // namespace testutil
