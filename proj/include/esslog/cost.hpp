#pragma once

#include <optional>
#include <string>
#include <vector>

#include "esslog/model.hpp"

namespace esslog {

/// Cumulative cost ladder; cumulative_usd[y-1] is the total spent through
/// year y. Replacements land at the start of year k*service_life + 1, so the
/// curve is a non-decreasing step function.
struct CostCurve {
  std::string name;
  std::vector<double> cumulative_usd;

  int horizon_years() const { return static_cast<int>(cumulative_usd.size()); }
  double at_year(int year) const { return cumulative_usd.at(static_cast<std::size_t>(year) - 1); }
};

/// Purchase price of one battery system: price per kWh times pack energy.
double battery_cost(const CostScenario& s);

/// Transport cost per purchase: price per kg times pack mass, doubled for
/// carrying the new unit up and the old unit down. Zero when the scenario
/// excludes moving cost.
double moving_cost(const CostScenario& s);

/// Ladder over the horizon: at year y the system has been bought
/// ceil(y / service_life) times.
CostCurve cumulative_cost_curve(const CostScenario& s, int horizon_years);

struct Crossover {
  int year = 0;
  bool immediate = false; //!< b was already at or below a at year 1
};

/// Smallest year where curve a becomes strictly costlier than curve b; nullopt
/// when no crossing happens within the horizon. When b is strictly cheaper
/// already at year 1 the crossover is year 1, flagged immediate.
/// Throws Error(MismatchedHorizon) when the curves differ in length.
std::optional<Crossover> crossover_year(const CostCurve& a, const CostCurve& b);

} // namespace esslog
