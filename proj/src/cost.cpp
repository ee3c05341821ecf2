#include "esslog/cost.hpp"

#include "esslog/error.hpp"

namespace esslog {

double battery_cost(const CostScenario& s) {
  if (!s.valid()) throw Error(Errc::BadScenario, "invalid cost scenario '" + s.name + "'");
  return s.battery_price_usd_per_kwh * s.pack_energy_kwh;
}

double moving_cost(const CostScenario& s) {
  if (!s.valid()) throw Error(Errc::BadScenario, "invalid cost scenario '" + s.name + "'");
  if (!s.include_moving) return 0.0;
  return s.moving_price_usd_per_kg * (2.0 * s.pack_energy_kwh / s.energy_density_kwh_per_kg);
}

CostCurve cumulative_cost_curve(const CostScenario& s, int horizon_years) {
  if (horizon_years < 1) throw Error(Errc::BadScenario, "horizon must be at least one year");
  const double per_purchase = battery_cost(s) + moving_cost(s);
  CostCurve curve;
  curve.name = s.name;
  curve.cumulative_usd.reserve(static_cast<std::size_t>(horizon_years));
  for (int y = 1; y <= horizon_years; ++y) {
    const int purchases = (y + s.service_life_years - 1) / s.service_life_years; // ceil
    curve.cumulative_usd.push_back(purchases * per_purchase);
  }
  return curve;
}

std::optional<Crossover> crossover_year(const CostCurve& a, const CostCurve& b) {
  if (a.cumulative_usd.size() != b.cumulative_usd.size() || a.cumulative_usd.empty())
    throw Error(Errc::MismatchedHorizon, "curves must share the same non-empty horizon");
  if (b.cumulative_usd[0] < a.cumulative_usd[0]) return Crossover{1, true};
  for (std::size_t i = 0; i < a.cumulative_usd.size(); ++i) {
    if (a.cumulative_usd[i] > b.cumulative_usd[i])
      return Crossover{static_cast<int>(i) + 1, false};
  }
  return std::nullopt;
}

} // namespace esslog
