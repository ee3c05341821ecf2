#include "esslog/health.hpp"

#include <algorithm>

#include "esslog/error.hpp"

namespace esslog {

CapacityEstimate estimate_remaining_capacity(double cycles, const FadeReference& ref) {
  if (!ref.valid()) throw Error(Errc::BadScenario, "invalid fade reference");
  if (cycles < 0) throw Error(Errc::BadScenario, "cycle count must be non-negative");
  CapacityEstimate e;
  const double fade = (100.0 - ref.eol_capacity_pct) * (cycles / ref.cycle_life);
  e.remaining_pct = std::max(0.0, 100.0 - fade);
  e.beyond_reference = cycles > ref.cycle_life;
  return e;
}

} // namespace esslog
