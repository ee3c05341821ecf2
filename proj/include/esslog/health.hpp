#pragma once

namespace esslog {

/// Reference fade point: cycle life at which the pack reaches its end-of-life
/// capacity fraction.
struct FadeReference {
  double cycle_life = 2000.0;
  double eol_capacity_pct = 80.0;

  bool valid() const { return cycle_life > 0 && eol_capacity_pct > 0 && eol_capacity_pct < 100; }
};

struct CapacityEstimate {
  double remaining_pct = 100.0;
  bool beyond_reference = false; //!< cycles exceeded the reference cycle life
};

/// Linear fade between fresh (100%) and the EOL reference, floored at 0.
/// The minimal-assumption model: the reference gives one anchor point and
/// no curvature information.
CapacityEstimate estimate_remaining_capacity(double cycles, const FadeReference& ref = {});

} // namespace esslog
