#pragma once

#include "exactmppi/world.hpp"

namespace exactmppi {

/// Corridor with a pinch sized so compute_don(scenario, footprint) == don.
/// Up to don ~0.9 the pinch is a straight gap; tighter settings stagger the
/// two pinch blocks so the passage becomes a diagonal weave between their
/// corners (straight lines are blocked and a convex body cannot fit between
/// the corner pair, while a concave footprint can thread it).
Scenario make_corridor_scenario(const FootprintSpec& footprint, double don, std::uint64_t seed);

/// Omni gap scene: two offset wall segments whose nearest corners are
/// exactly W_r/don apart. The declared gap joins those corners.
Scenario make_gap_scenario(const FootprintSpec& footprint, double don, std::uint64_t seed);

/// Hybrid trap: dead-end pocket too narrow to turn in, with a side slot that
/// only lateral (parallel-mode) motion can cross; the goal chamber is sealed
/// otherwise.
Scenario make_trap_scenario(std::uint64_t seed, bool ackermann_only = false);

}  // namespace exactmppi
