#pragma once

#include <string>

#include "exactmppi/world.hpp"

namespace exactmppi {

/// Scenario plot: obstacles, guidance, executed trajectory, and footprint
/// outlines sampled every `outline_interval` seconds of sim time.
std::string scenario_svg(const Scenario& scenario, const EpisodeResult* result,
                         double outline_interval = 0.5);

/// Signed-distance heatmap with the zero level set overlaid.
std::string sdf_svg(const FootprintSpec& footprint, const SdfGrid& grid);

}  // namespace exactmppi
