#pragma once

#include <string>

#include "swarm/trace.hpp"

namespace swarm {

struct RenderOptions {
  double pixels_per_meter = 40.0;
  double margin = 20.0;  // px
  bool show_estimates = false;
};

/// Standalone SVG: arena outline, zone, final cubes and one true-path polyline per robot.
std::string render_svg(const ParsedTrace& trace, const RenderOptions& options = {});

}  // namespace swarm
