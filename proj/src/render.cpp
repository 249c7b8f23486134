#include "swarm/render.hpp"

#include <array>

#include <fmt/format.h>

namespace swarm {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const ParsedTrace& trace, const RenderOptions& options) {
  const double s = options.pixels_per_meter;
  const double half = 0.5 * trace.meta.arena_side;
  const double size = trace.meta.arena_side * s + 2.0 * options.margin;
  auto px = [&](double x) { return options.margin + (x + half) * s; };
  auto py = [&](double y) { return options.margin + (half - y) * s; };

  std::string out;
  out += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{0:.0f}\" viewBox=\"0 0 {0:.0f} {0:.0f}\">\n",
      size);
  out += fmt::format("  <rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"white\" "
                     "stroke=\"black\" stroke-width=\"2\"/>\n",
                     px(-half), py(half), 2.0 * half * s, 2.0 * half * s);
  if (!trace.robots.empty() || !trace.final_cubes.empty()) {
    const double z = 0.5 * trace.meta.zone_side;
    out += fmt::format("  <rect class=\"zone\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                       "fill=\"#fff3c4\" stroke=\"#b8860b\" stroke-width=\"1.5\"/>\n",
                       px(-z), py(z), 2.0 * z * s, 2.0 * z * s);
  }
  for (const auto& c : trace.final_cubes) {
    out += fmt::format("  <circle class=\"cube\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\"/>\n",
                       px(c.position.x), py(c.position.y), std::max(1.5, 0.035 * s),
                       c.kind == "CUBE_BANKED" ? "#2ca02c" : "#555555");
  }
  for (const auto& [id, samples] : trace.robots) {
    const char* color = kPalette[static_cast<std::size_t>(id) % kPalette.size()];
    std::string points;
    for (const auto& p : samples) {
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", px(p.truth.x), py(p.truth.y));
    }
    out += fmt::format("  <polyline class=\"robot\" data-robot=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
                       "stroke-width=\"1.2\" stroke-opacity=\"0.8\"/>\n",
                       id, points, color);
    if (options.show_estimates) {
      std::string est;
      for (const auto& p : samples) {
        if (!est.empty()) est += ' ';
        est += fmt::format("{:.2f},{:.2f}", px(p.estimate.x), py(p.estimate.y));
      }
      out += fmt::format("  <polyline class=\"estimate\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
                         "stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>\n",
                         est, color);
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace swarm
