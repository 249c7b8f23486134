#include "swarm/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "swarm/errors.hpp"

namespace swarm {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPickup: return "PICKUP";
    case EventKind::kDrop: return "DROP";
    case EventKind::kPushOut: return "PUSH_OUT";
    case EventKind::kPushIn: return "PUSH_IN";
  }
  return "?";
}

TraceWriter::TraceWriter(std::ostream& out, const TraceMeta& meta) : out_(out) {
  out_ << fmt::format("# arena_side={:.3f}\n# zone_side={:.3f}\n# robots={}\n", meta.arena_side, meta.zone_side,
                      meta.robots);
  out_ << kTraceHeader << '\n';
}

void TraceWriter::robot_row(std::int64_t tick, double time, int robot_id, const Pose& truth, const Pose& estimate,
                            const std::string& mode, bool carrying, int score) {
  out_ << fmt::format("{},{:.1f},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{}\n", tick, time, robot_id,
                      truth.x, truth.y, truth.theta, estimate.x, estimate.y, estimate.theta, mode, carrying ? 1 : 0,
                      score);
}

// Event rows reuse the columns: position in true_x/true_y, the acting robot in est_x, the
// event name in mode and the cube id in carrying.
void TraceWriter::event_row(std::int64_t tick, double time, const WorldEvent& event, int score) {
  out_ << fmt::format("{},{:.1f},{},{:.6f},{:.6f},,{},,,{},{},{}\n", tick, time, kEventRobotId, event.position.x,
                      event.position.y, event.robot_id, to_string(event.kind), event.cube_id, score);
}

void TraceWriter::cube_row(std::int64_t tick, double time, int cube_id, Vec2 position, bool banked, int score) {
  out_ << fmt::format("{},{:.1f},{},{:.6f},{:.6f},,-1,,,{},{},{}\n", tick, time, kEventRobotId, position.x,
                      position.y, banked ? "CUBE_BANKED" : "CUBE", cube_id, score);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double num(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("trace line {}: bad number '{}'", line_no, s));
  }
}

}  // namespace

ParsedTrace parse_trace(std::istream& in) {
  ParsedTrace trace;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "arena_side") trace.meta.arena_side = num(value, line_no);
      if (key == "zone_side") trace.meta.zone_side = num(value, line_no);
      if (key == "robots") trace.meta.robots = static_cast<int>(num(value, line_no));
      continue;
    }
    if (!header) {
      if (line != kTraceHeader) throw ConfigError(fmt::format("trace line {}: missing header row", line_no));
      header = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 12) throw ConfigError(fmt::format("trace line {}: expected 12 fields, got {}", line_no, f.size()));
    const auto tick = static_cast<std::int64_t>(num(f[0], line_no));
    const int robot_id = static_cast<int>(num(f[2], line_no));
    const int score = static_cast<int>(num(f[11], line_no));
    if (robot_id == kEventRobotId) {
      TraceEvent e{tick, f[9], static_cast<int>(num(f[6], line_no)), static_cast<int>(num(f[10], line_no)),
                   {num(f[3], line_no), num(f[4], line_no)}, score};
      (e.kind.rfind("CUBE", 0) == 0 ? trace.final_cubes : trace.events).push_back(e);
      continue;
    }
    TraceSample s;
    s.tick = tick;
    s.truth = {num(f[3], line_no), num(f[4], line_no), num(f[5], line_no)};
    s.estimate = {num(f[6], line_no), num(f[7], line_no), num(f[8], line_no)};
    s.mode = f[9];
    s.score = score;
    trace.robots[robot_id].push_back(s);
  }
  return trace;
}

}  // namespace swarm
