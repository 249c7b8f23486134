#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "swarm/geometry.hpp"
#include "swarm/world.hpp"

namespace swarm {

/// Robot id written on event rows.
inline constexpr int kEventRobotId = -1;

inline constexpr const char* kTraceHeader =
    "tick,time_s,robot_id,true_x,true_y,true_theta,est_x,est_y,est_theta,mode,carrying,score";

struct TraceMeta {
  double arena_side = 15.0;
  double zone_side = 1.0;
  int robots = 0;
};

/// Streams a round trace as CSV. Every number uses fixed precision so traces diff cleanly.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, const TraceMeta& meta);

  void robot_row(std::int64_t tick, double time, int robot_id, const Pose& truth, const Pose& estimate,
                 const std::string& mode, bool carrying, int score);
  void event_row(std::int64_t tick, double time, const WorldEvent& event, int score);
  /// Final resting place of a cube; `banked` marks cubes that score.
  void cube_row(std::int64_t tick, double time, int cube_id, Vec2 position, bool banked, int score);

 private:
  std::ostream& out_;
};

std::string to_string(EventKind kind);

struct TraceEvent {
  std::int64_t tick = 0;
  std::string kind;
  int actor = -1;
  int cube_id = -1;
  Vec2 position;
  int score = 0;
};

struct TraceSample {
  std::int64_t tick = 0;
  Pose truth;
  Pose estimate;
  std::string mode;
  int score = 0;
};

struct ParsedTrace {
  TraceMeta meta;
  std::map<int, std::vector<TraceSample>> robots;
  std::vector<TraceEvent> events;
  std::vector<TraceEvent> final_cubes;  // kind is CUBE or CUBE_BANKED
};

/// Reads a trace written by TraceWriter. Throws ConfigError on malformed input.
ParsedTrace parse_trace(std::istream& in);

}  // namespace swarm
