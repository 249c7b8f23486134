#include "swarm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "swarm/errors.hpp"
#include "yaml_util.hpp"

namespace swarm {

namespace detail {

void require_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

StrategySpec parse_strategy(const YAML::Node& node, const std::string& where) {
  require_keys(node, where, {"name", "base", "params", "label"});
  StrategySpec spec;
  spec.name = read<std::string>(node, "name", where, spec.name);
  spec.base = read<std::string>(node, "base", where, spec.base);
  if (const auto params = node["params"]) {
    if (!params.IsMap()) throw ConfigError(where + ".params: expected a mapping");
    for (const auto& kv : params) {
      const auto key = kv.first.as<std::string>();
      try {
        spec.params[key] = kv.second.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError(where + ".params." + key + ": expected a number");
      }
    }
  }
  return spec;
}

DistributionSpec parse_distribution(const YAML::Node& node, const std::string& where,
                                    std::initializer_list<const char*> extra_keys) {
  std::vector<const char*> keys{"kind", "count", "clusters", "exclusion_radius"};
  keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
  if (node) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end())
        throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  DistributionSpec d;
  const auto kind = read<std::string>(node, "kind", where, "uniform");
  if (kind == "uniform") {
    d.kind = DistributionSpec::Kind::kUniform;
  } else if (kind == "clustered") {
    d.kind = DistributionSpec::Kind::kClustered;
  } else if (kind == "large_cluster") {
    d.kind = DistributionSpec::Kind::kLargeCluster;
  } else {
    throw ConfigError(where + ".kind: unknown distribution '" + kind + "'");
  }
  d.count = read<int>(node, "count", where, d.count);
  d.exclusion_radius = read<double>(node, "exclusion_radius", where, d.exclusion_radius);
  if (const auto clusters = node ? node["clusters"] : YAML::Node()) {
    if (d.kind != DistributionSpec::Kind::kClustered) throw ConfigError(where + ".clusters: only valid for clustered");
    if (!clusters.IsSequence()) throw ConfigError(where + ".clusters: expected a list");
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      const std::string w = fmt::format("{}.clusters[{}]", where, i);
      require_keys(clusters[i], w, {"count", "pile_side"});
      d.clusters.push_back({read<int>(clusters[i], "count", w, 0), read<double>(clusters[i], "pile_side", w, 0.0)});
    }
  }
  if (d.kind == DistributionSpec::Kind::kClustered && node && node["count"])
    throw ConfigError(where + ".count: clustered distributions take their counts from clusters");
  return d;
}

}  // namespace detail

using detail::read;
using detail::require_keys;

std::int64_t RoundConfig::total_ticks() const { return std::llround(duration / dt); }

void validate(const RoundConfig& c) {
  (void)c.arena();
  if (c.robot_count < 1) throw ConfigError("robots: need at least one robot");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (c.duration < 0.0) throw ConfigError("duration_s must be non-negative");
  if (std::abs(c.duration / c.dt - std::round(c.duration / c.dt)) > 1e-6)
    throw ConfigError("duration_s must be a whole number of timesteps");
  if (c.trace_interval < 1) throw ConfigError("trace.interval_ticks must be >= 1");
  if (c.noise.sigma_enc < 0 || c.noise.sigma_imu < 0 || c.noise.sigma_gps < 0 || c.noise.camera_sigma_bearing < 0 ||
      c.noise.camera_sigma_distance < 0)
    throw ConfigError("noise: sigmas must be non-negative");
  if (c.noise.enc_correlation_time < 0 || c.noise.imu_correlation_time < 0)
    throw ConfigError("noise: correlation times must be non-negative");
  if (!(c.noise.gps_period > 0.0)) throw ConfigError("noise.gps_period must be positive");
  if (c.body.grasp_probability < 0.0 || c.body.grasp_probability > 1.0)
    throw ConfigError("body.grasp_probability must be in [0, 1]");
  if (!(c.body.max_range > 0.0)) throw ConfigError("body.max_range must be positive");
  if (c.blackboard_latency < 0.0) throw ConfigError("features.blackboard_latency_s must be non-negative");
  if (c.blackboard_loss < 0.0 || c.blackboard_loss > 1.0) throw ConfigError("features.blackboard_loss must be in [0, 1]");
  if (c.strategy.name == "explore_exploit" && !c.blackboard)
    throw ConfigError("explore_exploit requires features.blackboard");
  if (c.competition_rules) {
    if (c.robot_count < 3 || c.robot_count > 6) throw ConfigError("competition rounds use 3 to 6 robots");
    if (c.arena_preset != "15" && c.arena_preset != "22") throw ConfigError("competition arenas are '15' or '22'");
    if (c.distribution.total() < 128 || c.distribution.total() > 256)
      throw ConfigError("competition rounds place 128 to 256 cubes");
  }
  // Instantiating every robot's strategy validates names, parameters and waypoints.
  for (int i = 0; i < c.robot_count; ++i) {
    StrategySetup setup{i, c.robot_count, c.arena().side_length, c.zone_side, 1.0, c.dt, {}};
    (void)make_strategy(c.strategy, setup);
  }
}

namespace {

RoundConfig parse_node(const YAML::Node& root) {
  const std::string w = "config";
  require_keys(root, w,
               {"seed", "duration_s", "dt", "arena", "robots", "competition_rules", "strategy", "distribution", "noise",
                "body", "features", "trace"});
  RoundConfig c;
  c.seed = read<std::uint64_t>(root, "seed", w, c.seed);
  c.duration = read<double>(root, "duration_s", w, c.duration);
  c.dt = read<double>(root, "dt", w, c.dt);
  c.robot_count = read<int>(root, "robots", w, c.robot_count);
  c.competition_rules = read<bool>(root, "competition_rules", w, c.competition_rules);

  const auto arena = root["arena"];
  require_keys(arena, "arena", {"preset", "zone_side"});
  c.arena_preset = read<std::string>(arena, "preset", "arena", c.arena_preset);
  c.zone_side = read<double>(arena, "zone_side", "arena", c.zone_side);

  if (root["strategy"]) c.strategy = detail::parse_strategy(root["strategy"], "strategy");
  if (root["distribution"]) c.distribution = detail::parse_distribution(root["distribution"], "distribution");

  const auto noise = root["noise"];
  require_keys(noise, "noise",
               {"sigma_enc", "sigma_imu", "sigma_gps", "gps_period", "enc_correlation_time", "imu_correlation_time",
                "camera_sigma_bearing", "camera_sigma_distance"});
  auto& n = c.noise;
  n.sigma_enc = read<double>(noise, "sigma_enc", "noise", n.sigma_enc);
  n.sigma_imu = read<double>(noise, "sigma_imu", "noise", n.sigma_imu);
  n.sigma_gps = read<double>(noise, "sigma_gps", "noise", n.sigma_gps);
  n.gps_period = read<double>(noise, "gps_period", "noise", n.gps_period);
  n.enc_correlation_time = read<double>(noise, "enc_correlation_time", "noise", n.enc_correlation_time);
  n.imu_correlation_time = read<double>(noise, "imu_correlation_time", "noise", n.imu_correlation_time);
  n.camera_sigma_bearing = read<double>(noise, "camera_sigma_bearing", "noise", n.camera_sigma_bearing);
  n.camera_sigma_distance = read<double>(noise, "camera_sigma_distance", "noise", n.camera_sigma_distance);

  const auto body = root["body"];
  require_keys(body, "body", {"grasp_probability", "max_range"});
  c.body.grasp_probability = read<double>(body, "grasp_probability", "body", c.body.grasp_probability);
  c.body.max_range = read<double>(body, "max_range", "body", c.body.max_range);

  const auto features = root["features"];
  require_keys(features, "features", {"pushing", "blackboard", "blackboard_latency_s", "blackboard_loss"});
  c.body.pushing = read<bool>(features, "pushing", "features", c.body.pushing);
  c.blackboard = read<bool>(features, "blackboard", "features", c.blackboard);
  c.blackboard_latency = read<double>(features, "blackboard_latency_s", "features", c.blackboard_latency);
  c.blackboard_loss = read<double>(features, "blackboard_loss", "features", c.blackboard_loss);

  const auto trace = root["trace"];
  require_keys(trace, "trace", {"interval_ticks"});
  c.trace_interval = read<int>(trace, "interval_ticks", "trace", c.trace_interval);
  return c;
}

}  // namespace

RoundConfig parse_round_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  RoundConfig c = parse_node(root);
  validate(c);
  return c;
}

RoundConfig load_round_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_round_config(ss.str());
}

nlohmann::json to_json(const RoundConfig& c) {
  using nlohmann::json;
  json clusters = json::array();
  for (const auto& cl : c.distribution.clusters) clusters.push_back({{"count", cl.count}, {"pile_side", cl.pile_side}});
  json dist = {{"kind", to_string(c.distribution.kind)},
               {"exclusion_radius", c.distribution.exclusion_radius}};
  if (c.distribution.kind == DistributionSpec::Kind::kClustered) {
    dist["clusters"] = clusters;
  } else {
    dist["count"] = c.distribution.count;
  }
  json strategy = {{"name", c.strategy.name}, {"params", c.strategy.params}};
  if (c.strategy.name == "explore_exploit") strategy["base"] = c.strategy.base;
  return {
      {"seed", c.seed},
      {"duration_s", c.duration},
      {"dt", c.dt},
      {"arena", {{"preset", c.arena_preset}, {"zone_side", c.zone_side}}},
      {"robots", c.robot_count},
      {"competition_rules", c.competition_rules},
      {"strategy", strategy},
      {"distribution", dist},
      {"noise",
       {{"sigma_enc", c.noise.sigma_enc},
        {"sigma_imu", c.noise.sigma_imu},
        {"sigma_gps", c.noise.sigma_gps},
        {"gps_period", c.noise.gps_period},
        {"enc_correlation_time", c.noise.enc_correlation_time},
        {"imu_correlation_time", c.noise.imu_correlation_time},
        {"camera_sigma_bearing", c.noise.camera_sigma_bearing},
        {"camera_sigma_distance", c.noise.camera_sigma_distance}}},
      {"body", {{"grasp_probability", c.body.grasp_probability}, {"max_range", c.body.max_range}}},
      {"features",
       {{"pushing", c.body.pushing},
        {"blackboard", c.blackboard},
        {"blackboard_latency_s", c.blackboard_latency},
        {"blackboard_loss", c.blackboard_loss}}},
      {"trace", {{"interval_ticks", c.trace_interval}}},
  };
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string config_digest(const RoundConfig& config) { return fnv1a_hex(to_json(config).dump()); }

}  // namespace swarm
