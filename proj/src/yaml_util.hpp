#pragma once

#include <initializer_list>
#include <string>

#include <yaml-cpp/yaml.h>

#include "swarm/arena_setup.hpp"
#include "swarm/errors.hpp"
#include "swarm/strategy.hpp"

namespace swarm::detail {

/// Rejects any key of a mapping that is not in `allowed`.
void require_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed);

template <typename T>
T read(const YAML::Node& node, const char* key, const std::string& where, T fallback) {
  if (!node) return fallback;
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

StrategySpec parse_strategy(const YAML::Node& node, const std::string& where);
DistributionSpec parse_distribution(const YAML::Node& node, const std::string& where,
                                    std::initializer_list<const char*> extra_keys = {});

}  // namespace swarm::detail
