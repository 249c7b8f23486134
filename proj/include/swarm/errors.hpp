#pragma once

#include <stdexcept>
#include <string>

namespace swarm {

/// Invalid round configuration or command set; raised before or instead of simulating.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// World generation could not satisfy a placement constraint.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal invariant breach (e.g. a covariance that is no longer PSD).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace swarm
