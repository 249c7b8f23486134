#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swarm/config.hpp"
#include "swarm/round.hpp"

namespace swarm {

struct MatrixStrategy {
  std::string label;
  StrategySpec spec;
};

struct MatrixDistribution {
  std::string label;
  DistributionSpec spec;
};

struct TournamentMatrix {
  RoundConfig base;
  std::vector<MatrixStrategy> strategies;
  std::vector<MatrixDistribution> distributions;
  std::vector<std::uint64_t> seeds;

  std::size_t round_count() const { return strategies.size() * distributions.size() * seeds.size(); }
  /// Config of round `index` in matrix order (strategy-major, then distribution, then seed).
  RoundConfig round_config(std::size_t index) const;
};

TournamentMatrix parse_matrix(const std::string& text);
TournamentMatrix load_matrix(const std::filesystem::path& path);

struct CellSummary {
  std::string strategy;
  std::string distribution;
  std::vector<int> scores;  // in seed order
  double median = 0.0;
  int min = 0;
  int max = 0;
};

struct RoundRecord {
  std::string strategy;
  std::string distribution;
  std::uint64_t seed = 0;
  RoundResult result;
};

struct TournamentResult {
  std::vector<CellSummary> cells;
  std::vector<RoundRecord> rounds;
};

double median(std::vector<int> values);

/// Runs every round of the matrix on `jobs` worker threads. The result depends only on the matrix.
TournamentResult run_tournament(const TournamentMatrix& matrix, int jobs = 1);

nlohmann::json to_json(const TournamentMatrix& matrix, const TournamentResult& result);

}  // namespace swarm
