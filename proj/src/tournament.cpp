#include "swarm/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "swarm/errors.hpp"
#include "yaml_util.hpp"

namespace swarm {

using detail::read;
using detail::require_keys;

RoundConfig TournamentMatrix::round_config(std::size_t index) const {
  const std::size_t per_strategy = distributions.size() * seeds.size();
  RoundConfig c = base;
  c.strategy = strategies.at(index / per_strategy).spec;
  c.distribution = distributions.at((index % per_strategy) / seeds.size()).spec;
  c.seed = seeds.at(index % seeds.size());
  return c;
}

TournamentMatrix parse_matrix(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("matrix: parse error: ") + e.what());
  }
  require_keys(root, "matrix", {"base", "strategies", "distributions", "seeds"});
  TournamentMatrix m;
  if (root["base"]) {
    YAML::Emitter out;
    out << root["base"];
    m.base = parse_round_config(out.c_str());
  }

  const auto strategies = root["strategies"];
  if (!strategies || !strategies.IsSequence() || strategies.size() == 0)
    throw ConfigError("matrix.strategies: need a nonempty list");
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const std::string w = fmt::format("matrix.strategies[{}]", i);
    auto spec = detail::parse_strategy(strategies[i], w);
    m.strategies.push_back({read<std::string>(strategies[i], "label", w, spec.name), spec});
  }

  const auto dists = root["distributions"];
  if (!dists || !dists.IsSequence() || dists.size() == 0)
    throw ConfigError("matrix.distributions: need a nonempty list");
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const std::string w = fmt::format("matrix.distributions[{}]", i);
    auto spec = detail::parse_distribution(dists[i], w, {"label"});
    const std::string fallback = fmt::format("{}({})", to_string(spec.kind), spec.total());
    m.distributions.push_back({read<std::string>(dists[i], "label", w, fallback), spec});
  }

  const auto seeds = root["seeds"];
  if (!seeds) throw ConfigError("matrix.seeds: required");
  if (seeds.IsSequence()) {
    for (std::size_t i = 0; i < seeds.size(); ++i) m.seeds.push_back(seeds[i].as<std::uint64_t>());
  } else {
    require_keys(seeds, "matrix.seeds", {"start", "count"});
    const auto start = read<std::uint64_t>(seeds, "start", "matrix.seeds", 1);
    const auto count = read<int>(seeds, "count", "matrix.seeds", 0);
    for (int i = 0; i < count; ++i) m.seeds.push_back(start + i);
  }
  if (m.seeds.empty()) throw ConfigError("matrix.seeds: need at least one seed");

  for (std::size_t i = 0; i < m.round_count(); i += m.seeds.size()) validate(m.round_config(i));
  return m;
}

TournamentMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str());
}

double median(std::vector<int> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TournamentResult run_tournament(const TournamentMatrix& matrix, int jobs) {
  const std::size_t total = matrix.round_count();
  if (total == 0) throw ConfigError("tournament matrix is empty");
  std::vector<RoundResult> results(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        results[i] = run_round(matrix.round_config(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(total));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  TournamentResult out;
  const std::size_t seeds = matrix.seeds.size();
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t cell = i / seeds;
    const auto& strat = matrix.strategies[cell / matrix.distributions.size()];
    const auto& dist = matrix.distributions[cell % matrix.distributions.size()];
    if (i % seeds == 0) out.cells.push_back({strat.label, dist.label, {}, 0.0, 0, 0});
    out.cells.back().scores.push_back(results[i].score);
    out.rounds.push_back({strat.label, dist.label, matrix.seeds[i % seeds], std::move(results[i])});
  }
  for (auto& c : out.cells) {
    c.median = median(c.scores);
    c.min = *std::min_element(c.scores.begin(), c.scores.end());
    c.max = *std::max_element(c.scores.begin(), c.scores.end());
  }
  return out;
}

nlohmann::json to_json(const TournamentMatrix& matrix, const TournamentResult& result) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& c : result.cells)
    cells.push_back({{"strategy", c.strategy},
                     {"distribution", c.distribution},
                     {"median", c.median},
                     {"min", c.min},
                     {"max", c.max},
                     {"scores", c.scores}});
  json rounds = json::array();
  for (const auto& r : result.rounds) {
    json row = to_json(r.result);
    row["strategy"] = r.strategy;
    row["distribution"] = r.distribution;
    row["seed"] = r.seed;
    rounds.push_back(row);
  }
  const json base = to_json(matrix.base);
  return {{"base_config", base},
          {"base_config_digest", fnv1a_hex(base.dump())},
          {"seeds", matrix.seeds},
          {"cells", cells},
          {"rounds", rounds}};
}

}  // namespace swarm
