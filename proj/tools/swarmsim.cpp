#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "swarm/config.hpp"
#include "swarm/errors.hpp"
#include "swarm/render.hpp"
#include "swarm/round.hpp"
#include "swarm/tournament.hpp"
#include "swarm/trace.hpp"

namespace {

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw swarm::ConfigError("cannot write " + path);
  out << contents;
}

swarm::ParsedTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw swarm::ConfigError("cannot open trace " + path);
  return swarm::parse_trace(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm foraging simulator"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the config seed");

  std::string config_path, trace_path, svg_path;
  auto* simulate = app.add_subcommand("simulate", "Run one round");
  simulate->add_option("--config", config_path, "Round config (YAML)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--trace", trace_path, "Write the CSV trace here");
  simulate->add_option("--svg", svg_path, "Write an SVG rendering of the round");
  simulate->add_option("--seed", seed, "Override the config seed");

  std::string matrix_path, out_path;
  int jobs = 1;
  auto* tournament = app.add_subcommand("tournament", "Run a strategy x distribution x seed matrix");
  tournament->add_option("--matrix", matrix_path, "Matrix file (YAML)")->required()->check(CLI::ExistingFile);
  tournament->add_option("--out", out_path, "Results JSON")->required();
  tournament->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  tournament->add_option("--seed", seed, "Run every cell with this single seed");

  std::string render_trace;
  auto* render = app.add_subcommand("render", "Render a trace as SVG");
  render->add_option("--trace", render_trace, "Trace file")->required()->check(CLI::ExistingFile);
  render->add_option("--svg", svg_path, "Output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      swarm::RoundConfig config = swarm::load_round_config(config_path);
      if (seed) config.seed = *seed;
      std::ostringstream trace;
      swarm::RoundOptions options;
      if (!trace_path.empty() || !svg_path.empty()) options.trace = &trace;
      const auto result = swarm::run_round(config, options);
      if (!trace_path.empty()) write_file(trace_path, trace.str());
      if (!svg_path.empty()) {
        std::istringstream in(trace.str());
        write_file(svg_path, swarm::render_svg(swarm::parse_trace(in)));
      }
      std::cout << swarm::to_json(result).dump(2) << '\n';
      std::cerr << fmt::format("score {} in {:.2f} s wall clock\n", result.score, result.wall_clock_seconds);
    } else if (*tournament) {
      swarm::TournamentMatrix matrix = swarm::load_matrix(matrix_path);
      if (seed) matrix.seeds = {*seed};
      const auto result = swarm::run_tournament(matrix, jobs);
      write_file(out_path, swarm::to_json(matrix, result).dump(2) + "\n");
      std::size_t ws = 0, wd = 0;
      for (const auto& c : result.cells) {
        ws = std::max(ws, c.strategy.size());
        wd = std::max(wd, c.distribution.size());
      }
      for (const auto& c : result.cells)
        std::cout << fmt::format("{:<{}}  {:<{}}  median {:>6.1f}  min {:>4}  max {:>4}\n", c.strategy, ws,
                                 c.distribution, wd, c.median, c.min, c.max);
    } else if (*render) {
      write_file(svg_path, swarm::render_svg(read_trace(render_trace)));
    }
  } catch (const swarm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const swarm::SetupError& e) {
    std::cerr << "setup error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
