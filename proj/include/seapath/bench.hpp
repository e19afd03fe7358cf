#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "seapath/highlevel.hpp"
#include "seapath/io.hpp"

namespace seapath {

struct ScenarioMeta {
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::vector<std::size_t> block_spec;
  /// Unconstrained path-time band every agent's shortest plan falls in.
  Time band_min = Time::zero();
  Time band_max = Time::max();
  double density = 0.0;
};

struct Scenario {
  RoadNetwork net;
  std::vector<SEAgent> agents;
  std::uint64_t seed = 0;
  ScenarioMeta meta;
};

struct GenerateOptions {
  std::size_t rows = 6;
  std::size_t cols = 6;
  std::vector<std::size_t> block_spec{2, 1};
  Time band_min = Time::zero();
  Time band_max = Time::max();
  /// Probability of deleting each grid edge before connectivity repair.
  double density = 0.0;
  std::uint64_t seed = 1;
  Distance edge_length = Distance::from_units(10);
  Speed edge_speed = Speed::from_units(5);
  Distance agent_length = Distance::from_units(5);
  Speed agent_speed = Speed::from_units(5);
  std::size_t max_attempts = 60;
  std::size_t draws_per_agent = 400;
};

class GenerationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Deterministic in options.seed; the root partition matches block_spec.
Scenario generate_scenario(const GenerateOptions& options);

/// Grid with each edge deleted with probability `density`, then enough
/// deleted edges restored to reconnect it. Surviving edges keep their grid names.
RoadNetwork build_sparse_grid(std::size_t rows, std::size_t cols, Distance length, Speed speed, double density,
                              std::mt19937_64& rng);

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

/// {"algorithm", "cost", "valid", "plans": [...]}.
Json solution_to_json(const SolveReport& report, const RoadNetwork& net, bool valid);

struct BenchRow {
  SolveReport report;
  std::uint64_t seed = 0;
  std::size_t agents = 0;
  std::size_t blocks = 0;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  double density = 0.0;
  /// "solved", "timeout", "invalid" or "error: ...".
  std::string status;
};

/// Solves and independently re-validates the solution.
BenchRow run_scenario(const Scenario& s, Algorithm algo, const SolveOptions& options = {});

const char* csv_header();
std::string csv_row(const BenchRow& row);
/// RFC 4180 quoting.
std::string csv_escape(const std::string& field);

enum class SweepAxis { Agents, PathLength, GridSize, Density };
SweepAxis parse_axis(const std::string& name);

struct SweepOptions {
  SweepAxis axis = SweepAxis::Agents;
  std::vector<double> values;
  std::vector<Algorithm> algorithms;
  std::vector<std::uint64_t> seeds;
  GenerateOptions base;
  SolveOptions solve;
};

/// One row per (value, algorithm, seed); failed cells become failure rows.
std::vector<BenchRow> sweep(const SweepOptions& options, std::ostream* progress = nullptr);

}  // namespace seapath
