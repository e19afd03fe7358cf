#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seapath/conflict.hpp"
#include "seapath/service.hpp"

namespace seapath {

enum class Algorithm { Greedy, XCBS, XCBSA, XCBSAEff, XCBSLA };
enum class EffHeuristic { Deeper, LargestBlock, MostSingletons };

std::string_view to_string(Algorithm a);
std::string_view to_string(EffHeuristic h);
/// Accepts the CLI names (greedy, xcbs, xcbs-a, xcbs-a-eff, xcbs-la); throws std::invalid_argument.
Algorithm parse_algorithm(std::string_view name);
/// Accepts deeper, largest-block, most-singletons.
EffHeuristic parse_heuristic(std::string_view name);

using Commitment = std::pair<AgentId, AgentId>;

struct CTNode {
  std::uint64_t id = 0;
  /// One plan per agent, in agent-id order.
  std::vector<Plan> solution;
  Time cost;
  std::optional<std::uint64_t> parent;
  std::size_t depth = 0;
  std::optional<Partition> partition;
  /// XCBS-LA only; each pair of distinct agents is stored both ways round.
  std::set<Commitment> commitments;
  /// XCBS only: the constraints each agent was planned under, and the
  /// locations its route must keep.
  std::vector<std::vector<Constraint>> constraints;
  std::vector<std::vector<Location>> required;
};

struct BlockStats {
  std::size_t largest = 0;
  std::size_t singletons = 0;
};

/// Deferred child of the memory-efficient search.
struct PotentialEntry {
  std::uint64_t parent = 0;
  /// Revised agent chosen for each non-singleton block of the parent.
  std::vector<AgentId> choice;
  Time cost;
  std::size_t depth = 0;
  BlockStats parent_block_stats;
  std::uint64_t sequence = 0;
};

struct SolveReport {
  std::string algorithm;
  std::vector<Plan> solution;
  Time cost;
  std::size_t nodes_generated = 0;
  std::size_t nodes_evaluated = 0;
  double elapsed_ms = 0.0;
  /// "solved" or "timeout".
  std::string status = "solved";
  /// Number of blocks (singletons included) in the root partition.
  std::size_t root_blocks = 0;
  std::size_t plan_requests = 0;
  /// Wall time the search spent waiting on the plan service.
  double plan_service_ms = 0.0;
  std::size_t lowlevel_fallbacks = 0;
  /// XCBS-LA: CT-nodes generated inside block-level searches.
  std::size_t block_nodes_generated = 0;
};

struct ExpansionInfo {
  std::size_t children = 0;
  /// Children the expansion law predicts for this node.
  std::size_t expected = 0;
};

/// Hooks for test-mode instrumentation. Every method defaults to a no-op.
class SearchObserver {
public:
  virtual ~SearchObserver() = default;
  virtual void on_generated(Algorithm, const CTNode& /*parent*/, const CTNode& /*child*/) {}
  /// `parent_partition` is null for the root.
  virtual void on_evaluated(Algorithm, const CTNode& /*node*/, const Partition& /*partition*/,
                            const Partition* /*parent_partition*/) {}
  virtual void on_expanded(Algorithm, const CTNode& /*node*/, const ExpansionInfo&) {}
};

class SearchTimeout : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  Exec exec = Exec::Serial;
  /// Defaults to an in-process service over `exec`.
  PlanService* service = nullptr;
  SearchObserver* observer = nullptr;
  EffHeuristic heuristic = EffHeuristic::Deeper;
  std::optional<std::chrono::milliseconds> time_limit;
  std::size_t lowlevel_cap = LowLevelOptions{}.max_expansions;
  /// Wait lattice for the optimal planners; derived from the instance when absent.
  std::optional<Time> quantum;
};

/// Agents must have unique ids; the solution is reported in ascending id order.
SolveReport solve(Algorithm algo, std::span<const SEAgent> agents, const RoadNetwork& net,
                  const SolveOptions& options = {});

SolveReport solve_greedy(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options = {});
SolveReport solve_xcbs(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options = {});
SolveReport solve_xcbsa(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options = {});
SolveReport solve_xcbsa_eff(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options = {});
SolveReport solve_xcbsla(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options = {});

/// Revises one agent per non-singleton block, every combination.
/// `agents` sorted by id; children carry fresh ids starting at `next_id`.
std::vector<CTNode> resolve_conflict_xcbsa(const CTNode& node, const Partition& partition,
                                           std::span<const SEAgent> agents, const RoadNetwork& net,
                                           PlanService& service, std::uint64_t next_id);

/// Minimum-cost conflict-free joint plans for `block`, other agents ignored.
/// Plans come back in ascending id order.
std::vector<Plan> block_level_search(std::span<const AgentId> block, std::span<const SEAgent> agents,
                                     const RoadNetwork& net, const SolveOptions& options = {},
                                     std::size_t* nodes_generated = nullptr);

}  // namespace seapath
