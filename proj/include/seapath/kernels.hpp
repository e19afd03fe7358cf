#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seapath/agents.hpp"
#include "seapath/lowlevel.hpp"

namespace seapath {

enum class Exec { Serial, Parallel };

/// Agents must be sorted by id; returns the index of `id`.
std::size_t agent_index(std::span<const SEAgent> agents, AgentId id);

enum class PlanMode { Replan, Optimal };

struct PlanJob {
  AgentId agent = 0;
  ConstraintSet constraints;
  /// Agents the requester is committed to; carried for bookkeeping only.
  std::vector<AgentId> commitment_context;
  std::optional<Plan> seed;
  /// Optimal mode: locations the route must pass.
  std::vector<Location> required;
  PlanMode mode = PlanMode::Replan;
  Time quantum = Time::from_ticks(1);

  friend bool operator==(const PlanJob&, const PlanJob&) = default;
};

struct PlanOutcome {
  /// Absent only in Optimal mode when permanent blocks cut every route.
  std::optional<Plan> plan;
  bool fallback = false;

  friend bool operator==(const PlanOutcome&, const PlanOutcome&) = default;
};

PlanOutcome run_plan_job(const PlanJob& job, std::span<const SEAgent> agents, const RoadNetwork& net,
                         std::size_t lowlevel_cap = LowLevelOptions{}.max_expansions);

/// Outcomes in job order whatever the execution mode.
std::vector<PlanOutcome> run_plan_jobs(std::span<const PlanJob> jobs, std::span<const SEAgent> agents,
                                       const RoadNetwork& net, Exec exec,
                                       std::size_t lowlevel_cap = LowLevelOptions{}.max_expansions);

/// Earliest overlap between two agents' footprints.
struct PairConflict {
  AgentId a = 0;
  AgentId b = 0;
  Location location;
  Time start;

  friend bool operator==(const PairConflict&, const PairConflict&) = default;
};

/// Every conflicting pair (a < b) with its earliest overlap, ordered by (a, b).
/// `occupancies[i]` holds one agent's records.
std::vector<PairConflict> pairwise_conflicts(std::span<const std::vector<OccupancyRecord>> occupancies, Exec exec);

/// The conflict that starts first; ties broken by agent pair, then location.
std::optional<PairConflict> earliest_conflict(std::span<const std::vector<OccupancyRecord>> occupancies, Exec exec);

}  // namespace seapath
