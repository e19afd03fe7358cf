#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "seapath/roadnet.hpp"
#include "seapath/time.hpp"

namespace seapath {

using AgentId = std::uint32_t;

/// Spatially extended agent: a body of `length` that departs `initial` at
/// t = 0 and must reach `final`.
struct SEAgent {
  AgentId id = 0;
  Distance length;
  VertexId initial;
  VertexId final;
  Speed speed;

  /// Throws std::invalid_argument when the agent is malformed for `net`.
  void validate(const RoadNetwork& net) const;
};

/// The head enters `location` (always an edge) at time `t`.
struct MoveAction {
  Location location;
  Time t;
  friend bool operator==(const MoveAction&, const MoveAction&) = default;
};

/// The body stays frozen from `t` for `d`, head at a vertex.
struct WaitAction {
  Time t;
  Time d;
  friend bool operator==(const WaitAction&, const WaitAction&) = default;
};

using Action = std::variant<MoveAction, WaitAction>;

struct Plan {
  AgentId agent = 0;
  std::vector<Action> actions;
  Time cost;

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct OccupancyRecord {
  Location location;
  Interval interval;
  AgentId agent = 0;
  friend bool operator==(const OccupancyRecord&, const OccupancyRecord&) = default;
};

/// Forbids the constrained agent from covering `location` during `interval`.
/// An interval ending at Time::max() blocks the location outright.
struct Constraint {
  Location location;
  Interval interval;
  AgentId owner = 0;

  auto operator<=>(const Constraint&) const = default;
};

class PlanError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Route plus per-vertex waits; the structural view of a Plan.
/// `waits[k]` is spent with the head at `route.vertices[k]`, k < edges.size().
struct Itinerary {
  Path route;
  std::vector<Time> waits;

  friend bool operator==(const Itinerary&, const Itinerary&) = default;
};

/// Head timetable of an itinerary: `depart[k]` is when the head leaves
/// route.vertices[k] along route.edges[k]; `arrive[k]` when it reaches
/// route.vertices[k + 1].
struct HeadSchedule {
  std::vector<Time> depart;
  std::vector<Time> arrive;
};

HeadSchedule head_schedule(const Itinerary& it, const SEAgent& agent, const RoadNetwork& net);

/// Checks connectivity, timing and simplicity; throws PlanError.
Itinerary itinerary_of(const Plan& plan, const SEAgent& agent, const RoadNetwork& net);

/// Renders an itinerary into canonical actions (waits merged, zero waits dropped).
Plan make_plan(const SEAgent& agent, const RoadNetwork& net, const Itinerary& it);

/// Plan that follows `route` without waiting.
Plan plan_along(const SEAgent& agent, const RoadNetwork& net, const Path& route);

/// Unconstrained minimum-time plan.
Plan shortest_plan(const SEAgent& agent, const RoadNetwork& net);

/// Locations covered by the body over time, one record per location.
///
/// Edge records run from head entry until the tail clears the edge; vertex
/// records from head arrival until the tail clears the vertex. The body moves
/// rigidly behind the head and is absorbed by the final vertex at the last
/// edge's speed. The agent's own initial and final vertices produce no records.
std::vector<OccupancyRecord> occupancy(const Plan& plan, const SEAgent& agent, const RoadNetwork& net);
std::vector<OccupancyRecord> occupancy(const Itinerary& it, const SEAgent& agent, const RoadNetwork& net);

/// Head-arrival time at the final vertex.
inline Time plan_cost(const Plan& plan) { return plan.cost; }

/// The violated constraint whose overlap begins earliest (ties: smallest
/// location, then owner), or nullopt when the plan honours every constraint.
std::optional<Constraint> is_consistent(const Plan& plan, const SEAgent& agent, const RoadNetwork& net,
                                        std::span<const Constraint> constraints);
std::optional<Constraint> first_violation(std::span<const OccupancyRecord> occ,
                                          std::span<const Constraint> constraints);

/// Sum of plan costs.
Time solution_cost(std::span<const Plan> plans);

}  // namespace seapath
