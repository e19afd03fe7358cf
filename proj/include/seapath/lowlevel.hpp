#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "seapath/agents.hpp"
#include "seapath/roadnet.hpp"

namespace seapath {

/// Constraints on one agent, sorted by (interval start, location, owner, end).
struct ConstraintSet {
  std::vector<Constraint> constraints;

  ConstraintSet() = default;
  explicit ConstraintSet(std::vector<Constraint> cs);

  bool empty() const { return constraints.empty(); }
  std::size_t size() const { return constraints.size(); }
  /// Latest finite interval end, or zero when there is none.
  Time latest_finite_end() const;

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

/// Per-location lookup over a ConstraintSet.
class ConstraintIndex {
public:
  explicit ConstraintIndex(const ConstraintSet& set);

  std::span<const Constraint> at(Location l) const;
  bool blocks_forever(Location l) const;
  bool any_overlap(Location l, const Interval& iv) const;
  std::optional<Constraint> first_violation(std::span<const OccupancyRecord> occ) const;

private:
  std::unordered_map<Location, std::vector<Constraint>, LocationHash> by_location_;
};

/// Occupancy of every other agent's plan, turned into constraints on `agent`.
/// `plans[i]` belongs to `agents[i]`; the entry for `agent.id` is skipped.
ConstraintSet derive_constraints(const SEAgent& agent, std::span<const SEAgent> agents, std::span<const Plan> plans,
                                 const RoadNetwork& net);
ConstraintSet derive_constraints(AgentId self, std::span<const std::vector<OccupancyRecord>> occupancies);

struct ReplanNode {
  std::uint64_t id = 0;
  Plan plan;
  Time cost;
  std::optional<std::uint64_t> parent;
  /// Violations resolved on the way from the root to this node.
  std::vector<Constraint> resolved;
  /// Locations re-routed around along this branch.
  std::vector<Location> blocked;
};

struct LowLevelOptions {
  /// Root of the replan tree; the unconstrained shortest plan when absent.
  std::optional<Plan> seed;
  /// Expansion cap; 0 means unlimited.
  std::size_t max_expansions = 200000;
};

struct LowLevelStats {
  std::size_t generated = 0;
  std::size_t expanded = 0;
  bool capped = false;
};

/// Re-routes from the last vertex the head visits before `violated.location`,
/// which joins the branch's blocked set. nullopt when no route remains.
std::optional<ReplanNode> create_alt_path(const ReplanNode& node, const Constraint& violated, const SEAgent& agent,
                                          const RoadNetwork& net);

/// Delays departure from the vertex before `violated.location` just enough
/// for the agent's occupancy there to start when the constraint ends.
/// nullopt only when the constraint never ends.
std::optional<ReplanNode> create_wait(const ReplanNode& node, const Constraint& violated, const SEAgent& agent,
                                      const RoadNetwork& net);

/// Best-first replanning over alternate-path / wait resolutions of the
/// earliest violated constraint. The result honours every constraint.
Plan low_level_search(const SEAgent& agent, const RoadNetwork& net, const ConstraintSet& constraints,
                      const LowLevelOptions& options = {}, LowLevelStats* stats = nullptr);

/// Lattice step shared by all event times: gcd of traversal and body-drain
/// durations over every agent and edge.
Time time_quantum(std::span<const SEAgent> agents, const RoadNetwork& net);

struct OptimalStats {
  std::size_t expanded = 0;
};

/// Minimum-cost simple-route plan honouring every constraint, with waits in
/// multiples of `quantum`, whose route passes every location in `required`.
/// nullopt when no such plan exists. A `witness` route that avoids the
/// permanent blocks and passes `required` tightens the search bound.
std::optional<Plan> optimal_search(const SEAgent& agent, const RoadNetwork& net, const ConstraintSet& constraints,
                                   Time quantum, std::span<const Location> required = {},
                                   const Path* witness = nullptr, OptimalStats* stats = nullptr);

}  // namespace seapath
