#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seapath/agents.hpp"
#include "seapath/roadnet.hpp"

namespace seapath {

struct AgentDetail {
  AgentId agent = 0;
  std::vector<Interval> intervals;
};

/// Temporal occupancy node: who covers `location` during the window `tau`.
struct TONode {
  Location location;
  Interval tau;
  std::vector<AgentDetail> agent_details;
};

/// Directed link between consecutive locations of `agent`'s plan.
struct TOEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  AgentId agent = 0;
};

struct TOGraph {
  std::vector<TONode> nodes;
  std::vector<TOEdge> edges;

  /// One line per node ("node <i> <loc> <tau> <agent>:<interval> ...") then
  /// one line per edge ("edge <from> <to> agent=<id>").
  std::string export_text(const RoadNetwork& net) const;
};

struct Partition {
  /// Each block ascending by agent id; blocks ordered by their first member.
  std::vector<std::vector<AgentId>> blocks;

  std::size_t singleton_count() const;
  std::size_t non_singleton_count() const;
  /// Average size of the non-singleton blocks; 0 when there are none.
  double average_non_singleton_size() const;
  std::size_t largest_block() const;
  std::vector<std::size_t> non_singleton_sizes() const;
};

struct Validation {
  Partition partition;
  bool has_conflict = false;
  std::size_t relates_tests = 0;
  std::size_t multi_agent_nodes = 0;
};

/// Builds the T.O. graph. `occupancies[i]` are the records of one agent, in
/// plan order; callers pass agents ascending by id.
TOGraph build_to_graph(std::span<const std::vector<OccupancyRecord>> occupancies);
TOGraph build_to_graph(std::span<const Plan> solution, std::span<const SEAgent> agents, const RoadNetwork& net);

/// Groups agents whose intervals truly intersect at a shared t.o. node,
/// closed transitively; agents in no group become singletons.
Partition partition_agents(const TOGraph& g, std::span<const AgentId> all_agents, std::size_t* relates_tests = nullptr);

Validation validate(std::span<const Plan> solution, std::span<const SEAgent> agents, const RoadNetwork& net);
Validation validate(std::span<const std::vector<OccupancyRecord>> occupancies, std::span<const AgentId> all_agents);

}  // namespace seapath
