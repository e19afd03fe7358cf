#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "seapath/conflict.hpp"

using namespace seapath;

#ifndef SEAPATH_GOLDEN_DIR
#define SEAPATH_GOLDEN_DIR "tests/golden"
#endif

namespace {

struct RandomSolution {
  RoadNetwork net;
  std::vector<SEAgent> agents;
  std::vector<Plan> plans;
};

RandomSolution random_solution(std::mt19937_64& rng) {
  RandomSolution s;
  const int rows = 2 + static_cast<int>(rng() % 4), cols = 2 + static_cast<int>(rng() % 4);
  s.net = build_grid(rows, cols, Distance::from_units(10), Speed::from_units(5));
  const auto n = static_cast<std::uint32_t>(s.net.vertex_count());
  const std::size_t k = 1 + rng() % 6;
  for (std::size_t i = 0; i < k; ++i) {
    SEAgent a;
    a.id = static_cast<AgentId>(i);
    a.initial = VertexId{static_cast<std::uint32_t>(rng() % n)};
    do a.final = VertexId{static_cast<std::uint32_t>(rng() % n)};
    while (a.final == a.initial);
    a.length = Distance::from_ticks(1000 + static_cast<std::int64_t>(rng() % 9000));
    a.speed = Speed::from_ticks(2000 + static_cast<std::int64_t>(rng() % 6000));
    const Path r = *oracle::random_route(s.net, a.initial, a.final, rng);
    std::vector<std::int64_t> waits(r.edges.size());
    for (auto& w : waits) w = rng() % 2 ? 0 : static_cast<std::int64_t>(rng() % 4000);
    s.plans.push_back(oracle::build_plan(a, s.net, r, waits));
    s.agents.push_back(a);
  }
  return s;
}

std::vector<AgentId> ids_of(const std::vector<SEAgent>& agents) {
  std::vector<AgentId> ids;
  for (const auto& a : agents) ids.push_back(a.id);
  return ids;
}

}  // namespace

TEST_CASE("five-agent worked example") {
  const auto f = fixture::five_agents();
  const TOGraph g = build_to_graph(f.plans, f.agents, f.net);

  std::ifstream golden(SEAPATH_GOLDEN_DIR "/five_agents_to_graph.txt");
  REQUIRE(golden.good());
  std::stringstream want;
  want << golden.rdbuf();
  CHECK(g.export_text(f.net) == want.str());

  std::size_t e2_nodes = 0, e5_nodes = 0;
  for (const TONode& node : g.nodes) {
    std::vector<AgentId> members;
    for (const auto& d : node.agent_details) members.push_back(d.agent);
    if (node.location == f.loc("e2")) {
      ++e2_nodes;
      CHECK(members == std::vector<AgentId>{1, 2});
    }
    if (node.location == f.loc("e5")) {
      ++e5_nodes;
      CHECK(members == std::vector<AgentId>{5});
    }
  }
  CHECK(e2_nodes == 1);
  CHECK(e5_nodes == 1);

  const Validation v = validate(f.plans, f.agents, f.net);
  CHECK(v.has_conflict);
  CHECK(v.partition.blocks == std::vector<std::vector<AgentId>>{{1, 2, 3, 4}, {5}});
  CHECK(v.partition.non_singleton_count() == 1);
  CHECK(v.partition.singleton_count() == 1);
  CHECK(v.partition.largest_block() == 4);
}

TEST_CASE("single agent never conflicts") {
  const auto f = fixture::five_agents();
  const std::vector<Plan> one{f.plans[4]};
  const std::vector<SEAgent> who{f.agents[4]};
  const TOGraph g = build_to_graph(one, who, f.net);
  CHECK(g.nodes.size() == 1);
  CHECK(g.edges.empty());
  const Validation v = validate(one, who, f.net);
  CHECK_FALSE(v.has_conflict);
  CHECK(v.partition.blocks == std::vector<std::vector<AgentId>>{{5}});
}

TEST_CASE("same route delayed past the tail clears") {
  const RoadNetwork g = build_grid(1, 4, Distance::from_units(10), Speed::from_units(5));
  std::vector<SEAgent> agents(2);
  for (AgentId i = 0; i < 2; ++i) {
    agents[i].id = i;
    agents[i].initial = VertexId{0};
    agents[i].final = VertexId{3};
    agents[i].length = Distance::from_units(5);
    agents[i].speed = Speed::from_units(5);
  }
  const Path r = *shortest_path(g, VertexId{0}, VertexId{3}, Speed::from_units(5));
  // The leader's body leaves e0 at 3; departing then touches but never overlaps.
  std::vector<Plan> plans{oracle::build_plan(agents[0], g, r, {0, 0, 0}), oracle::build_plan(agents[1], g, r, {3000, 0, 0})};
  CHECK_FALSE(validate(plans, agents, g).has_conflict);
  plans[1] = oracle::build_plan(agents[1], g, r, {2999, 0, 0});
  CHECK(validate(plans, agents, g).has_conflict);
}

TEST_CASE("validate agrees with the brute-force conflict graph") {
  std::mt19937_64 rng(77);
  std::size_t conflicting = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const RandomSolution s = random_solution(rng);
    const auto ids = ids_of(s.agents);
    std::vector<std::vector<OccupancyRecord>> occ;
    for (std::size_t i = 0; i < s.plans.size(); ++i) occ.push_back(occupancy(s.plans[i], s.agents[i], s.net));
    const Validation v = validate(s.plans, s.agents, s.net);
    const auto want = oracle::conflict_components(occ, ids);
    CHECK(v.partition.blocks == want);
    CHECK(v.has_conflict == oracle::solution_conflicts(occ));
    conflicting += v.has_conflict;

    const TOGraph g = build_to_graph(occ);
    // Same-location nodes never overlap once merging settles.
    std::map<Location, std::vector<Interval>> windows;
    for (const TONode& node : g.nodes) windows[node.location].push_back(node.tau);
    for (auto& [loc, ws] : windows)
      for (std::size_t a = 0; a < ws.size(); ++a)
        for (std::size_t b = a + 1; b < ws.size(); ++b) CHECK_FALSE(intersects(ws[a], ws[b]));
    // Each edge links two different locations.
    for (const TOEdge& e : g.edges) CHECK(g.nodes[e.from].location != g.nodes[e.to].location);
    // Relates tests stay within n * k^2 over multi-agent nodes.
    const std::size_t k = s.agents.size();
    CHECK(v.relates_tests <= v.multi_agent_nodes * k * k);
  }
  CHECK(conflicting > 50);
}

TEST_CASE("disjoint conflict pairs give separate blocks") {
  // Two head-on pairs on the top and bottom rows of a 3x3 grid.
  const RoadNetwork g = build_grid(3, 3, Distance::from_units(10), Speed::from_units(5));
  const std::vector<std::pair<std::uint32_t, std::uint32_t>> ends{{0, 2}, {2, 0}, {6, 8}, {8, 6}};
  std::vector<SEAgent> agents;
  std::vector<Plan> plans;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    SEAgent a;
    a.id = static_cast<AgentId>(i);
    a.initial = VertexId{ends[i].first};
    a.final = VertexId{ends[i].second};
    a.length = Distance::from_units(5);
    a.speed = Speed::from_units(5);
    Path r;
    const int step = a.final.value > a.initial.value ? 1 : -1;
    for (int v = static_cast<int>(a.initial.value);; v += step) {
      r.vertices.push_back(VertexId{static_cast<std::uint32_t>(v)});
      if (r.vertices.size() > 1) r.edges.push_back(*g.edge_between(r.vertices[r.vertices.size() - 2], r.vertices.back()));
      if (v == static_cast<int>(a.final.value)) break;
    }
    plans.push_back(plan_along(a, g, r));
    agents.push_back(a);
  }
  const Validation v = validate(plans, agents, g);
  CHECK(v.partition.blocks == std::vector<std::vector<AgentId>>{{0, 1}, {2, 3}});
  CHECK(v.partition.average_non_singleton_size() == doctest::Approx(2.0));
  CHECK(v.partition.non_singleton_sizes() == std::vector<std::size_t>{2, 2});
}
