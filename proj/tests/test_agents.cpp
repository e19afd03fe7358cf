#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "seapath/agents.hpp"

using namespace seapath;

namespace {

RoadNetwork mixed_grid(std::mt19937_64& rng, int rows, int cols) {
  RoadNetwork net;
  for (int i = 0; i < rows * cols; ++i) net.add_vertex("v" + std::to_string(i));
  int e = 0;
  auto add = [&](int a, int b) {
    net.add_edge("e" + std::to_string(e++), VertexId{static_cast<std::uint32_t>(a)},
                 VertexId{static_cast<std::uint32_t>(b)}, Distance::from_ticks(500 + static_cast<std::int64_t>(rng() % 3500)),
                 Speed::from_ticks(700 + static_cast<std::int64_t>(rng() % 4300)));
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) add(r * cols + c, r * cols + c + 1);
      if (r + 1 < rows) add(r * cols + c, (r + 1) * cols + c);
    }
  return net;
}

SEAgent make_agent(AgentId id, VertexId from, VertexId to, Distance len, Speed speed) {
  SEAgent a;
  a.id = id;
  a.initial = from;
  a.final = to;
  a.length = len;
  a.speed = speed;
  return a;
}

}  // namespace

TEST_CASE("agent validation") {
  const RoadNetwork g = build_grid(2, 2, Distance::from_units(10), Speed::from_units(5));
  CHECK_NOTHROW(make_agent(0, VertexId{0}, VertexId{3}, Distance::from_units(5), Speed::from_units(5)).validate(g));
  CHECK_THROWS(make_agent(0, VertexId{0}, VertexId{0}, Distance::from_units(5), Speed::from_units(5)).validate(g));
  CHECK_THROWS(make_agent(0, VertexId{0}, VertexId{9}, Distance::from_units(5), Speed::from_units(5)).validate(g));
  CHECK_THROWS(make_agent(0, VertexId{0}, VertexId{3}, Distance::zero(), Speed::from_units(5)).validate(g));
  CHECK_THROWS(make_agent(0, VertexId{0}, VertexId{3}, Distance::from_units(5), Speed::zero()).validate(g));
}

TEST_CASE("single edge plan covers only that edge") {
  const RoadNetwork g = build_grid(1, 2, Distance::from_units(10), Speed::from_units(5));
  const SEAgent a = make_agent(3, VertexId{0}, VertexId{1}, Distance::from_units(5), Speed::from_units(5));
  const Plan p = shortest_plan(a, g);
  CHECK(p.cost == Time::from_units(2));
  const auto occ = occupancy(p, a, g);
  REQUIRE(occ.size() == 1);
  CHECK(occ[0].location == Location::edge(EdgeId{0}));
  // Head enters at 0 and the tail clears the far end one body length later.
  CHECK(occ[0].interval == Interval{Time::zero(), Time::from_units(3)});
  CHECK(occ[0].agent == 3);
}

TEST_CASE("two-edge plan with a wait") {
  const RoadNetwork g = build_grid(1, 3, Distance::from_units(10), Speed::from_units(5));
  const SEAgent a = make_agent(0, VertexId{0}, VertexId{2}, Distance::from_units(5), Speed::from_units(5));
  Itinerary it{*shortest_path(g, a.initial, a.final, a.speed), {Time::zero(), Time::from_units(4)}};
  const Plan p = make_plan(a, g, it);
  CHECK(p.cost == Time::from_units(8));
  REQUIRE(p.actions.size() == 3);
  CHECK(std::get<WaitAction>(p.actions[1]) == WaitAction{Time::from_units(2), Time::from_units(4)});
  const auto occ = occupancy(p, a, g);
  REQUIRE(occ.size() == 3);
  // e0 stays covered through the wait until the body is off it.
  CHECK(occ[0].interval == Interval{Time::zero(), Time::from_units(7)});
  CHECK(occ[1].location == Location::vertex(VertexId{1}));
  CHECK(occ[1].interval == Interval{Time::from_units(2), Time::from_units(7)});
  CHECK(occ[2].interval == Interval{Time::from_units(6), Time::from_units(9)});
  CHECK(itinerary_of(p, a, g) == Itinerary{it.route, it.waits});
}

TEST_CASE("malformed plans are rejected") {
  const RoadNetwork g = build_grid(1, 3, Distance::from_units(10), Speed::from_units(5));
  const SEAgent a = make_agent(0, VertexId{0}, VertexId{2}, Distance::from_units(5), Speed::from_units(5));
  const Plan good = shortest_plan(a, g);
  Plan p = good;
  p.cost = Time::from_units(5);
  CHECK_THROWS_AS(itinerary_of(p, a, g), PlanError);
  p = good;
  p.actions.pop_back();
  CHECK_THROWS_AS(itinerary_of(p, a, g), PlanError);
  p = good;
  std::get<MoveAction>(p.actions[1]).t = Time::from_units(3);
  CHECK_THROWS_AS(itinerary_of(p, a, g), PlanError);
  p = good;
  std::get<MoveAction>(p.actions[0]).location = Location::edge(EdgeId{1});
  CHECK_THROWS_AS(itinerary_of(p, a, g), PlanError);
  p = good;
  p.actions.insert(p.actions.begin(), WaitAction{Time::zero(), Time::zero()});
  CHECK_THROWS_AS(itinerary_of(p, a, g), PlanError);
  p = good;
  p.actions.push_back(WaitAction{Time::from_units(4), Time::from_units(1)});
  CHECK_THROWS_AS(itinerary_of(p, a, g), PlanError);
  CHECK_NOTHROW(itinerary_of(good, a, g));
}

TEST_CASE("occupancy matches tick-by-tick body simulation") {
  std::mt19937_64 rng(2024);
  int plans = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const RoadNetwork net = mixed_grid(rng, 3, 3);
    const auto n = static_cast<std::uint32_t>(net.vertex_count());
    const VertexId src{static_cast<std::uint32_t>(rng() % n)}, dst{static_cast<std::uint32_t>(rng() % n)};
    if (src == dst) continue;
    const SEAgent a = make_agent(static_cast<AgentId>(trial), src, dst,
                                 Distance::from_ticks(200 + static_cast<std::int64_t>(rng() % 6000)),
                                 Speed::from_ticks(600 + static_cast<std::int64_t>(rng() % 4400)));
    const auto route = oracle::random_route(net, src, dst, rng);
    REQUIRE(route.has_value());
    std::vector<std::int64_t> waits(route->edges.size());
    for (auto& w : waits) w = rng() % 3 ? 0 : static_cast<std::int64_t>(rng() % 3000);
    const Plan p = oracle::build_plan(a, net, *route, waits);
    const auto got = occupancy(p, a, net);
    const auto want = oracle::sampled_occupancy(p, a, net);
    REQUIRE(got.size() == 2 * route->edges.size() - 1);
    CHECK(got == want);
    CHECK(p.cost == itinerary_of(p, a, net).route.total_travel_time +
                        Time::from_ticks(std::accumulate(waits.begin(), waits.end(), std::int64_t{0})));
    ++plans;
  }
  CHECK(plans > 150);
}

TEST_CASE("first violation is the earliest overlap") {
  const RoadNetwork g = build_grid(1, 3, Distance::from_units(10), Speed::from_units(5));
  const SEAgent a = make_agent(0, VertexId{0}, VertexId{2}, Distance::from_units(5), Speed::from_units(5));
  const Plan p = shortest_plan(a, g);
  const Constraint late{Location::edge(EdgeId{1}), {Time::from_units(3), Time::from_units(4)}, 7};
  const Constraint early{Location::vertex(VertexId{1}), {Time::from_units(1), Time::from_units(3)}, 5};
  const Constraint clear{Location::edge(EdgeId{0}), {Time::from_units(3), Time::from_units(9)}, 5};
  const std::vector<Constraint> cs{late, early, clear};
  CHECK(is_consistent(p, a, g, cs) == early);
  const std::vector<Constraint> only_clear{clear};
  CHECK_FALSE(is_consistent(p, a, g, only_clear).has_value());
  const std::vector<Plan> plans{p, p};
  CHECK(solution_cost(plans) == Time::from_units(8));
}
