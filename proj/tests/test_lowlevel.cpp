#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seapath/lowlevel.hpp"

using namespace seapath;

namespace {

const Distance kLen = Distance::from_units(10);
const Speed kSpeed = Speed::from_units(5);

SEAgent agent_on(AgentId id, std::uint32_t from, std::uint32_t to) {
  SEAgent a;
  a.id = id;
  a.initial = VertexId{from};
  a.final = VertexId{to};
  a.length = Distance::from_units(5);
  a.speed = kSpeed;
  return a;
}

Constraint on(Location l, std::int64_t s, std::int64_t e, AgentId owner = 9) {
  return Constraint{l, {Time::from_units(s), e < 0 ? Time::max() : Time::from_units(e)}, owner};
}

ReplanNode root_of(const Plan& p) {
  ReplanNode n;
  n.id = 1;
  n.plan = p;
  n.cost = p.cost;
  return n;
}

bool honours(const Plan& p, const SEAgent& a, const RoadNetwork& net, const ConstraintSet& cs) {
  return !oracle::records_conflict(oracle::sampled_occupancy(p, a, net), cs.constraints.empty()
                                                                              ? std::vector<OccupancyRecord>{}
                                                                              : [&] {
                                                                                  std::vector<OccupancyRecord> r;
                                                                                  for (const auto& c : cs.constraints)
                                                                                    r.push_back({c.location, c.interval, c.owner});
                                                                                  return r;
                                                                                }());
}

}  // namespace

TEST_CASE("derive constraints from another agent's plan") {
  const RoadNetwork g = build_grid(1, 3, kLen, kSpeed);
  const std::vector<SEAgent> agents{agent_on(0, 0, 2), agent_on(1, 2, 0)};
  const std::vector<Plan> plans{shortest_plan(agents[0], g), shortest_plan(agents[1], g)};
  const ConstraintSet cs = derive_constraints(agents[1], agents, plans, g);
  REQUIRE(cs.size() == 3);
  CHECK(cs.constraints[0] == on(Location::edge(EdgeId{0}), 0, 3, 0));
  CHECK(cs.constraints[1] == on(Location::vertex(VertexId{1}), 2, 3, 0));
  CHECK(cs.constraints[2] == on(Location::edge(EdgeId{1}), 2, 5, 0));
  CHECK(derive_constraints(agents[0], std::span(agents).first(1), std::span(plans).first(1), g).empty());
  CHECK(cs.latest_finite_end() == Time::from_units(5));
}

TEST_CASE("empty constraints give the unconstrained shortest plan") {
  const RoadNetwork g = build_grid(3, 3, kLen, kSpeed);
  const SEAgent a = agent_on(0, 0, 8);
  const Plan p = low_level_search(a, g, {});
  CHECK(p == shortest_plan(a, g));
  CHECK(p.cost == Time::from_units(8));
}

TEST_CASE("corridor wait is the minimal shift") {
  const RoadNetwork g = build_grid(1, 4, kLen, kSpeed);
  const SEAgent a = agent_on(0, 0, 3);
  const ConstraintSet cs({on(Location::edge(EdgeId{1}), 0, 6)});
  const Plan p = low_level_search(a, g, cs);
  CHECK(p.cost == Time::from_units(6 + 4));
  CHECK_FALSE(is_consistent(p, a, g, cs.constraints).has_value());
  const Itinerary it = itinerary_of(p, a, g);
  CHECK(it.waits == std::vector<Time>{Time::zero(), Time::from_units(4), Time::zero()});
  // One tick less and the body still overlaps the constraint.
  Itinerary shorter = it;
  shorter.waits[1] -= Time::from_ticks(1);
  CHECK(is_consistent(make_plan(a, g, shorter), a, g, cs.constraints).has_value());

  const ReplanNode root = root_of(shortest_plan(a, g));
  const auto violated = *is_consistent(root.plan, a, g, cs.constraints);
  const auto waited = create_wait(root, violated, a, g);
  REQUIRE(waited);
  const auto occ = occupancy(waited->plan, a, g);
  CHECK(occ[2].interval == Interval{Time::from_units(6), Time::from_units(9)});
  CHECK_FALSE(create_alt_path(root, violated, a, g).has_value());
  CHECK_FALSE(create_wait(root, on(Location::edge(EdgeId{1}), 0, -1), a, g).has_value());

  // A second wait at the same vertex merges into one.
  const ConstraintSet later({on(Location::edge(EdgeId{1}), 0, 6), on(Location::edge(EdgeId{1}), 6, 8, 8)});
  const Plan twice = low_level_search(a, g, later);
  std::size_t waits = 0;
  for (const auto& act : twice.actions) waits += std::holds_alternative<WaitAction>(act);
  CHECK(waits == 1);
  CHECK(twice.cost == Time::from_units(12));
}

TEST_CASE("alternate path on a 2x2 grid") {
  const RoadNetwork g = build_grid(2, 2, kLen, kSpeed);
  const SEAgent a = agent_on(0, 0, 3);
  const ReplanNode root = root_of(shortest_plan(a, g));
  const auto first = std::get<MoveAction>(root.plan.actions[0]).location;
  const auto alt = create_alt_path(root, on(first, 0, 10), a, g);
  REQUIRE(alt);
  const Itinerary it = itinerary_of(alt->plan, a, g);
  CHECK(it.route.edges.size() == 2);
  CHECK(Location::edge(it.route.edges[0]) != first);
  CHECK(alt->blocked == std::vector<Location>{first});
  CHECK(alt->cost == root.cost);
}

TEST_CASE("alternate path keeps the prefix") {
  const RoadNetwork g = build_grid(3, 3, kLen, kSpeed);
  const SEAgent a = agent_on(0, 0, 8);
  const ReplanNode root = root_of(shortest_plan(a, g));
  // Route v0 v1 v2 v5 v8; blocking its second edge re-routes from v1.
  const auto second = std::get<MoveAction>(root.plan.actions[1]).location;
  const auto alt = create_alt_path(root, on(second, 0, 20), a, g);
  REQUIRE(alt);
  CHECK(alt->plan.actions[0] == root.plan.actions[0]);
  CHECK(std::get<MoveAction>(alt->plan.actions[1]).location != second);
  // v2's only other neighbour is already on the route.
  const auto third = std::get<MoveAction>(root.plan.actions[2]).location;
  CHECK_FALSE(create_alt_path(root, on(third, 0, 20), a, g).has_value());
  CHECK(alt->cost >= root.cost);
}

TEST_CASE("replanning honours random constraint sets") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const RoadNetwork g = build_grid(3 + static_cast<int>(rng() % 2), 3 + static_cast<int>(rng() % 2), kLen, kSpeed);
    const auto n = static_cast<std::uint32_t>(g.vertex_count());
    const SEAgent a = agent_on(0, static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % n));
    if (a.initial == a.final) continue;
    std::vector<Constraint> cs;
    for (int k = 0, m = static_cast<int>(rng() % 8); k < m; ++k) {
      const auto l = rng() % 2 ? Location::edge(EdgeId{static_cast<std::uint32_t>(rng() % g.edge_count())})
                               : Location::vertex(VertexId{static_cast<std::uint32_t>(rng() % n)});
      const auto s = static_cast<std::int64_t>(rng() % 12);
      cs.push_back(on(l, s, s + 1 + static_cast<std::int64_t>(rng() % 6), 1 + static_cast<AgentId>(k)));
    }
    const ConstraintSet set(cs);
    LowLevelStats stats;
    const Plan p = low_level_search(a, g, set, {}, &stats);
    CHECK_FALSE(is_consistent(p, a, g, set.constraints).has_value());
    CHECK(honours(p, a, g, set));
    CHECK(p.cost >= shortest_plan(a, g).cost);
    CHECK_NOTHROW(itinerary_of(p, a, g));
    CHECK(stats.generated >= 1);
    CHECK(stats.generated <= 1 + 2 * stats.expanded);
    CHECK_FALSE(stats.capped);
  }
}

TEST_CASE("wait lattice of uniform grids") {
  const RoadNetwork g = build_grid(2, 2, kLen, kSpeed);
  const std::vector<SEAgent> agents{agent_on(0, 0, 3)};
  CHECK(time_quantum(agents, g) == Time::from_units(1));
}

TEST_CASE("optimal search matches exhaustive lattice enumeration") {
  std::mt19937_64 rng(4242);
  int compared = 0, with_required = 0;
  for (int trial = 0; trial < 160; ++trial) {
    const RoadNetwork g = build_grid(3, 3, kLen, kSpeed);
    const auto n = static_cast<std::uint32_t>(g.vertex_count());
    const SEAgent a = agent_on(0, static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % n));
    if (a.initial == a.final) continue;
    std::vector<Constraint> cs;
    for (int k = 0, m = 1 + static_cast<int>(rng() % 7); k < m; ++k) {
      const auto l = rng() % 2 ? Location::edge(EdgeId{static_cast<std::uint32_t>(rng() % g.edge_count())})
                               : Location::vertex(VertexId{static_cast<std::uint32_t>(rng() % n)});
      const bool forever = rng() % 10 == 0;
      const auto s = forever ? 0 : static_cast<std::int64_t>(rng() % 10);
      cs.push_back(on(l, s, forever ? -1 : s + 1 + static_cast<std::int64_t>(rng() % 5), 1 + static_cast<AgentId>(k)));
    }
    std::vector<Location> required;
    if (rng() % 3 == 0) {
      required.push_back(Location::edge(EdgeId{static_cast<std::uint32_t>(rng() % g.edge_count())}));
      ++with_required;
    }
    const ConstraintSet set(cs);
    const Time q = time_quantum(std::span(&a, 1), g);
    const auto got = optimal_search(a, g, set, q, required);

    // Blocks start at 0, so a route is usable iff it avoids them; waiting at
    // the start until every finite constraint ends then always works.
    std::vector<OccupancyRecord> blocks;
    for (const auto& c : set.constraints) blocks.push_back({c.location, c.interval, c.owner});
    std::vector<Path> usable;
    std::int64_t longest = 0;
    for (const Path& r : oracle::all_routes(g, a.initial, a.final)) {
      bool ok = true;
      for (const auto& l : required) ok = ok && std::find(r.edges.begin(), r.edges.end(), l.as_edge()) != r.edges.end();
      for (const auto& c : set.constraints) {
        if (c.interval.end != Time::max()) continue;
        if (c.location.is_edge()) ok = ok && std::find(r.edges.begin(), r.edges.end(), c.location.as_edge()) == r.edges.end();
        else ok = ok && std::find(r.vertices.begin() + 1, r.vertices.end() - 1, c.location.as_vertex()) == r.vertices.end() - 1;
      }
      if (!ok) continue;
      usable.push_back(r);
      longest = std::max(longest, oracle::route_ticks(g, r, a.speed));
    }
    std::optional<std::int64_t> best;
    const auto found = oracle::cheapest_lattice_plan(
        a, g, usable, q.ticks(), set.latest_finite_end().ticks() + longest,
        [&](const Plan& p) { return !oracle::records_conflict(occupancy(p, a, g), blocks); });
    if (found) best = found->cost.ticks();
    REQUIRE(got.has_value() == best.has_value());
    if (got) {
      CHECK(got->cost.ticks() == *best);
      CHECK_FALSE(is_consistent(*got, a, g, set.constraints).has_value());
    }
    ++compared;
  }
  CHECK(compared > 100);
  CHECK(with_required > 20);
}
