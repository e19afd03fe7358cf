#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seapath/kernels.hpp"

using namespace seapath;

namespace {

struct Instance {
  RoadNetwork net;
  std::vector<SEAgent> agents;
  std::vector<std::vector<OccupancyRecord>> occ;
};

Instance random_instance(std::mt19937_64& rng, std::size_t k) {
  Instance s;
  s.net = build_grid(4, 4, Distance::from_units(10), Speed::from_units(5));
  const auto n = static_cast<std::uint32_t>(s.net.vertex_count());
  for (std::size_t i = 0; i < k; ++i) {
    SEAgent a;
    a.id = static_cast<AgentId>(i);
    a.initial = VertexId{static_cast<std::uint32_t>(rng() % n)};
    do a.final = VertexId{static_cast<std::uint32_t>(rng() % n)};
    while (a.final == a.initial);
    a.length = Distance::from_units(5);
    a.speed = Speed::from_units(5);
    const Path r = *oracle::random_route(s.net, a.initial, a.final, rng);
    std::vector<std::int64_t> waits(r.edges.size());
    for (auto& w : waits) w = rng() % 3 ? 0 : 1000 * static_cast<std::int64_t>(rng() % 4);
    s.occ.push_back(occupancy(oracle::build_plan(a, s.net, r, waits), a, s.net));
    s.agents.push_back(a);
  }
  return s;
}

std::optional<PairConflict> brute_pair(const std::vector<OccupancyRecord>& x, const std::vector<OccupancyRecord>& y) {
  std::optional<PairConflict> best;
  for (const auto& r : x)
    for (const auto& s : y) {
      if (r.location != s.location || !intersects(r.interval, s.interval)) continue;
      const PairConflict c{std::min(r.agent, s.agent), std::max(r.agent, s.agent), r.location,
                           std::max(r.interval.start, s.interval.start)};
      if (!best || std::tie(c.start, c.location) < std::tie(best->start, best->location)) best = c;
    }
  return best;
}

}  // namespace

TEST_CASE("pairwise conflicts agree with brute force in both modes") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance s = random_instance(rng, 2 + rng() % 7);
    std::vector<PairConflict> want;
    for (std::size_t i = 0; i < s.occ.size(); ++i)
      for (std::size_t j = i + 1; j < s.occ.size(); ++j)
        if (auto c = brute_pair(s.occ[i], s.occ[j])) want.push_back(*c);
    const auto serial = pairwise_conflicts(s.occ, Exec::Serial);
    const auto parallel = pairwise_conflicts(s.occ, Exec::Parallel);
    CHECK(serial == want);
    CHECK(parallel == want);

    std::optional<PairConflict> first;
    for (const auto& c : want)
      if (!first || std::tie(c.start, c.a, c.b, c.location) < std::tie(first->start, first->a, first->b, first->location))
        first = c;
    CHECK(earliest_conflict(s.occ, Exec::Serial) == first);
    CHECK(earliest_conflict(s.occ, Exec::Parallel) == first);
  }
  CHECK(pairwise_conflicts({}, Exec::Parallel).empty());
}

TEST_CASE("plan jobs give identical outcomes serially and in parallel") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance s = random_instance(rng, 6);
    std::vector<PlanJob> jobs;
    for (const auto& a : s.agents) {
      PlanJob job;
      job.agent = a.id;
      job.constraints = ConstraintSet(derive_constraints(a.id, s.occ).constraints);
      job.mode = trial % 2 ? PlanMode::Optimal : PlanMode::Replan;
      job.quantum = Time::from_units(1);
      jobs.push_back(job);
    }
    const auto serial = run_plan_jobs(jobs, s.agents, s.net, Exec::Serial);
    const auto parallel = run_plan_jobs(jobs, s.agents, s.net, Exec::Parallel);
    CHECK(serial == parallel);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      REQUIRE(serial[i].plan.has_value());
      CHECK_FALSE(is_consistent(*serial[i].plan, s.agents[i], s.net, jobs[i].constraints.constraints).has_value());
    }
  }
}

TEST_CASE("agent lookup and error propagation") {
  std::mt19937_64 rng(1);
  const Instance s = random_instance(rng, 3);
  CHECK(agent_index(s.agents, 2) == 2);
  CHECK_THROWS_AS(agent_index(s.agents, 7), std::out_of_range);
  std::vector<PlanJob> jobs(3);
  jobs[1].agent = 7;
  CHECK_THROWS_AS(run_plan_jobs(jobs, s.agents, s.net, Exec::Parallel), std::out_of_range);
  CHECK_THROWS_AS(run_plan_jobs(jobs, s.agents, s.net, Exec::Serial), std::out_of_range);
}
