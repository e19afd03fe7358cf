// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "seapath/bench.hpp"

using namespace seapath;

namespace {

Scenario scenario_with(std::size_t agents) {
  GenerateOptions g;
  g.seed = 7;
  g.rows = g.cols = 12;
  g.block_spec.assign(agents / 2, 2);
  if (agents % 2) g.block_spec.push_back(1);
  return generate_scenario(g);
}

std::vector<std::vector<OccupancyRecord>> root_occupancy(const Scenario& s) {
  std::vector<std::vector<OccupancyRecord>> occ;
  for (const auto& a : s.agents) occ.push_back(occupancy(shortest_plan(a, s.net), a, s.net));
  return occ;
}

/// One constrained replanning job per agent, each against every other agent's shortest plan.
std::vector<PlanJob> replan_jobs(const Scenario& s) {
  std::vector<Plan> plans;
  for (const auto& a : s.agents) plans.push_back(shortest_plan(a, s.net));
  std::vector<PlanJob> jobs;
  for (const auto& a : s.agents) {
    PlanJob job;
    job.agent = a.id;
    job.constraints = derive_constraints(a, s.agents, plans, s.net);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

void BM_RunPlanJobs(benchmark::State& state, Exec exec) {
  const Scenario s = scenario_with(static_cast<std::size_t>(state.range(0)));
  const auto jobs = replan_jobs(s);
  for (auto _ : state) benchmark::DoNotOptimize(run_plan_jobs(jobs, s.agents, s.net, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(jobs.size()));
}

void BM_PairwiseConflicts(benchmark::State& state, Exec exec) {
  const auto occ = root_occupancy(scenario_with(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_conflicts(occ, exec));
}

void BM_EarliestConflict(benchmark::State& state, Exec exec) {
  const auto occ = root_occupancy(scenario_with(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(earliest_conflict(occ, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_RunPlanJobs, serial, Exec::Serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunPlanJobs, parallel, Exec::Parallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PairwiseConflicts, serial, Exec::Serial)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_PairwiseConflicts, parallel, Exec::Parallel)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_EarliestConflict, serial, Exec::Serial)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_EarliestConflict, parallel, Exec::Parallel)->Arg(8)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
