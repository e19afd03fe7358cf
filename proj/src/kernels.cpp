#include "seapath/kernels.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <tuple>

namespace seapath {

std::size_t agent_index(std::span<const SEAgent> agents, AgentId id) {
  auto it = std::lower_bound(agents.begin(), agents.end(), id, [](const SEAgent& a, AgentId v) { return a.id < v; });
  if (it == agents.end() || it->id != id) throw std::out_of_range("unknown agent " + std::to_string(id));
  return static_cast<std::size_t>(it - agents.begin());
}

PlanOutcome run_plan_job(const PlanJob& job, std::span<const SEAgent> agents, const RoadNetwork& net,
                         std::size_t lowlevel_cap) {
  const SEAgent& agent = agents[agent_index(agents, job.agent)];
  PlanOutcome out;
  if (job.mode == PlanMode::Optimal) {
    std::optional<Path> witness;
    if (job.seed) witness = itinerary_of(*job.seed, agent, net).route;
    out.plan = optimal_search(agent, net, job.constraints, job.quantum, job.required, witness ? &*witness : nullptr);
    return out;
  }
  LowLevelOptions opts;
  opts.seed = job.seed;
  opts.max_expansions = lowlevel_cap;
  LowLevelStats stats;
  out.plan = low_level_search(agent, net, job.constraints, opts, &stats);
  out.fallback = stats.capped;
  return out;
}

std::vector<PlanOutcome> run_plan_jobs(std::span<const PlanJob> jobs, std::span<const SEAgent> agents,
                                       const RoadNetwork& net, Exec exec, std::size_t lowlevel_cap) {
  std::vector<PlanOutcome> out(jobs.size());
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = run_plan_job(jobs[i], agents, net, lowlevel_cap);
    return out;
  }
  std::vector<std::exception_ptr> errors(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = run_plan_job(jobs[i], agents, net, lowlevel_cap);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace {

std::vector<OccupancyRecord> sorted_by_location(const std::vector<OccupancyRecord>& records) {
  auto out = records;
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.location, x.interval) < std::tie(y.location, y.interval);
  });
  return out;
}

std::optional<PairConflict> pair_conflict(const std::vector<OccupancyRecord>& x, const std::vector<OccupancyRecord>& y) {
  std::optional<PairConflict> best;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].location < y[j].location) {
      ++i;
    } else if (y[j].location < x[i].location) {
      ++j;
    } else {
      const Location loc = x[i].location;
      std::size_t ie = i, je = j;
      while (ie < x.size() && x[ie].location == loc) ++ie;
      while (je < y.size() && y[je].location == loc) ++je;
      for (std::size_t p = i; p < ie; ++p) {
        for (std::size_t q = j; q < je; ++q) {
          if (!intersects(x[p].interval, y[q].interval)) continue;
          const Time start = std::max(x[p].interval.start, y[q].interval.start);
          if (!best || std::tie(start, loc) < std::tie(best->start, best->location)) {
            AgentId a = x[p].agent, b = y[q].agent;
            if (b < a) std::swap(a, b);
            best = PairConflict{a, b, loc, start};
          }
        }
      }
      i = ie;
      j = je;
    }
  }
  return best;
}

}  // namespace

std::vector<PairConflict> pairwise_conflicts(std::span<const std::vector<OccupancyRecord>> occupancies, Exec exec) {
  const std::size_t n = occupancies.size();
  std::vector<std::vector<OccupancyRecord>> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = sorted_by_location(occupancies[i]);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<std::optional<PairConflict>> found(pairs.size());
  const auto m = static_cast<std::int64_t>(pairs.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < m; ++k) found[k] = pair_conflict(sorted[pairs[k].first], sorted[pairs[k].second]);
  } else {
    for (std::int64_t k = 0; k < m; ++k) found[k] = pair_conflict(sorted[pairs[k].first], sorted[pairs[k].second]);
  }

  std::vector<PairConflict> out;
  for (auto& f : found)
    if (f) out.push_back(*f);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return out;
}

std::optional<PairConflict> earliest_conflict(std::span<const std::vector<OccupancyRecord>> occupancies, Exec exec) {
  const auto all = pairwise_conflicts(occupancies, exec);
  if (all.empty()) return std::nullopt;
  return *std::min_element(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return std::tie(x.start, x.a, x.b, x.location) < std::tie(y.start, y.a, y.b, y.location);
  });
}

}  // namespace seapath
