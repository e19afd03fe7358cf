#pragma once

#include <chrono>
#include <span>
#include <vector>

#include "seapath/kernels.hpp"

namespace seapath {

/// Where the high-level searches send their single-agent planning work.
class PlanService {
public:
  virtual ~PlanService() = default;

  /// Outcomes in job order. Implementations may run jobs concurrently.
  virtual std::vector<PlanOutcome> plan(std::span<const PlanJob> jobs) = 0;

  std::size_t requests() const { return requests_; }
  /// Wall time spent inside plan().
  double busy_ms() const { return busy_ms_; }

protected:
  std::size_t requests_ = 0;
  double busy_ms_ = 0.0;
};

class LocalPlanService final : public PlanService {
public:
  LocalPlanService(std::span<const SEAgent> agents, const RoadNetwork& net, Exec exec = Exec::Serial,
                   std::size_t lowlevel_cap = LowLevelOptions{}.max_expansions)
      : agents_(agents), net_(net), exec_(exec), cap_(lowlevel_cap) {}

  std::vector<PlanOutcome> plan(std::span<const PlanJob> jobs) override {
    requests_ += jobs.size();
    const auto start = std::chrono::steady_clock::now();
    auto out = run_plan_jobs(jobs, agents_, net_, exec_, cap_);
    busy_ms_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

private:
  std::span<const SEAgent> agents_;
  const RoadNetwork& net_;
  Exec exec_;
  std::size_t cap_;
};

}  // namespace seapath
