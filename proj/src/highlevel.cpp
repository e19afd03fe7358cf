#include "seapath/highlevel.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "seapath/hashing.hpp"

namespace seapath {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Greedy: return "greedy";
    case Algorithm::XCBS: return "xcbs";
    case Algorithm::XCBSA: return "xcbs-a";
    case Algorithm::XCBSAEff: return "xcbs-a-eff";
    case Algorithm::XCBSLA: return "xcbs-la";
  }
  return "?";
}

std::string_view to_string(EffHeuristic h) {
  switch (h) {
    case EffHeuristic::Deeper: return "deeper";
    case EffHeuristic::LargestBlock: return "largest-block";
    case EffHeuristic::MostSingletons: return "most-singletons";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::Greedy, Algorithm::XCBS, Algorithm::XCBSA, Algorithm::XCBSAEff, Algorithm::XCBSLA})
    if (to_string(a) == name) return a;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

EffHeuristic parse_heuristic(std::string_view name) {
  for (auto h : {EffHeuristic::Deeper, EffHeuristic::LargestBlock, EffHeuristic::MostSingletons})
    if (to_string(h) == name) return h;
  throw std::invalid_argument("unknown heuristic '" + std::string(name) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

/// Shared state of one solve call.
class Context {
public:
  Context(Algorithm algo, std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options)
      : algo(algo), net(net), options(options), start(Clock::now()) {
    sorted.assign(agents.begin(), agents.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      sorted[i].validate(net);
      if (i > 0 && sorted[i].id == sorted[i - 1].id)
        throw std::invalid_argument("duplicate agent id " + std::to_string(sorted[i].id));
    }
    if (options.service) {
      service = options.service;
    } else {
      owned = std::make_unique<LocalPlanService>(sorted, net, options.exec, options.lowlevel_cap);
      service = owned.get();
    }
    requests_at_start = service->requests();
    busy_at_start = service->busy_ms();
    if (options.time_limit) deadline = start + *options.time_limit;
  }

  void check_deadline() const {
    if (deadline && Clock::now() > *deadline) throw SearchTimeout("time limit exceeded");
  }

  std::vector<std::vector<OccupancyRecord>> occupancies(std::span<const Plan> solution) const {
    std::vector<std::vector<OccupancyRecord>> occ(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) occ[i] = occupancy(solution[i], sorted[i], net);
    return occ;
  }

  std::vector<AgentId> ids() const {
    std::vector<AgentId> out;
    for (const auto& a : sorted) out.push_back(a.id);
    return out;
  }

  std::vector<Plan> root_solution() const {
    std::vector<Plan> plans;
    for (const auto& a : sorted) plans.push_back(shortest_plan(a, net));
    return plans;
  }

  void finish(SolveReport& r) const {
    r.algorithm = std::string(to_string(algo));
    r.plan_requests = service->requests() - requests_at_start;
    r.plan_service_ms = service->busy_ms() - busy_at_start;
    r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }

  Algorithm algo;
  std::vector<SEAgent> sorted;
  const RoadNetwork& net;
  const SolveOptions& options;
  PlanService* service = nullptr;
  std::unique_ptr<LocalPlanService> owned;
  Clock::time_point start;
  std::optional<Clock::time_point> deadline;
  std::size_t requests_at_start = 0;
  double busy_at_start = 0.0;
};

template <class Body>
SolveReport run_guarded(Algorithm algo, std::span<const SEAgent> agents, const RoadNetwork& net,
                        const SolveOptions& options, Body body) {
  Context ctx(algo, agents, net, options);
  SolveReport report;
  try {
    body(ctx, report);
  } catch (const SearchTimeout&) {
    report.status = "timeout";
    report.solution.clear();
    report.cost = Time::zero();
  }
  ctx.finish(report);
  return report;
}

Time total_cost(std::span<const Plan> plans) { return solution_cost(plans); }

BlockStats block_stats(const Partition& p) { return {p.largest_block(), p.singleton_count()}; }

std::vector<std::vector<AgentId>> non_singleton_blocks(const Partition& p) {
  std::vector<std::vector<AgentId>> out;
  for (const auto& b : p.blocks)
    if (b.size() > 1) out.push_back(b);
  return out;
}

/// Min-heap over (cost, tie key, insertion sequence).
class OpenList {
public:
  void push(CTNode node) {
    const auto seq = next_seq_++;
    heap_.emplace(node.cost.ticks(), seq);
    store_.emplace(seq, std::move(node));
  }
  bool empty() const { return heap_.empty(); }
  Time top_cost() const { return Time::from_ticks(heap_.top().first); }
  CTNode pop() {
    const auto seq = heap_.top().second;
    heap_.pop();
    auto it = store_.find(seq);
    CTNode n = std::move(it->second);
    store_.erase(it);
    return n;
  }

private:
  using Entry = std::pair<std::int64_t, std::uint64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::unordered_map<std::uint64_t, CTNode> store_;
  std::uint64_t next_seq_ = 0;
};

// ---------------------------------------------------------------- XCBS-A

/// Revised plan per agent of every non-singleton block, in block order.
struct Revisions {
  std::vector<std::vector<AgentId>> blocks;
  std::vector<std::vector<Plan>> plans;  // plans[b][k] revises blocks[b][k]
  std::size_t fallbacks = 0;
};

PlanJob replan_job(const Context& ctx, const CTNode& node, std::span<const std::vector<OccupancyRecord>> occ,
                   AgentId agent) {
  PlanJob job;
  job.agent = agent;
  job.constraints = derive_constraints(agent, occ);
  job.seed = node.solution[agent_index(ctx.sorted, agent)];
  job.mode = PlanMode::Replan;
  return job;
}

Revisions revise_blocks(const Context& ctx, const CTNode& node, const Partition& partition) {
  Revisions rev;
  rev.blocks = non_singleton_blocks(partition);
  const auto occ = ctx.occupancies(node.solution);
  std::vector<PlanJob> jobs;
  for (const auto& block : rev.blocks)
    for (AgentId a : block) jobs.push_back(replan_job(ctx, node, occ, a));
  auto outcomes = ctx.service->plan(jobs);
  std::size_t k = 0;
  for (const auto& block : rev.blocks) {
    auto& plans = rev.plans.emplace_back();
    for (std::size_t i = 0; i < block.size(); ++i, ++k) {
      rev.fallbacks += outcomes[k].fallback ? 1 : 0;
      plans.push_back(std::move(*outcomes[k].plan));
    }
  }
  return rev;
}

/// Odometer over one choice per block, last block fastest.
template <class F>
void for_each_choice(const std::vector<std::size_t>& sizes, F f) {
  std::vector<std::size_t> pick(sizes.size(), 0);
  while (true) {
    f(pick);
    std::size_t b = sizes.size();
    while (b > 0) {
      --b;
      if (++pick[b] < sizes[b]) break;
      pick[b] = 0;
      if (b == 0) return;
    }
    if (sizes.empty()) return;
  }
}

CTNode make_child(const Context& ctx, const CTNode& parent, const Revisions& rev, const std::vector<std::size_t>& pick,
                  std::uint64_t id) {
  CTNode child;
  child.id = id;
  child.parent = parent.id;
  child.depth = parent.depth + 1;
  child.solution = parent.solution;
  for (std::size_t b = 0; b < rev.blocks.size(); ++b)
    child.solution[agent_index(ctx.sorted, rev.blocks[b][pick[b]])] = rev.plans[b][pick[b]];
  child.cost = total_cost(child.solution);
  return child;
}

std::vector<std::size_t> block_sizes(const Revisions& rev) {
  std::vector<std::size_t> sizes;
  for (const auto& b : rev.blocks) sizes.push_back(b.size());
  return sizes;
}

std::size_t product(const std::vector<std::size_t>& sizes) {
  return std::accumulate(sizes.begin(), sizes.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<CTNode> expand_xcbsa(const Context& ctx, const CTNode& node, const Partition& partition,
                                 std::uint64_t next_id, std::size_t* fallbacks) {
  const Revisions rev = revise_blocks(ctx, node, partition);
  if (fallbacks) *fallbacks += rev.fallbacks;
  std::vector<CTNode> children;
  for_each_choice(block_sizes(rev), [&](const auto& pick) { children.push_back(make_child(ctx, node, rev, pick, next_id++)); });
  return children;
}

void xcbsa_search(Context& ctx, SolveReport& report) {
  auto* obs = ctx.options.observer;
  const auto ids = ctx.ids();
  OpenList open;
  std::unordered_set<Key, KeyHash> seen;
  std::unordered_map<std::uint64_t, Partition> partitions;

  CTNode root;
  root.id = 1;
  root.solution = ctx.root_solution();
  root.cost = total_cost(root.solution);
  seen.insert(solution_key(root.solution));
  open.push(std::move(root));
  report.nodes_generated = 1;
  std::uint64_t next_id = 2;

  while (!open.empty()) {
    ctx.check_deadline();
    CTNode node = open.pop();
    ++report.nodes_evaluated;
    const auto occ = ctx.occupancies(node.solution);
    Validation v = validate(occ, ids);
    if (!node.parent) report.root_blocks = v.partition.blocks.size();
    if (obs) {
      const Partition* pp = node.parent ? &partitions.at(*node.parent) : nullptr;
      obs->on_evaluated(ctx.algo, node, v.partition, pp);
    }
    if (!v.has_conflict) {
      report.solution = std::move(node.solution);
      report.cost = node.cost;
      return;
    }
    auto children = expand_xcbsa(ctx, node, v.partition, next_id, &report.lowlevel_fallbacks);
    next_id += children.size();
    if (obs) obs->on_expanded(ctx.algo, node, {children.size(), product(v.partition.non_singleton_sizes())});
    partitions.emplace(node.id, std::move(v.partition));
    for (auto& child : children) {
      if (obs) obs->on_generated(ctx.algo, node, child);
      if (!seen.insert(solution_key(child.solution)).second) continue;
      ++report.nodes_generated;
      open.push(std::move(child));
    }
  }
  throw std::logic_error("constraint tree exhausted without a valid solution");
}

// ------------------------------------------------------------ XCBS-A-Eff

struct PotentialOrder {
  EffHeuristic heuristic;
  std::size_t rank(const PotentialEntry& e) const {
    switch (heuristic) {
      case EffHeuristic::Deeper: return e.depth;
      case EffHeuristic::LargestBlock: return e.parent_block_stats.largest;
      case EffHeuristic::MostSingletons: return e.parent_block_stats.singletons;
    }
    return 0;
  }
  /// True when `a` should come after `b`.
  bool operator()(const PotentialEntry& a, const PotentialEntry& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    const auto ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb;
    return a.sequence > b.sequence;
  }
};

void xcbsa_eff_search(Context& ctx, SolveReport& report) {
  auto* obs = ctx.options.observer;
  const auto ids = ctx.ids();
  OpenList open;
  std::priority_queue<PotentialEntry, std::vector<PotentialEntry>, PotentialOrder> potential(
      PotentialOrder{ctx.options.heuristic});
  std::unordered_set<Key, KeyHash> seen;
  std::unordered_map<std::uint64_t, Partition> partitions;
  // Expanded nodes, kept so deferred children can be regenerated.
  std::unordered_map<std::uint64_t, CTNode> expanded;
  std::uint64_t next_id = 2;
  std::uint64_t next_seq = 0;

  CTNode root;
  root.id = 1;
  root.solution = ctx.root_solution();
  root.cost = total_cost(root.solution);
  seen.insert(solution_key(root.solution));
  open.push(std::move(root));
  report.nodes_generated = 1;

  auto admit = [&](const CTNode& parent, CTNode child) {
    if (obs) obs->on_generated(ctx.algo, parent, child);
    if (!seen.insert(solution_key(child.solution)).second) return;
    ++report.nodes_generated;
    open.push(std::move(child));
  };

  while (!open.empty() || !potential.empty()) {
    ctx.check_deadline();
    if (!potential.empty() && (open.empty() || potential.top().cost < open.top_cost())) {
      const PotentialEntry entry = potential.top();
      potential.pop();
      const CTNode& parent = expanded.at(entry.parent);
      const auto occ = ctx.occupancies(parent.solution);
      std::vector<PlanJob> jobs;
      for (AgentId a : entry.choice) jobs.push_back(replan_job(ctx, parent, occ, a));
      auto outcomes = ctx.service->plan(jobs);
      CTNode child;
      child.id = next_id++;
      child.parent = parent.id;
      child.depth = parent.depth + 1;
      child.solution = parent.solution;
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        report.lowlevel_fallbacks += outcomes[k].fallback ? 1 : 0;
        child.solution[agent_index(ctx.sorted, entry.choice[k])] = std::move(*outcomes[k].plan);
      }
      child.cost = total_cost(child.solution);
      if (child.cost != entry.cost) throw std::logic_error("regenerated child cost differs from its potential entry");
      admit(parent, std::move(child));
      continue;
    }

    CTNode node = open.pop();
    ++report.nodes_evaluated;
    const auto occ = ctx.occupancies(node.solution);
    Validation v = validate(occ, ids);
    if (!node.parent) report.root_blocks = v.partition.blocks.size();
    if (obs) {
      const Partition* pp = node.parent ? &partitions.at(*node.parent) : nullptr;
      obs->on_evaluated(ctx.algo, node, v.partition, pp);
    }
    if (!v.has_conflict) {
      report.solution = std::move(node.solution);
      report.cost = node.cost;
      return;
    }

    const Revisions rev = revise_blocks(ctx, node, v.partition);
    report.lowlevel_fallbacks += rev.fallbacks;
    const auto sizes = block_sizes(rev);
    std::vector<std::vector<Time>> gain(rev.blocks.size());
    for (std::size_t b = 0; b < rev.blocks.size(); ++b)
      for (std::size_t k = 0; k < rev.blocks[b].size(); ++k)
        gain[b].push_back(rev.plans[b][k].cost - node.solution[agent_index(ctx.sorted, rev.blocks[b][k])].cost);

    std::vector<std::vector<std::size_t>> picks;
    std::vector<Time> costs;
    for_each_choice(sizes, [&](const auto& pick) {
      Time c = node.cost;
      for (std::size_t b = 0; b < pick.size(); ++b) c += gain[b][pick[b]];
      picks.push_back(pick);
      costs.push_back(c);
    });
    const auto best = static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
    if (obs) obs->on_expanded(ctx.algo, node, {picks.size(), product(sizes)});

    const BlockStats stats = block_stats(v.partition);
    for (std::size_t i = 0; i < picks.size(); ++i) {
      if (i == best) continue;
      PotentialEntry e;
      e.parent = node.id;
      for (std::size_t b = 0; b < picks[i].size(); ++b) e.choice.push_back(rev.blocks[b][picks[i][b]]);
      e.cost = costs[i];
      e.depth = node.depth + 1;
      e.parent_block_stats = stats;
      e.sequence = next_seq++;
      potential.push(std::move(e));
    }
    CTNode child = make_child(ctx, node, rev, picks[best], next_id++);
    partitions.emplace(node.id, std::move(v.partition));
    const std::uint64_t node_id = node.id;
    expanded.emplace(node_id, std::move(node));
    admit(expanded.at(node_id), std::move(child));
  }
  throw std::logic_error("constraint tree exhausted without a valid solution");
}

// ------------------------------------------------------------------ XCBS

Key constraint_key(const CTNode& node) {
  Key key;
  for (const auto& per_agent : node.required) {
    std::vector<Location> sorted = per_agent;
    std::sort(sorted.begin(), sorted.end());
    key.push_back(static_cast<std::int64_t>(sorted.size()));
    for (const auto& l : sorted) key.push_back(static_cast<std::int64_t>(l.kind()) << 32 | l.index());
  }
  for (const auto& per_agent : node.constraints) {
    std::vector<Constraint> sorted = per_agent;
    std::sort(sorted.begin(), sorted.end());
    key.push_back(static_cast<std::int64_t>(sorted.size()));
    for (const auto& c : sorted) {
      key.push_back(static_cast<std::int64_t>(c.location.kind()) << 32 | c.location.index());
      key.push_back(c.interval.start.ticks());
      key.push_back(c.interval.end.ticks());
      key.push_back(c.owner);
    }
  }
  return key;
}

struct XcbsResult {
  std::vector<Plan> plans;
  std::size_t generated = 0;
  std::size_t evaluated = 0;
};

/// XCBS over the agents at `members` (indices into ctx.sorted, ascending).
/// Only the top-level call (`top` set) reports to the observer.
XcbsResult xcbs_core(const Context& ctx, std::span<const std::size_t> members, Time quantum, bool top) {
  auto* obs = top ? ctx.options.observer : nullptr;
  const std::size_t n = members.size();
  std::vector<AgentId> ids;
  for (auto i : members) ids.push_back(ctx.sorted[i].id);

  XcbsResult result;
  OpenList open;
  std::unordered_set<Key, KeyHash> seen;
  std::unordered_map<std::uint64_t, Partition> partitions;

  CTNode root;
  root.id = 1;
  for (auto i : members) root.solution.push_back(shortest_plan(ctx.sorted[i], ctx.net));
  root.cost = total_cost(root.solution);
  root.constraints.assign(n, {});
  root.required.assign(n, {});
  seen.insert(constraint_key(root));
  open.push(std::move(root));
  result.generated = 1;
  std::uint64_t next_id = 2;

  auto slot_of = [&](AgentId id) {
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };

  while (!open.empty()) {
    ctx.check_deadline();
    CTNode node = open.pop();
    ++result.evaluated;
    std::vector<std::vector<OccupancyRecord>> occ(n);
    for (std::size_t k = 0; k < n; ++k) occ[k] = occupancy(node.solution[k], ctx.sorted[members[k]], ctx.net);
    const auto conflict = earliest_conflict(occ, ctx.options.exec);
    if (obs) {
      Validation v = validate(occ, ids);
      const Partition* pp = node.parent ? &partitions.at(*node.parent) : nullptr;
      obs->on_evaluated(ctx.algo, node, v.partition, pp);
      partitions.emplace(node.id, std::move(v.partition));
    }
    if (!conflict) {
      result.plans = std::move(node.solution);
      return result;
    }

    // Repath: the agent keeps off the location. Wait: it keeps the location
    // on its route but clears the conflicting slot.
    struct Branch {
      std::size_t slot;
      Constraint added;
      bool keep_location;
    };
    std::vector<Branch> branches;
    for (auto [self, other] : {std::pair{conflict->a, conflict->b}, std::pair{conflict->b, conflict->a}}) {
      branches.push_back({slot_of(self), {conflict->location, {Time::zero(), Time::max()}, other}, false});
      branches.push_back(
          {slot_of(self), {conflict->location, {conflict->start, conflict->start + quantum}, other}, true});
    }
    std::vector<PlanJob> jobs;
    for (const auto& br : branches) {
      PlanJob job;
      job.agent = ids[br.slot];
      auto cs = node.constraints[br.slot];
      cs.push_back(br.added);
      job.constraints = ConstraintSet(std::move(cs));
      job.required = node.required[br.slot];
      if (br.keep_location && std::find(job.required.begin(), job.required.end(), br.added.location) == job.required.end())
        job.required.push_back(br.added.location);
      job.seed = node.solution[br.slot];
      job.mode = PlanMode::Optimal;
      job.quantum = quantum;
      jobs.push_back(std::move(job));
    }
    auto outcomes = ctx.service->plan(jobs);

    ExpansionInfo info;
    info.expected = branches.size();
    std::vector<CTNode> children;
    for (std::size_t k = 0; k < branches.size(); ++k) {
      if (!outcomes[k].plan) {
        --info.expected;
        continue;
      }
      CTNode child;
      child.id = next_id++;
      child.parent = node.id;
      child.depth = node.depth + 1;
      child.solution = node.solution;
      child.solution[branches[k].slot] = std::move(*outcomes[k].plan);
      child.cost = total_cost(child.solution);
      child.constraints = node.constraints;
      child.constraints[branches[k].slot].push_back(branches[k].added);
      child.required = node.required;
      child.required[branches[k].slot] = jobs[k].required;
      children.push_back(std::move(child));
    }
    info.children = children.size();
    if (obs) obs->on_expanded(ctx.algo, node, info);
    for (auto& child : children) {
      if (obs) obs->on_generated(ctx.algo, node, child);
      if (!seen.insert(constraint_key(child)).second) continue;
      ++result.generated;
      open.push(std::move(child));
    }
  }
  throw std::logic_error("constraint tree exhausted without a valid solution");
}

Time quantum_for(const Context& ctx) { return ctx.options.quantum ? *ctx.options.quantum : time_quantum(ctx.sorted, ctx.net); }

// --------------------------------------------------------------- XCBS-LA

class Groups {
public:
  explicit Groups(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<std::size_t> parent_;
};

Key la_key(const CTNode& n) {
  Key key = solution_key(n.solution);
  for (const auto& [a, b] : n.commitments) {
    key.push_back(a);
    key.push_back(b);
  }
  return key;
}

void xcbsla_search(Context& ctx, SolveReport& report) {
  auto* obs = ctx.options.observer;
  const auto ids = ctx.ids();
  const Time quantum = quantum_for(ctx);
  OpenList open;
  std::unordered_set<Key, KeyHash> seen;
  std::unordered_map<std::uint64_t, Partition> partitions;
  // Block searches start from scratch, so one closure always yields the same plans.
  std::map<std::vector<std::size_t>, std::vector<Plan>> block_cache;

  CTNode root;
  root.id = 1;
  root.solution = ctx.root_solution();
  root.cost = total_cost(root.solution);
  seen.insert(la_key(root));
  open.push(std::move(root));
  report.nodes_generated = 1;
  std::uint64_t next_id = 2;

  while (!open.empty()) {
    ctx.check_deadline();
    CTNode node = open.pop();
    ++report.nodes_evaluated;
    const auto occ = ctx.occupancies(node.solution);
    Validation v = validate(occ, ids);
    if (!node.parent) report.root_blocks = v.partition.blocks.size();
    if (obs) {
      const Partition* pp = node.parent ? &partitions.at(*node.parent) : nullptr;
      obs->on_evaluated(ctx.algo, node, v.partition, pp);
    }
    if (!v.has_conflict) {
      report.solution = std::move(node.solution);
      report.cost = node.cost;
      return;
    }

    // Commitment groups, then each block widened to the groups it touches.
    Groups groups(ctx.sorted.size());
    for (const auto& [a, b] : node.commitments) groups.unite(agent_index(ctx.sorted, a), agent_index(ctx.sorted, b));
    Groups merged(ctx.sorted.size());
    for (std::size_t i = 0; i < ctx.sorted.size(); ++i) merged.unite(i, groups.find(i));
    const auto blocks = non_singleton_blocks(v.partition);
    for (const auto& block : blocks)
      for (AgentId a : block) merged.unite(agent_index(ctx.sorted, block.front()), agent_index(ctx.sorted, a));
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    std::set<std::size_t> touched;
    for (const auto& block : blocks) touched.insert(merged.find(agent_index(ctx.sorted, block.front())));
    for (std::size_t i = 0; i < ctx.sorted.size(); ++i)
      if (touched.contains(merged.find(i))) by_root[merged.find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> closures;
    for (auto& [r, members] : by_root) closures.push_back(std::move(members));

    std::vector<const std::vector<Plan>*> joint;
    for (const auto& members : closures) {
      auto it = block_cache.find(members);
      if (it == block_cache.end()) {
        XcbsResult res = xcbs_core(ctx, members, quantum, false);
        report.block_nodes_generated += res.generated;
        it = block_cache.emplace(members, std::move(res.plans)).first;
      }
      joint.push_back(&it->second);
    }

    const std::size_t j = closures.size();
    std::vector<CTNode> children;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << j); ++mask) {
      CTNode child;
      child.id = next_id++;
      child.parent = node.id;
      child.depth = node.depth + 1;
      child.solution = node.solution;
      child.commitments = node.commitments;
      for (std::size_t c = 0; c < j; ++c) {
        if (!(mask >> c & 1)) continue;
        const auto& members = closures[c];
        for (std::size_t k = 0; k < members.size(); ++k) {
          child.solution[members[k]] = (*joint[c])[k];
          for (std::size_t m = 0; m < members.size(); ++m)
            if (m != k) child.commitments.emplace(ctx.sorted[members[k]].id, ctx.sorted[members[m]].id);
        }
      }
      child.cost = total_cost(child.solution);
      children.push_back(std::move(child));
    }
    if (obs) obs->on_expanded(ctx.algo, node, {children.size(), (std::size_t{1} << j) - 1});
    partitions.emplace(node.id, std::move(v.partition));
    for (auto& child : children) {
      if (obs) obs->on_generated(ctx.algo, node, child);
      if (!seen.insert(la_key(child)).second) continue;
      ++report.nodes_generated;
      open.push(std::move(child));
    }
  }
  throw std::logic_error("constraint tree exhausted without a valid solution");
}

}  // namespace

std::vector<CTNode> resolve_conflict_xcbsa(const CTNode& node, const Partition& partition,
                                           std::span<const SEAgent> agents, const RoadNetwork& net,
                                           PlanService& service, std::uint64_t next_id) {
  SolveOptions opts;
  opts.service = &service;
  Context ctx(Algorithm::XCBSA, agents, net, opts);
  return expand_xcbsa(ctx, node, partition, next_id, nullptr);
}

std::vector<Plan> block_level_search(std::span<const AgentId> block, std::span<const SEAgent> agents,
                                     const RoadNetwork& net, const SolveOptions& options, std::size_t* nodes_generated) {
  Context ctx(Algorithm::XCBS, agents, net, options);
  std::vector<std::size_t> members;
  for (AgentId a : block) members.push_back(agent_index(ctx.sorted, a));
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  XcbsResult res = xcbs_core(ctx, members, quantum_for(ctx), false);
  if (nodes_generated) *nodes_generated = res.generated;
  return res.plans;
}

SolveReport solve_greedy(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options) {
  return run_guarded(Algorithm::Greedy, agents, net, options, [](Context& ctx, SolveReport& report) {
    std::vector<std::vector<OccupancyRecord>> committed;
    for (const auto& agent : ctx.sorted) {
      ctx.check_deadline();
      PlanJob job;
      job.agent = agent.id;
      job.constraints = derive_constraints(agent.id, committed);
      auto outcome = ctx.service->plan(std::span<const PlanJob>(&job, 1));
      report.lowlevel_fallbacks += outcome[0].fallback ? 1 : 0;
      committed.push_back(occupancy(*outcome[0].plan, agent, ctx.net));
      report.solution.push_back(std::move(*outcome[0].plan));
    }
    report.cost = total_cost(report.solution);
    report.nodes_generated = 1;
    report.nodes_evaluated = 1;
    report.root_blocks = validate(ctx.occupancies(ctx.root_solution()), ctx.ids()).partition.blocks.size();
  });
}

SolveReport solve_xcbs(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options) {
  return run_guarded(Algorithm::XCBS, agents, net, options, [](Context& ctx, SolveReport& report) {
    std::vector<std::size_t> all(ctx.sorted.size());
    std::iota(all.begin(), all.end(), 0);
    report.root_blocks = validate(ctx.occupancies(ctx.root_solution()), ctx.ids()).partition.blocks.size();
    XcbsResult res = xcbs_core(ctx, all, quantum_for(ctx), true);
    report.solution = std::move(res.plans);
    report.cost = total_cost(report.solution);
    report.nodes_generated = res.generated;
    report.nodes_evaluated = res.evaluated;
  });
}

SolveReport solve_xcbsa(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options) {
  return run_guarded(Algorithm::XCBSA, agents, net, options, xcbsa_search);
}

SolveReport solve_xcbsa_eff(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options) {
  return run_guarded(Algorithm::XCBSAEff, agents, net, options, xcbsa_eff_search);
}

SolveReport solve_xcbsla(std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options) {
  return run_guarded(Algorithm::XCBSLA, agents, net, options, xcbsla_search);
}

SolveReport solve(Algorithm algo, std::span<const SEAgent> agents, const RoadNetwork& net, const SolveOptions& options) {
  switch (algo) {
    case Algorithm::Greedy: return solve_greedy(agents, net, options);
    case Algorithm::XCBS: return solve_xcbs(agents, net, options);
    case Algorithm::XCBSA: return solve_xcbsa(agents, net, options);
    case Algorithm::XCBSAEff: return solve_xcbsa_eff(agents, net, options);
    case Algorithm::XCBSLA: return solve_xcbsla(agents, net, options);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace seapath
