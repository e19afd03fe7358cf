#include "seapath/lowlevel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "seapath/hashing.hpp"

namespace seapath {

namespace {

bool constraint_order(const Constraint& a, const Constraint& b) {
  return std::tie(a.interval.start, a.location, a.owner, a.interval.end) <
         std::tie(b.interval.start, b.location, b.owner, b.interval.end);
}

std::vector<std::int64_t> itinerary_key(const Itinerary& it) {
  std::vector<std::int64_t> key;
  key.reserve(2 * it.route.edges.size());
  for (std::size_t k = 0; k < it.route.edges.size(); ++k) {
    key.push_back(it.route.edges[k].value);
    key.push_back(it.waits[k].ticks());
  }
  return key;
}

/// Index into route.vertices of the vertex the head leaves to reach `l`.
std::size_t reroute_index(const Itinerary& it, Location l) {
  if (l.is_edge()) {
    for (std::size_t k = 0; k < it.route.edges.size(); ++k)
      if (it.route.edges[k] == l.as_edge()) return k;
  } else {
    for (std::size_t k = 1; k < it.route.vertices.size(); ++k)
      if (it.route.vertices[k] == l.as_vertex()) return k - 1;
  }
  throw std::logic_error("violated location is not on the plan's route");
}

ReplanNode child_of(const ReplanNode& node, Plan plan, const Constraint& violated) {
  ReplanNode child;
  child.cost = plan.cost;
  child.plan = std::move(plan);
  child.parent = node.id;
  child.resolved = node.resolved;
  child.resolved.push_back(violated);
  child.blocked = node.blocked;
  return child;
}

}  // namespace

ConstraintSet::ConstraintSet(std::vector<Constraint> cs) : constraints(std::move(cs)) {
  std::sort(constraints.begin(), constraints.end(), constraint_order);
}

Time ConstraintSet::latest_finite_end() const {
  Time latest = Time::zero();
  for (const auto& c : constraints)
    if (c.interval.end != Time::max()) latest = std::max(latest, c.interval.end);
  return latest;
}

ConstraintIndex::ConstraintIndex(const ConstraintSet& set) {
  for (const auto& c : set.constraints) by_location_[c.location].push_back(c);
}

std::span<const Constraint> ConstraintIndex::at(Location l) const {
  auto it = by_location_.find(l);
  if (it == by_location_.end()) return {};
  return it->second;
}

bool ConstraintIndex::blocks_forever(Location l) const {
  for (const auto& c : at(l))
    if (c.interval.end == Time::max()) return true;
  return false;
}

bool ConstraintIndex::any_overlap(Location l, const Interval& iv) const {
  if (iv.empty()) return false;
  for (const auto& c : at(l))
    if (intersects(c.interval, iv)) return true;
  return false;
}

std::optional<Constraint> ConstraintIndex::first_violation(std::span<const OccupancyRecord> occ) const {
  std::optional<Constraint> best;
  Time best_start;
  for (const auto& rec : occ) {
    for (const auto& c : at(rec.location)) {
      if (!intersects(c.interval, rec.interval)) continue;
      const Time overlap = std::max(c.interval.start, rec.interval.start);
      if (!best || std::tie(overlap, c.location, c.owner, c.interval) <
                       std::tie(best_start, best->location, best->owner, best->interval)) {
        best = c;
        best_start = overlap;
      }
    }
  }
  return best;
}

ConstraintSet derive_constraints(AgentId self, std::span<const std::vector<OccupancyRecord>> occupancies) {
  std::vector<Constraint> cs;
  for (const auto& records : occupancies)
    for (const auto& r : records)
      if (r.agent != self) cs.push_back({r.location, r.interval, r.agent});
  return ConstraintSet(std::move(cs));
}

ConstraintSet derive_constraints(const SEAgent& agent, std::span<const SEAgent> agents, std::span<const Plan> plans,
                                 const RoadNetwork& net) {
  std::vector<Constraint> cs;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].id == agent.id) continue;
    for (const auto& r : occupancy(plans[i], agents[i], net)) cs.push_back({r.location, r.interval, r.agent});
  }
  return ConstraintSet(std::move(cs));
}

std::optional<ReplanNode> create_alt_path(const ReplanNode& node, const Constraint& violated, const SEAgent& agent,
                                          const RoadNetwork& net) {
  const Itinerary it = itinerary_of(node.plan, agent, net);
  const std::size_t r = reroute_index(it, violated.location);

  LocationSet blocked(node.blocked.begin(), node.blocked.end());
  blocked.insert(violated.location);
  for (std::size_t k = 0; k < r; ++k) blocked.insert(Location::vertex(it.route.vertices[k]));
  auto suffix = shortest_path(net, it.route.vertices[r], agent.final, agent.speed, blocked);
  if (!suffix) return std::nullopt;

  Itinerary next;
  next.route.vertices.assign(it.route.vertices.begin(), it.route.vertices.begin() + static_cast<std::ptrdiff_t>(r) + 1);
  next.route.edges.assign(it.route.edges.begin(), it.route.edges.begin() + static_cast<std::ptrdiff_t>(r));
  next.waits.assign(it.waits.begin(), it.waits.begin() + static_cast<std::ptrdiff_t>(r) + 1);
  for (std::size_t k = 0; k < suffix->edges.size(); ++k) {
    next.route.edges.push_back(suffix->edges[k]);
    next.route.vertices.push_back(suffix->vertices[k + 1]);
    if (k + 1 < suffix->edges.size()) next.waits.push_back(Time::zero());
  }

  ReplanNode child = child_of(node, make_plan(agent, net, next), violated);
  child.blocked.push_back(violated.location);
  return child;
}

std::optional<ReplanNode> create_wait(const ReplanNode& node, const Constraint& violated, const SEAgent& agent,
                                      const RoadNetwork& net) {
  if (violated.interval.end == Time::max()) return std::nullopt;
  Itinerary it = itinerary_of(node.plan, agent, net);
  const std::size_t r = reroute_index(it, violated.location);
  const auto occ = occupancy(it, agent, net);
  auto rec = std::find_if(occ.begin(), occ.end(), [&](const auto& o) { return o.location == violated.location; });
  const Time d = violated.interval.end - rec->interval.start;
  if (d <= Time::zero()) throw std::logic_error("create_wait on a constraint that ended before occupancy began");
  it.waits[r] += d;
  return child_of(node, make_plan(agent, net, it), violated);
}

Plan low_level_search(const SEAgent& agent, const RoadNetwork& net, const ConstraintSet& constraints,
                      const LowLevelOptions& options, LowLevelStats* stats) {
  LowLevelStats local;
  LowLevelStats& st = stats ? *stats : local;
  st = {};

  ReplanNode root;
  root.plan = options.seed ? *options.seed : shortest_plan(agent, net);
  root.cost = root.plan.cost;
  root.id = 1;
  st.generated = 1;
  if (constraints.empty()) return root.plan;

  const ConstraintIndex index(constraints);
  std::vector<ReplanNode> nodes;
  nodes.push_back(std::move(root));
  std::unordered_set<Key, KeyHash> seen;
  seen.insert(itinerary_key(itinerary_of(nodes[0].plan, agent, net)));

  using Entry = std::pair<std::int64_t, std::size_t>;  // (cost ticks, slot); slot order is id order
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  open.emplace(nodes[0].cost.ticks(), 0);

  while (!open.empty()) {
    const std::size_t slot = open.top().second;
    open.pop();
    if (options.max_expansions != 0 && st.expanded >= options.max_expansions) {
      st.capped = true;
      break;
    }
    const auto violated = index.first_violation(occupancy(nodes[slot].plan, agent, net));
    if (!violated) return nodes[slot].plan;
    ++st.expanded;

    const ReplanNode parent = nodes[slot];
    for (auto& child : {create_alt_path(parent, *violated, agent, net), create_wait(parent, *violated, agent, net)}) {
      if (!child || child->cost < parent.cost) continue;
      auto key = itinerary_key(itinerary_of(child->plan, agent, net));
      if (!seen.insert(std::move(key)).second) continue;
      ReplanNode n = *child;
      n.id = nodes.size() + 1;
      ++st.generated;
      nodes.push_back(std::move(n));
      open.emplace(nodes.back().cost.ticks(), nodes.size() - 1);
    }
  }

  // Cap reached (or, with infinite constraints, nothing left): hold the root
  // at its start vertex until every finite constraint has expired.
  if (std::any_of(constraints.constraints.begin(), constraints.constraints.end(),
                  [](const Constraint& c) { return c.interval.end == Time::max(); }))
    throw std::runtime_error("agent " + std::to_string(agent.id) + ": no plan avoids the blocked locations");
  st.capped = true;
  Itinerary it = itinerary_of(nodes[0].plan, agent, net);
  it.waits[0] += constraints.latest_finite_end();
  return make_plan(agent, net, it);
}

Time time_quantum(std::span<const SEAgent> agents, const RoadNetwork& net) {
  std::int64_t q = 0;
  for (const auto& a : agents) {
    for (const auto& e : net.edges()) {
      const Speed s = std::min(a.speed, e.speed);
      q = std::gcd(q, travel_time(e.length, s).ticks());
      for (Distance x = a.length; x > Distance::zero(); x -= e.length) q = std::gcd(q, travel_time(x, s).ticks());
      for (Distance x = a.length + e.length; x > Distance::zero(); x -= e.length)
        q = std::gcd(q, travel_time(x, s).ticks());
    }
  }
  return Time::from_ticks(q == 0 ? 1 : q);
}

namespace {

constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max();

struct OpenRecord {
  Location location;
  Time start;
  Distance clear;  // head travel still needed before the tail leaves
  auto operator<=>(const OpenRecord&) const = default;
};

struct SearchNode {
  VertexId at;
  Time now;
  std::vector<std::uint64_t> visited;
  std::vector<OpenRecord> open;
  std::size_t parent = 0;
  std::optional<EdgeId> via;  // nullopt: waited one quantum
  bool goal = false;
  std::uint64_t reached = 0;  // bit i: required[i] is on the route so far
};

std::vector<std::int64_t> state_key(const SearchNode& n) {
  std::vector<std::int64_t> key{n.at.value, n.now.ticks(), static_cast<std::int64_t>(n.reached)};
  for (auto w : n.visited) key.push_back(static_cast<std::int64_t>(w));
  for (const auto& o : n.open) {
    key.push_back(static_cast<std::int64_t>(o.location.kind()) << 32 | o.location.index());
    key.push_back(o.start.ticks());
    key.push_back(o.clear.ticks());
  }
  return key;
}

/// Head time between `src` and every vertex with permanently blocked locations removed.
std::vector<std::int64_t> head_times(const RoadNetwork& net, const SEAgent& agent, const ConstraintIndex& index,
                                     VertexId src) {
  std::vector<std::int64_t> dist(net.vertex_count(), kUnreachable);
  using Item = std::pair<std::int64_t, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src.value] = 0;
  pq.emplace(0, src.value);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d != dist[v]) continue;
    for (EdgeId e : net.incident(VertexId{v})) {
      if (index.blocks_forever(Location::edge(e))) continue;
      const Edge& edge = net.edge(e);
      const VertexId w = edge.other(VertexId{v});
      if (w != agent.initial && w != agent.final && index.blocks_forever(Location::vertex(w))) continue;
      const std::int64_t nd = d + traversal_time(edge, agent.speed).ticks();
      if (nd < dist[w.value]) {
        dist[w.value] = nd;
        pq.emplace(nd, w.value);
      }
    }
  }
  return dist;
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b) { return a == kUnreachable || b == kUnreachable ? kUnreachable : a + b; }

/// Lower bound on the time from each vertex to the goal via `l`.
std::vector<std::int64_t> time_via(const RoadNetwork& net, const SEAgent& agent, const ConstraintIndex& index,
                                   const std::vector<std::int64_t>& h, Location l) {
  std::vector<std::int64_t> out(net.vertex_count(), kUnreachable);
  if (l.is_vertex()) {
    const auto d = head_times(net, agent, index, l.as_vertex());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = saturating_add(d[v], h[l.as_vertex().value]);
    return out;
  }
  const Edge& e = net.edge(l.as_edge());
  const std::int64_t t = traversal_time(e, agent.speed).ticks();
  const auto da = head_times(net, agent, index, e.a);
  const auto db = head_times(net, agent, index, e.b);
  for (std::size_t v = 0; v < out.size(); ++v)
    out[v] = std::min(saturating_add(saturating_add(da[v], t), h[e.b.value]),
                      saturating_add(saturating_add(db[v], t), h[e.a.value]));
  return out;
}

std::uint64_t reach_bits(std::span<const Location> required, Location l) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < required.size(); ++i)
    if (required[i] == l) bits |= 1ULL << i;
  return bits;
}

/// Unit-capacity max flow, enough for the two-path routing tests below.
class SmallFlow {
public:
  explicit SmallFlow(std::size_t n) : adj_(n) {}
  void add(std::size_t u, std::size_t v, int cap) {
    adj_[u].push_back(arcs_.size());
    arcs_.push_back({v, cap});
    adj_[v].push_back(arcs_.size());
    arcs_.push_back({u, 0});
  }
  /// Augments until `limit` units flow or no augmenting path remains.
  int run(std::size_t src, std::size_t dst, int limit) {
    int flow = 0;
    std::vector<std::size_t> via(adj_.size());
    while (flow < limit) {
      std::vector<char> seen(adj_.size(), 0);
      std::vector<std::size_t> queue{src};
      seen[src] = 1;
      for (std::size_t i = 0; i < queue.size() && !seen[dst]; ++i) {
        for (std::size_t a : adj_[queue[i]]) {
          const auto& arc = arcs_[a];
          if (arc.cap <= 0 || seen[arc.to]) continue;
          seen[arc.to] = 1;
          via[arc.to] = a;
          queue.push_back(arc.to);
        }
      }
      if (!seen[dst]) break;
      for (std::size_t v = dst; v != src; v = arcs_[via[v] ^ 1].to) {
        --arcs_[via[v]].cap;
        ++arcs_[via[v] ^ 1].cap;
      }
      ++flow;
    }
    return flow;
  }

private:
  struct Arc {
    std::size_t to;
    int cap;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> arcs_;
};

/// Fastest simple route through every required location that avoids the
/// permanent blocks, timing ignored; kUnreachable when there is none.
std::int64_t fastest_covering_route(const RoadNetwork& net, const SEAgent& agent, const ConstraintIndex& index,
                                    std::span<const Location> required, const std::vector<std::int64_t>& h,
                                    const std::vector<std::vector<std::int64_t>>& via) {
  const std::uint64_t all = required.size() == 64 ? ~0ULL : (1ULL << required.size()) - 1;
  auto enterable = [&](VertexId w) { return w == agent.final || !index.blocks_forever(Location::vertex(w)); };

  struct State {
    VertexId at;
    std::vector<std::uint64_t> visited;
    std::uint64_t reached = 0;
    std::int64_t g = 0;
  };
  auto is_visited = [](const State& st, VertexId v) { return (st.visited[v.value / 64] >> (v.value % 64) & 1ULL) != 0; };

  // Prunes states from which the goal or an outstanding location is cut off.
  // A simple route from `at` to the goal passes x exactly when two
  // vertex-disjoint paths join x to {at, goal}; for an edge, its two ends
  // feed one path each.
  std::vector<char> seen(net.vertex_count());
  std::vector<std::uint32_t> stack;
  auto routable = [&](const State& st, Location l) {
    const std::size_t n = net.vertex_count();
    const std::size_t src = 2 * n, dst = 2 * n + 1;
    SmallFlow flow(2 * n + 2);
    auto usable = [&](VertexId v) { return v == st.at || (!is_visited(st, v) && enterable(v)); };
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!usable(VertexId{v})) continue;
      const bool hub = l.is_vertex() && l.as_vertex().value == v;
      flow.add(2 * v, 2 * v + 1, hub ? 2 : 1);
      if (VertexId{v} == agent.final) continue;  // routes stop at the goal
      for (EdgeId e : net.incident(VertexId{v})) {
        if (index.blocks_forever(Location::edge(e)) || (l.is_edge() && l.as_edge() == e)) continue;
        const VertexId w = net.edge(e).other(VertexId{v});
        if (usable(w)) flow.add(2 * v + 1, 2 * w.value, 1);
      }
    }
    if (l.is_vertex()) {
      flow.add(src, 2 * l.as_vertex().value, 2);
    } else {
      flow.add(src, 2 * net.edge(l.as_edge()).a.value, 1);
      flow.add(src, 2 * net.edge(l.as_edge()).b.value, 1);
    }
    flow.add(2 * st.at.value + 1, dst, 1);
    flow.add(2 * agent.final.value + 1, dst, 1);
    return flow.run(src, dst, 2) == 2;
  };
  auto alive = [&](const State& st) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[st.at.value] = 1;
    stack.assign(1, st.at.value);
    while (!stack.empty()) {
      const VertexId v{stack.back()};
      stack.pop_back();
      if (v == agent.final) continue;
      for (EdgeId e : net.incident(v)) {
        if (index.blocks_forever(Location::edge(e))) continue;
        const VertexId w = net.edge(e).other(v);
        if (seen[w.value] || is_visited(st, w) || !enterable(w)) continue;
        seen[w.value] = 1;
        stack.push_back(w.value);
      }
    }
    if (!seen[agent.final.value]) return false;
    for (std::size_t i = 0; i < required.size(); ++i) {
      if (st.reached >> i & 1ULL) continue;
      const Location l = required[i];
      if (l.is_vertex() && l.as_vertex() == agent.final) continue;
      if (l.is_vertex() && !seen[l.as_vertex().value]) return false;
      if (!routable(st, l)) return false;
    }
    return true;
  };
  auto lower = [&](const State& st) {
    std::int64_t r = h[st.at.value];
    for (std::size_t i = 0; i < via.size(); ++i)
      if (!(st.reached >> i & 1ULL)) r = std::max(r, via[i][st.at.value]);
    return r;
  };

  std::vector<State> arena;
  State root;
  root.at = agent.initial;
  root.visited.assign((net.vertex_count() + 63) / 64, 0);
  root.visited[agent.initial.value / 64] |= 1ULL << (agent.initial.value % 64);
  root.reached = reach_bits(required, Location::vertex(agent.initial));
  if (!alive(root)) return kUnreachable;
  using Entry = std::pair<std::int64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.emplace(lower(root), 0);
  arena.push_back(std::move(root));
  std::unordered_set<Key, KeyHash> closed;
  while (!pq.empty()) {
    const std::size_t slot = pq.top().second;
    pq.pop();
    if (arena[slot].at == agent.final) return arena[slot].g;
    Key key{arena[slot].at.value, static_cast<std::int64_t>(arena[slot].reached)};
    for (auto w : arena[slot].visited) key.push_back(static_cast<std::int64_t>(w));
    if (!closed.insert(std::move(key)).second) continue;
    const State cur = arena[slot];
    for (EdgeId eid : net.incident(cur.at)) {
      if (index.blocks_forever(Location::edge(eid))) continue;
      const Edge& e = net.edge(eid);
      const VertexId next = e.other(cur.at);
      if (is_visited(cur, next) || !enterable(next)) continue;
      State n;
      n.at = next;
      n.visited = cur.visited;
      n.visited[next.value / 64] |= 1ULL << (next.value % 64);
      n.reached = cur.reached | reach_bits(required, Location::edge(eid)) | reach_bits(required, Location::vertex(next));
      n.g = cur.g + traversal_time(e, agent.speed).ticks();
      if (next == agent.final ? n.reached != all : !alive(n)) continue;
      const std::int64_t f = n.g + lower(n);
      arena.push_back(std::move(n));
      pq.emplace(f, arena.size() - 1);
    }
  }
  return kUnreachable;
}

}  // namespace

std::optional<Plan> optimal_search(const SEAgent& agent, const RoadNetwork& net, const ConstraintSet& constraints,
                                   Time quantum, std::span<const Location> required, const Path* witness,
                                   OptimalStats* stats) {
  if (quantum <= Time::zero()) throw std::invalid_argument("quantum must be positive");
  if (required.size() > 64) throw std::invalid_argument("at most 64 required locations");
  const ConstraintIndex index(constraints);
  const auto h = head_times(net, agent, index, agent.final);
  if (h[agent.initial.value] == kUnreachable) return std::nullopt;
  std::vector<std::vector<std::int64_t>> via;
  for (const auto& l : required) {
    if (index.blocks_forever(l)) return std::nullopt;
    via.push_back(time_via(net, agent, index, h, l));
    if (via.back()[agent.initial.value] == kUnreachable) return std::nullopt;
  }

  const std::int64_t q = quantum.ticks();
  const std::int64_t latest = constraints.latest_finite_end().ticks();
  // Departing after every finite constraint along any feasible route is
  // consistent, which bounds the optimum.
  std::int64_t route_bound = required.empty() ? h[agent.initial.value] : kUnreachable;
  if (witness && witness->vertices.front() == agent.initial && witness->vertices.back() == agent.final) {
    std::int64_t t = 0;
    bool usable = true;
    for (const auto& l : required) {
      usable = usable && (l.is_vertex() ? std::find(witness->vertices.begin(), witness->vertices.end(),
                                                    l.as_vertex()) != witness->vertices.end()
                                        : std::find(witness->edges.begin(), witness->edges.end(), l.as_edge()) !=
                                              witness->edges.end());
    }
    for (EdgeId e : witness->edges) {
      usable = usable && !index.blocks_forever(Location::edge(e));
      t += traversal_time(net.edge(e), agent.speed).ticks();
    }
    for (std::size_t i = 1; i + 1 < witness->vertices.size(); ++i)
      usable = usable && !index.blocks_forever(Location::vertex(witness->vertices[i]));
    if (usable) route_bound = std::min(route_bound, t);
  }
  if (route_bound == kUnreachable) {
    route_bound = fastest_covering_route(net, agent, index, required, h, via);
    if (route_bound == kUnreachable) return std::nullopt;
  }
  const std::int64_t bound = (latest + q - 1) / q * q + route_bound;
  const std::uint64_t all_required = required.size() == 64 ? ~0ULL : (1ULL << required.size()) - 1;

  std::vector<SearchNode> arena;
  SearchNode root;
  root.at = agent.initial;
  root.now = Time::zero();
  root.visited.assign((net.vertex_count() + 63) / 64, 0);
  root.visited[agent.initial.value / 64] |= 1ULL << (agent.initial.value % 64);
  root.reached = reach_bits(required, Location::vertex(agent.initial));
  arena.push_back(std::move(root));

  std::unordered_set<Key, KeyHash> closed;
  // (f, -g, slot): deeper nodes first on an f plateau, then FIFO.
  using Entry = std::tuple<std::int64_t, std::int64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.emplace(h[agent.initial.value], 0, 0);

  auto push = [&](SearchNode n) {
    const std::int64_t g = n.now.ticks();
    std::int64_t rest = n.goal ? 0 : h[n.at.value];
    for (std::size_t i = 0; i < via.size(); ++i)
      if (!(n.reached >> i & 1ULL)) rest = std::max(rest, via[i][n.at.value]);
    if (rest == kUnreachable) return;
    const std::int64_t f = g + rest;
    if (f > bound) return;
    arena.push_back(std::move(n));
    pq.emplace(f, -g, arena.size() - 1);
  };

  std::size_t expanded = 0;
  std::optional<std::size_t> found;
  while (!pq.empty()) {
    const std::size_t slot = std::get<2>(pq.top());
    pq.pop();
    if (arena[slot].goal) {
      found = slot;
      break;
    }
    if (!closed.insert(state_key(arena[slot])).second) continue;
    ++expanded;
    const SearchNode cur = arena[slot];

    // Wait one quantum: every open record stretches over the pause.
    {
      SearchNode n = cur;
      n.now = cur.now + quantum;
      n.parent = slot;
      n.via.reset();
      bool ok = true;
      for (const auto& o : n.open) ok = ok && !index.any_overlap(o.location, {o.start, n.now});
      if (ok) push(std::move(n));
    }

    for (EdgeId eid : net.incident(cur.at)) {
      const Edge& e = net.edge(eid);
      const VertexId next = e.other(cur.at);
      if (cur.visited[next.value / 64] >> (next.value % 64) & 1ULL) continue;
      const Location eloc = Location::edge(eid);
      if (index.blocks_forever(eloc)) continue;
      const bool at_goal = next == agent.final;
      if (!at_goal && index.blocks_forever(Location::vertex(next))) continue;
      if (h[next.value] == kUnreachable) continue;

      const Speed spd = std::min(agent.speed, e.speed);
      const Time depart = cur.now;
      const Time arrive = depart + traversal_time(e, agent.speed);
      SearchNode n;
      n.at = next;
      n.now = arrive;
      n.visited = cur.visited;
      n.visited[next.value / 64] |= 1ULL << (next.value % 64);
      n.parent = slot;
      n.via = eid;
      n.goal = at_goal;
      n.reached = cur.reached | reach_bits(required, eloc) | reach_bits(required, Location::vertex(next));
      if (at_goal && n.reached != all_required) continue;

      bool ok = true;
      auto settle = [&](Location l, Time start, Time end) { ok = ok && !index.any_overlap(l, {start, end}); };
      for (const auto& o : cur.open) {
        if (o.clear <= e.length) {
          settle(o.location, o.start, depart + travel_time(o.clear, spd));
        } else {
          n.open.push_back({o.location, o.start, o.clear - e.length});
          settle(o.location, o.start, arrive);
        }
      }
      n.open.push_back({eloc, depart, agent.length});
      settle(eloc, depart, arrive);
      if (at_goal) {
        // The final vertex absorbs the body at this edge's speed.
        for (const auto& o : n.open) settle(o.location, o.start, arrive + travel_time(o.clear, spd));
        n.open.clear();
      } else {
        n.open.push_back({Location::vertex(next), arrive, agent.length});
      }
      if (ok) push(std::move(n));
    }
  }
  if (stats) stats->expanded = expanded;
  if (!found) return std::nullopt;

  // Walk parents back to rebuild the itinerary.
  std::vector<const SearchNode*> chain;
  for (std::size_t s = *found; s != 0; s = arena[s].parent) chain.push_back(&arena[s]);
  std::reverse(chain.begin(), chain.end());
  Itinerary it;
  it.route.vertices.push_back(agent.initial);
  it.waits.push_back(Time::zero());
  for (const SearchNode* n : chain) {
    if (!n->via) {
      it.waits.back() += quantum;
      continue;
    }
    it.route.edges.push_back(*n->via);
    it.route.vertices.push_back(n->at);
    it.waits.push_back(Time::zero());
  }
  it.waits.pop_back();
  return make_plan(agent, net, it);
}

}  // namespace seapath
