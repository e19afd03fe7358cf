#include "seapath/agents.hpp"

#include <algorithm>
#include <tuple>

namespace seapath {

void SEAgent::validate(const RoadNetwork& net) const {
  if (length <= Distance::zero()) throw std::invalid_argument("agent " + std::to_string(id) + ": length must be positive");
  if (speed <= Speed::zero()) throw std::invalid_argument("agent " + std::to_string(id) + ": speed must be positive");
  if (!net.has_vertex(initial) || !net.has_vertex(final))
    throw std::invalid_argument("agent " + std::to_string(id) + ": unknown initial/final vertex");
  if (initial == final) throw std::invalid_argument("agent " + std::to_string(id) + ": initial equals final");
}

HeadSchedule head_schedule(const Itinerary& it, const SEAgent& agent, const RoadNetwork& net) {
  HeadSchedule s;
  const auto n = it.route.edges.size();
  s.depart.resize(n);
  s.arrive.resize(n);
  Time now = Time::zero();
  for (std::size_t k = 0; k < n; ++k) {
    now += it.waits[k];
    s.depart[k] = now;
    now += traversal_time(net.edge(it.route.edges[k]), agent.speed);
    s.arrive[k] = now;
  }
  return s;
}

Itinerary itinerary_of(const Plan& plan, const SEAgent& agent, const RoadNetwork& net) {
  Itinerary it;
  it.route.vertices.push_back(agent.initial);
  it.waits.push_back(Time::zero());
  std::vector<bool> visited(net.vertex_count(), false);
  visited[agent.initial.value] = true;
  VertexId at = agent.initial;
  Time now = Time::zero();
  bool last_was_move = false;
  for (const Action& action : plan.actions) {
    if (const auto* w = std::get_if<WaitAction>(&action)) {
      if (w->d <= Time::zero()) throw PlanError("wait duration must be positive");
      if (w->t != now) throw PlanError("wait at " + w->t.str() + " does not start with the head at a vertex");
      if (at == agent.final) throw PlanError("wait after reaching the final vertex");
      it.waits.back() += w->d;
      now += w->d;
      last_was_move = false;
      continue;
    }
    const auto& m = std::get<MoveAction>(action);
    if (!m.location.is_edge() || !net.has_location(m.location))
      throw PlanError("move must enter an existing edge");
    if (at == agent.final) throw PlanError("move after reaching the final vertex");
    const Edge& e = net.edge(m.location.as_edge());
    if (e.a != at && e.b != at) throw PlanError("disconnected plan: edge " + net.edge_name(e.id) + " is not incident to the head vertex");
    if (m.t != now) throw PlanError("move into " + net.edge_name(e.id) + " at " + m.t.str() + ", expected " + now.str());
    const VertexId next = e.other(at);
    if (visited[next.value]) throw PlanError("plan revisits vertex " + net.vertex_name(next));
    visited[next.value] = true;
    now += traversal_time(e, agent.speed);
    it.route.edges.push_back(e.id);
    it.route.vertices.push_back(next);
    it.waits.push_back(Time::zero());
    at = next;
    last_was_move = true;
  }
  if (at != agent.final || !last_was_move) throw PlanError("plan does not end at the final vertex");
  if (now != plan.cost) throw PlanError("plan cost " + plan.cost.str() + " differs from arrival time " + now.str());
  it.waits.pop_back();  // no waiting at the final vertex
  Time travel = Time::zero();
  for (EdgeId e : it.route.edges) travel += traversal_time(net.edge(e), agent.speed);
  it.route.total_travel_time = travel;
  return it;
}

Plan make_plan(const SEAgent& agent, const RoadNetwork& net, const Itinerary& it) {
  Plan plan;
  plan.agent = agent.id;
  Time now = Time::zero();
  for (std::size_t k = 0; k < it.route.edges.size(); ++k) {
    if (it.waits[k] > Time::zero()) {
      plan.actions.emplace_back(WaitAction{now, it.waits[k]});
      now += it.waits[k];
    }
    plan.actions.emplace_back(MoveAction{Location::edge(it.route.edges[k]), now});
    now += traversal_time(net.edge(it.route.edges[k]), agent.speed);
  }
  plan.cost = now;
  return plan;
}

Plan plan_along(const SEAgent& agent, const RoadNetwork& net, const Path& route) {
  Itinerary it{route, std::vector<Time>(route.edges.size(), Time::zero())};
  return make_plan(agent, net, it);
}

Plan shortest_plan(const SEAgent& agent, const RoadNetwork& net) {
  auto path = shortest_path(net, agent.initial, agent.final, agent.speed);
  if (!path) throw std::runtime_error("agent " + std::to_string(agent.id) + ": destination unreachable");
  return plan_along(agent, net, *path);
}

std::vector<OccupancyRecord> occupancy(const Itinerary& it, const SEAgent& agent, const RoadNetwork& net) {
  const auto n = it.route.edges.size();
  if (n == 0) return {};
  const HeadSchedule s = head_schedule(it, agent, net);
  // Arc-length position of each route vertex and effective speed per edge.
  std::vector<Distance> pos(n + 1, Distance::zero());
  std::vector<Speed> speed(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Edge& e = net.edge(it.route.edges[k]);
    pos[k + 1] = pos[k] + e.length;
    speed[k] = std::min(agent.speed, e.speed);
  }
  // First instant the head is at or beyond arc-length x (x > 0).
  auto reach = [&](Distance x) {
    if (x > pos[n]) return s.arrive[n - 1] + travel_time(x - pos[n], speed[n - 1]);
    const auto k = static_cast<std::size_t>(std::lower_bound(pos.begin() + 1, pos.end(), x) - pos.begin()) - 1;
    return s.depart[k] + travel_time(x - pos[k], speed[k]);
  };

  std::vector<OccupancyRecord> out;
  out.reserve(2 * n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      out.push_back({Location::vertex(it.route.vertices[k]), {s.arrive[k - 1], reach(pos[k] + agent.length)}, agent.id});
    }
    out.push_back({Location::edge(it.route.edges[k]), {s.depart[k], reach(pos[k + 1] + agent.length)}, agent.id});
  }
  return out;
}

std::vector<OccupancyRecord> occupancy(const Plan& plan, const SEAgent& agent, const RoadNetwork& net) {
  return occupancy(itinerary_of(plan, agent, net), agent, net);
}

std::optional<Constraint> first_violation(std::span<const OccupancyRecord> occ,
                                          std::span<const Constraint> constraints) {
  std::optional<Constraint> best;
  Time best_start;
  for (const auto& rec : occ) {
    for (const auto& c : constraints) {
      if (c.location != rec.location || !intersects(c.interval, rec.interval)) continue;
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

std::optional<Constraint> is_consistent(const Plan& plan, const SEAgent& agent, const RoadNetwork& net,
                                        std::span<const Constraint> constraints) {
  if (constraints.empty()) return std::nullopt;
  const auto occ = occupancy(plan, agent, net);
  return first_violation(occ, constraints);
}

Time solution_cost(std::span<const Plan> plans) {
  Time total = Time::zero();
  for (const auto& p : plans) total += p.cost;
  return total;
}

}  // namespace seapath
