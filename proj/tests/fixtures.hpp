#pragma once

#include <string>
#include <vector>

#include "seapath/agents.hpp"

namespace fixture {

using namespace seapath;

/// Five agents on a small road graph. Every edge takes 2 time units and every
/// body takes 1 more to drain.
///
///   C1: v1 -e1- v2 -e2- v3            C2: v4 -e4- v2 -e2- v3
///   C3: v8 -e8- v4 -e4- v2 -e6- v5    C4: v9 -e10- v5 -e6- v2 -e7- v7
///   C5: v11 -e5- v3
///
/// C1 and C2 share e2, C2 and C3 share e4, C3 and C4 share e6, and C5 meets
/// nobody.
struct FiveAgents {
  RoadNetwork net;
  std::vector<SEAgent> agents;
  std::vector<Plan> plans;

  Location loc(const std::string& name) const { return *net.find_location(name); }
};

inline FiveAgents five_agents() {
  FiveAgents f;
  for (int i = 1; i <= 11; ++i) f.net.add_vertex("v" + std::to_string(i));
  const auto v = [&](int i) { return *f.net.find_vertex("v" + std::to_string(i)); };
  const Distance len = Distance::from_units(10);
  const Speed spd = Speed::from_units(5);
  const std::vector<std::tuple<std::string, int, int>> edges{
      {"e1", 1, 2}, {"e2", 2, 3}, {"e4", 4, 2}, {"e5", 11, 3}, {"e6", 2, 5},
      {"e7", 2, 7}, {"e8", 8, 4}, {"e10", 9, 5}};
  for (const auto& [name, a, b] : edges) f.net.add_edge(name, v(a), v(b), len, spd);

  const std::vector<std::vector<int>> routes{{1, 2, 3}, {4, 2, 3}, {8, 4, 2, 5}, {9, 5, 2, 7}, {11, 3}};
  for (std::size_t i = 0; i < routes.size(); ++i) {
    SEAgent a;
    a.id = static_cast<AgentId>(i + 1);
    a.initial = v(routes[i].front());
    a.final = v(routes[i].back());
    a.length = Distance::from_units(5);
    a.speed = spd;
    Path route;
    for (std::size_t k = 0; k < routes[i].size(); ++k) {
      route.vertices.push_back(v(routes[i][k]));
      if (k > 0) route.edges.push_back(*f.net.edge_between(v(routes[i][k - 1]), v(routes[i][k])));
    }
    f.plans.push_back(plan_along(a, f.net, route));
    f.agents.push_back(a);
  }
  return f;
}

}  // namespace fixture
