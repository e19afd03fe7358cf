#include "seapath/roadnet.hpp"

#include <algorithm>
#include <queue>

namespace seapath {

VertexId RoadNetwork::add_vertex(std::string name) {
  if (name.empty()) throw std::invalid_argument("vertex name must be non-empty");
  const VertexId id{static_cast<std::uint32_t>(vertex_names_.size())};
  if (!vertex_by_name_.emplace(name, id).second) throw std::invalid_argument("duplicate vertex id: " + name);
  vertex_names_.push_back(std::move(name));
  adjacency_.emplace_back();
  return id;
}

EdgeId RoadNetwork::add_edge(std::string name, VertexId a, VertexId b, Distance length, Speed speed) {
  if (name.empty()) throw std::invalid_argument("edge name must be non-empty");
  if (!has_vertex(a) || !has_vertex(b)) throw std::invalid_argument("edge " + name + " references an unknown vertex");
  if (a == b) throw std::invalid_argument("edge " + name + " is a self-loop");
  if (length <= Distance::zero()) throw std::invalid_argument("edge " + name + " must have positive length");
  if (speed <= Speed::zero()) throw std::invalid_argument("edge " + name + " must have positive speed");
  if (edge_between(a, b)) throw std::invalid_argument("duplicate edge between " + vertex_name(a) + " and " + vertex_name(b));
  const EdgeId id{static_cast<std::uint32_t>(edges_.size())};
  if (!edge_by_name_.emplace(name, id).second) throw std::invalid_argument("duplicate edge id: " + name);
  edges_.push_back(Edge{id, a, b, length, speed});
  edge_names_.push_back(std::move(name));
  // Ids are handed out ascending, so adjacency lists stay sorted.
  adjacency_[a.value].push_back(id);
  adjacency_[b.value].push_back(id);
  return id;
}

bool RoadNetwork::has_location(Location l) const {
  return l.is_vertex() ? l.index() < vertex_names_.size() : l.index() < edges_.size();
}

std::optional<EdgeId> RoadNetwork::edge_between(VertexId a, VertexId b) const {
  if (!has_vertex(a) || !has_vertex(b)) return std::nullopt;
  for (EdgeId e : adjacency_[a.value]) {
    if (edges_[e.value].other(a) == b) return e;
  }
  return std::nullopt;
}

std::string RoadNetwork::location_name(Location l) const {
  return l.is_vertex() ? vertex_name(l.as_vertex()) : edge_name(l.as_edge());
}

std::optional<VertexId> RoadNetwork::find_vertex(std::string_view name) const {
  auto it = vertex_by_name_.find(std::string(name));
  if (it == vertex_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> RoadNetwork::find_edge(std::string_view name) const {
  auto it = edge_by_name_.find(std::string(name));
  if (it == edge_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<Location> RoadNetwork::find_location(std::string_view name) const {
  if (auto e = find_edge(name)) return Location::edge(*e);
  if (auto v = find_vertex(name)) return Location::vertex(*v);
  return std::nullopt;
}

bool RoadNetwork::connected() const {
  if (vertex_count() == 0) return true;
  std::vector<bool> seen(vertex_count(), false);
  std::vector<std::uint32_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (EdgeId e : adjacency_[v]) {
      const auto w = edges_[e.value].other(VertexId{v}).value;
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == vertex_count();
}

RoadNetwork build_grid(int rows, int cols, Distance edge_length, Speed edge_speed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be at least 1x1");
  if (edge_length <= Distance::zero()) throw std::invalid_argument("grid edge length must be positive");
  if (edge_speed <= Speed::zero()) throw std::invalid_argument("grid edge speed must be positive");
  RoadNetwork net;
  for (int k = 0; k < rows * cols; ++k) net.add_vertex("v" + std::to_string(k));
  int next_edge = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const VertexId here{static_cast<std::uint32_t>(r * cols + c)};
      if (c + 1 < cols)
        net.add_edge("e" + std::to_string(next_edge++), here, VertexId{here.value + 1}, edge_length, edge_speed);
      if (r + 1 < rows)
        net.add_edge("e" + std::to_string(next_edge++), here, VertexId{here.value + static_cast<std::uint32_t>(cols)},
                     edge_length, edge_speed);
    }
  }
  return net;
}

Time traversal_time(const Edge& edge, Speed agent_speed) {
  if (agent_speed <= Speed::zero()) throw std::invalid_argument("agent speed must be positive");
  return travel_time(edge.length, std::min(agent_speed, edge.speed));
}

std::optional<Path> shortest_path(const RoadNetwork& net, VertexId src, VertexId dst, Speed agent_speed,
                                  const LocationSet& blocked) {
  if (!net.has_vertex(src)) throw UnknownVertexError("unknown source vertex " + std::to_string(src.value));
  if (!net.has_vertex(dst)) throw UnknownVertexError("unknown destination vertex " + std::to_string(dst.value));
  if (src == dst) return Path{{src}, {}, Time::zero()};

  auto vertex_open = [&](VertexId v) {
    return v == src || v == dst || !blocked.contains(Location::vertex(v));
  };
  auto edge_open = [&](EdgeId e) { return !blocked.contains(Location::edge(e)); };

  // Distances to dst, so the forward walk can pick the smallest tight edge.
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> to_dst(net.vertex_count(), kInf);
  using Item = std::pair<std::int64_t, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  to_dst[dst.value] = 0;
  pq.emplace(0, dst.value);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d != to_dst[v]) continue;
    // Paths may not continue through src (it is the start) nor dst.
    if (VertexId{v} == src) continue;
    if (VertexId{v} != dst && !vertex_open(VertexId{v})) continue;
    for (EdgeId e : net.incident(VertexId{v})) {
      if (!edge_open(e)) continue;
      const Edge& edge = net.edge(e);
      const VertexId w = edge.other(VertexId{v});
      if (w == dst) continue;
      if (!vertex_open(w)) continue;
      const std::int64_t nd = d + traversal_time(edge, agent_speed).ticks();
      if (nd < to_dst[w.value]) {
        to_dst[w.value] = nd;
        pq.emplace(nd, w.value);
      }
    }
  }
  if (to_dst[src.value] == kInf) return std::nullopt;

  Path path;
  path.vertices.push_back(src);
  VertexId at = src;
  while (at != dst) {
    std::optional<EdgeId> pick;
    for (EdgeId e : net.incident(at)) {
      if (!edge_open(e)) continue;
      const Edge& edge = net.edge(e);
      const VertexId w = edge.other(at);
      if (w == src || to_dst[w.value] == kInf) continue;
      if (to_dst[at.value] == traversal_time(edge, agent_speed).ticks() + to_dst[w.value]) {
        pick = e;
        break;
      }
    }
    // A finite distance always has a tight outgoing edge.
    const Edge& edge = net.edge(*pick);
    at = edge.other(at);
    path.edges.push_back(*pick);
    path.vertices.push_back(at);
  }
  path.total_travel_time = Time::from_ticks(to_dst[src.value]);
  return path;
}

}  // namespace seapath
