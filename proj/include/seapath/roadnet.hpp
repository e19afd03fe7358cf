#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "seapath/time.hpp"

namespace seapath {

struct VertexId {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const VertexId&) const = default;
};

struct EdgeId {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const EdgeId&) const = default;
};

/// A place an agent's body can cover: a vertex or an edge.
///
/// Ordered vertices-first, then by index; this is the "smallest location id"
/// order used for every deterministic tie-break.
class Location {
public:
  enum class Kind : std::uint8_t { Vertex = 0, Edge = 1 };

  constexpr Location() = default;
  static constexpr Location vertex(VertexId v) { return Location(Kind::Vertex, v.value); }
  static constexpr Location edge(EdgeId e) { return Location(Kind::Edge, e.value); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_vertex() const { return kind_ == Kind::Vertex; }
  constexpr bool is_edge() const { return kind_ == Kind::Edge; }
  constexpr VertexId as_vertex() const { return VertexId{index_}; }
  constexpr EdgeId as_edge() const { return EdgeId{index_}; }
  constexpr std::uint32_t index() const { return index_; }

  constexpr auto operator<=>(const Location&) const = default;

private:
  constexpr Location(Kind k, std::uint32_t i) : kind_(k), index_(i) {}
  Kind kind_ = Kind::Vertex;
  std::uint32_t index_ = 0;
};

struct LocationHash {
  std::size_t operator()(const Location& l) const noexcept {
    return (static_cast<std::size_t>(l.index()) << 1) | static_cast<std::size_t>(l.kind());
  }
};

using LocationSet = std::unordered_set<Location, LocationHash>;

struct Edge {
  EdgeId id;
  VertexId a;
  VertexId b;
  Distance length;
  Speed speed;

  VertexId other(VertexId v) const { return v == a ? b : a; }
};

class UnknownVertexError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Undirected road graph. Every edge is a single-lane resource traversable
/// in both directions. Immutable once built; safe for concurrent reads.
class RoadNetwork {
public:
  VertexId add_vertex(std::string name);
  EdgeId add_edge(std::string name, VertexId a, VertexId b, Distance length, Speed speed);

  std::size_t vertex_count() const { return vertex_names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_vertex(VertexId v) const { return v.value < vertex_names_.size(); }
  bool has_location(Location l) const;

  const Edge& edge(EdgeId e) const { return edges_.at(e.value); }
  std::span<const Edge> edges() const { return edges_; }
  /// Incident edges of `v`, ascending by edge id.
  std::span<const EdgeId> incident(VertexId v) const { return adjacency_.at(v.value); }
  std::optional<EdgeId> edge_between(VertexId a, VertexId b) const;

  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v.value); }
  const std::string& edge_name(EdgeId e) const { return edge_names_.at(e.value); }
  std::string location_name(Location l) const;

  std::optional<VertexId> find_vertex(std::string_view name) const;
  std::optional<EdgeId> find_edge(std::string_view name) const;
  /// Resolves "vertex or edge" names; edge names win on a clash.
  std::optional<Location> find_location(std::string_view name) const;

  bool connected() const;

private:
  std::vector<std::string> vertex_names_;
  std::vector<std::string> edge_names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> adjacency_;
  std::unordered_map<std::string, VertexId> vertex_by_name_;
  std::unordered_map<std::string, EdgeId> edge_by_name_;
};

/// Alternating vertex/edge sequence. `vertices.size() == edges.size() + 1`.
struct Path {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;
  Time total_travel_time;

  friend bool operator==(const Path&, const Path&) = default;
};

/// Rows x cols lattice with row-major vertex ids `v<k>`. Edge ids `e<k>` are
/// assigned walking vertices row-major, right neighbour before lower neighbour.
RoadNetwork build_grid(int rows, int cols, Distance edge_length, Speed edge_speed);

/// length / min(agent_speed, edge speed), rounded up to a whole tick.
Time traversal_time(const Edge& edge, Speed agent_speed);

/// Minimum-travel-time simple path from `src` to `dst`.
///
/// Blocked edges are never used; blocked vertices are never passed through
/// (src and dst are exempt). Equal-time paths are ordered by their edge-id
/// sequence, lexicographically. Returns nullopt when `dst` is unreachable and
/// throws UnknownVertexError for ids outside the network.
std::optional<Path> shortest_path(const RoadNetwork& net, VertexId src, VertexId dst, Speed agent_speed,
                                  const LocationSet& blocked = {});

}  // namespace seapath

template <>
struct std::hash<seapath::Location> {
  std::size_t operator()(const seapath::Location& l) const noexcept { return seapath::LocationHash{}(l); }
};
