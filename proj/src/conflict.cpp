#include "seapath/conflict.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace seapath {

namespace {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Union by size; returns the surviving root.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

void add_detail(TONode& node, AgentId agent, const Interval& iv) {
  for (auto& d : node.agent_details) {
    if (d.agent == agent) {
      d.intervals.push_back(iv);
      return;
    }
  }
  node.agent_details.push_back({agent, {iv}});
}

bool relates(const AgentDetail& a, const AgentDetail& b) {
  for (const auto& x : a.intervals)
    for (const auto& y : b.intervals)
      if (intersects(x, y)) return true;
  return false;
}

}  // namespace

TOGraph build_to_graph(std::span<const std::vector<OccupancyRecord>> occupancies) {
  std::vector<TONode> nodes;
  std::vector<bool> alive;
  std::vector<std::size_t> redirect;
  std::vector<TOEdge> raw_edges;
  std::unordered_map<Location, std::vector<std::size_t>, LocationHash> by_location;

  auto resolve = [&](std::size_t i) {
    while (redirect[i] != i) i = redirect[i];
    return i;
  };

  for (const auto& records : occupancies) {
    std::optional<std::size_t> prev;
    for (const auto& rec : records) {
      auto& bucket = by_location[rec.location];
      std::optional<std::size_t> host;
      // Merge into any overlapping node; widening tau can pull in further
      // same-location nodes, so repeat until no live node overlaps.
      for (bool changed = true; changed;) {
        changed = false;
        const Interval window = host ? nodes[*host].tau : rec.interval;
        for (std::size_t idx : bucket) {
          if (!alive[idx] || (host && idx == *host) || !intersects(nodes[idx].tau, window)) continue;
          if (!host) {
            host = idx;
            add_detail(nodes[idx], rec.agent, rec.interval);
            nodes[idx].tau = covering(nodes[idx].tau, rec.interval);
          } else {
            const std::size_t keep = std::min(*host, idx);
            const std::size_t drop = std::max(*host, idx);
            for (const auto& d : nodes[drop].agent_details)
              for (const auto& iv : d.intervals) add_detail(nodes[keep], d.agent, iv);
            nodes[keep].tau = covering(nodes[keep].tau, nodes[drop].tau);
            alive[drop] = false;
            redirect[drop] = keep;
            host = keep;
          }
          changed = true;
          break;
        }
      }
      if (!host) {
        host = nodes.size();
        nodes.push_back(TONode{rec.location, rec.interval, {{rec.agent, {rec.interval}}}});
        alive.push_back(true);
        redirect.push_back(*host);
        bucket.push_back(*host);
      }
      if (prev) raw_edges.push_back({*prev, *host, rec.agent});
      prev = *host;
    }
  }

  TOGraph g;
  std::vector<std::size_t> compact(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!alive[i]) continue;
    compact[i] = g.nodes.size();
    auto& node = nodes[i];
    std::sort(node.agent_details.begin(), node.agent_details.end(),
              [](const AgentDetail& a, const AgentDetail& b) { return a.agent < b.agent; });
    for (auto& d : node.agent_details) std::sort(d.intervals.begin(), d.intervals.end());
    g.nodes.push_back(std::move(node));
  }
  g.edges.reserve(raw_edges.size());
  for (const auto& e : raw_edges) g.edges.push_back({compact[resolve(e.from)], compact[resolve(e.to)], e.agent});
  return g;
}

TOGraph build_to_graph(std::span<const Plan> solution, std::span<const SEAgent> agents, const RoadNetwork& net) {
  std::vector<std::size_t> order(agents.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return agents[a].id < agents[b].id; });
  std::vector<std::vector<OccupancyRecord>> occ;
  occ.reserve(order.size());
  for (auto i : order) occ.push_back(occupancy(solution[i], agents[i], net));
  return build_to_graph(occ);
}

Partition partition_agents(const TOGraph& g, std::span<const AgentId> all_agents, std::size_t* relates_tests) {
  std::vector<AgentId> ids(all_agents.begin(), all_agents.end());
  std::sort(ids.begin(), ids.end());
  std::unordered_map<AgentId, std::size_t> slot;
  for (std::size_t i = 0; i < ids.size(); ++i) slot[ids[i]] = i;

  DisjointSets sets(ids.size());
  std::size_t tests = 0;
  for (const auto& node : g.nodes) {
    const auto& z = node.agent_details;
    if (z.size() < 2) continue;
    for (std::size_t i = 0; i < z.size(); ++i) {
      for (std::size_t j = i + 1; j < z.size(); ++j) {
        ++tests;
        if (relates(z[i], z[j])) sets.unite(slot.at(z[i].agent), slot.at(z[j].agent));
      }
    }
  }
  if (relates_tests) *relates_tests = tests;

  Partition p;
  std::unordered_map<std::size_t, std::size_t> block_of_root;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto root = sets.find(i);
    auto [it, fresh] = block_of_root.emplace(root, p.blocks.size());
    if (fresh) p.blocks.emplace_back();
    p.blocks[it->second].push_back(ids[i]);
  }
  return p;
}

Validation validate(std::span<const std::vector<OccupancyRecord>> occupancies, std::span<const AgentId> all_agents) {
  Validation v;
  const TOGraph g = build_to_graph(occupancies);
  for (const auto& n : g.nodes) v.multi_agent_nodes += n.agent_details.size() > 1 ? 1 : 0;
  v.partition = partition_agents(g, all_agents, &v.relates_tests);
  v.has_conflict = v.partition.non_singleton_count() >= 1;
  return v;
}

Validation validate(std::span<const Plan> solution, std::span<const SEAgent> agents, const RoadNetwork& net) {
  std::vector<std::size_t> order(agents.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return agents[a].id < agents[b].id; });
  std::vector<std::vector<OccupancyRecord>> occ;
  std::vector<AgentId> ids;
  for (auto i : order) {
    occ.push_back(occupancy(solution[i], agents[i], net));
    ids.push_back(agents[i].id);
  }
  return validate(occ, ids);
}

std::size_t Partition::singleton_count() const {
  return static_cast<std::size_t>(std::count_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.size() == 1; }));
}

std::size_t Partition::non_singleton_count() const { return blocks.size() - singleton_count(); }

double Partition::average_non_singleton_size() const {
  std::size_t agents = 0, count = 0;
  for (const auto& b : blocks) {
    if (b.size() < 2) continue;
    agents += b.size();
    ++count;
  }
  return count == 0 ? 0.0 : static_cast<double>(agents) / static_cast<double>(count);
}

std::size_t Partition::largest_block() const {
  std::size_t best = 0;
  for (const auto& b : blocks) best = std::max(best, b.size());
  return best;
}

std::vector<std::size_t> Partition::non_singleton_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& b : blocks)
    if (b.size() > 1) out.push_back(b.size());
  return out;
}

std::string TOGraph::export_text(const RoadNetwork& net) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    os << "node " << i << ' ' << net.location_name(n.location) << ' ' << to_string(n.tau);
    for (const auto& d : n.agent_details) {
      os << ' ' << d.agent << ':';
      for (std::size_t k = 0; k < d.intervals.size(); ++k) os << (k ? "+" : "") << to_string(d.intervals[k]);
    }
    os << '\n';
  }
  for (const auto& e : edges) os << "edge " << e.from << ' ' << e.to << " agent=" << e.agent << '\n';
  return os.str();
}

}  // namespace seapath
