#include "seapath/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "seapath/kernels.hpp"

namespace seapath {

namespace {

/// Uniform draw in [0, n) by rejection, so streams match across standard libraries.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % n;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 sub_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

bool footprints_overlap(const std::vector<OccupancyRecord>& a, const std::vector<OccupancyRecord>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.location == y.location && intersects(x.interval, y.interval)) return true;
  return false;
}

std::string fmt_double(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

RoadNetwork build_sparse_grid(std::size_t rows, std::size_t cols, Distance length, Speed speed, double density,
                              std::mt19937_64& rng) {
  const RoadNetwork full = build_grid(static_cast<int>(rows), static_cast<int>(cols), length, speed);
  if (density <= 0.0) return full;
  const std::size_t m = full.edge_count();
  std::vector<bool> keep(m, true);
  std::vector<std::size_t> deleted;
  for (std::size_t e = 0; e < m; ++e) {
    if (unit(rng) < density) {
      keep[e] = false;
      deleted.push_back(e);
    }
  }
  // Union-find over the surviving edges, then restore deleted edges that join components.
  std::vector<std::size_t> parent(full.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t e = 0; e < m; ++e) {
    if (!keep[e]) continue;
    const Edge& edge = full.edge(EdgeId{static_cast<std::uint32_t>(e)});
    parent[find(edge.a.value)] = find(edge.b.value);
  }
  for (std::size_t i = deleted.size(); i > 1; --i) std::swap(deleted[i - 1], deleted[below(rng, i)]);
  for (std::size_t e : deleted) {
    const Edge& edge = full.edge(EdgeId{static_cast<std::uint32_t>(e)});
    const auto ra = find(edge.a.value), rb = find(edge.b.value);
    if (ra == rb) continue;
    parent[ra] = rb;
    keep[e] = true;
  }

  RoadNetwork net;
  for (std::uint32_t v = 0; v < full.vertex_count(); ++v) net.add_vertex(full.vertex_name(VertexId{v}));
  for (std::size_t e = 0; e < m; ++e) {
    if (!keep[e]) continue;
    const EdgeId id{static_cast<std::uint32_t>(e)};
    const Edge& edge = full.edge(id);
    net.add_edge(full.edge_name(id), edge.a, edge.b, edge.length, edge.speed);
  }
  return net;
}

Scenario generate_scenario(const GenerateOptions& o) {
  const std::size_t n_agents = std::accumulate(o.block_spec.begin(), o.block_spec.end(), std::size_t{0});
  if (o.rows * o.cols < 2 * n_agents)
    throw GenerationError("grid " + std::to_string(o.rows) + "x" + std::to_string(o.cols) + " is too small for " +
                          std::to_string(n_agents) + " agents");
  if (std::find(o.block_spec.begin(), o.block_spec.end(), std::size_t{0}) != o.block_spec.end())
    throw GenerationError("block sizes must be positive");

  for (std::size_t attempt = 0; attempt < o.max_attempts; ++attempt) {
    auto rng = sub_rng(o.seed, attempt);
    Scenario s;
    s.seed = o.seed;
    s.meta = {o.rows, o.cols, o.block_spec, o.band_min, o.band_max, o.density};
    s.net = build_sparse_grid(o.rows, o.cols, o.edge_length, o.edge_speed, o.density, rng);
    const auto nv = s.net.vertex_count();

    std::vector<std::vector<OccupancyRecord>> occ;
    std::vector<std::size_t> block_of;
    std::set<std::uint32_t> used;
    bool ok = true;
    for (std::size_t b = 0; b < o.block_spec.size() && ok; ++b) {
      for (std::size_t m = 0; m < o.block_spec[b] && ok; ++m) {
        bool placed = false;
        for (std::size_t d = 0; d < o.draws_per_agent && !placed; ++d) {
          SEAgent a;
          a.id = static_cast<AgentId>(s.agents.size());
          a.initial = VertexId{static_cast<std::uint32_t>(below(rng, nv))};
          a.final = VertexId{static_cast<std::uint32_t>(below(rng, nv))};
          a.length = o.agent_length;
          a.speed = o.agent_speed;
          if (a.initial == a.final || used.contains(a.initial.value) || used.contains(a.final.value)) continue;
          const Plan p = shortest_plan(a, s.net);
          if (p.cost < o.band_min || p.cost > o.band_max) continue;
          auto fp = occupancy(p, a, s.net);
          bool inside = m == 0, outside = false;
          for (std::size_t k = 0; k < occ.size() && !outside; ++k) {
            if (!footprints_overlap(fp, occ[k])) continue;
            if (block_of[k] == b) inside = true;
            else outside = true;
          }
          if (!inside || outside) continue;
          used.insert(a.initial.value);
          used.insert(a.final.value);
          s.agents.push_back(a);
          occ.push_back(std::move(fp));
          block_of.push_back(b);
          placed = true;
        }
        ok = placed;
      }
    }
    if (!ok) continue;

    std::vector<AgentId> ids;
    for (const auto& a : s.agents) ids.push_back(a.id);
    auto sizes = validate(occ, ids).partition.non_singleton_sizes();
    std::vector<std::size_t> want;
    for (auto k : o.block_spec)
      if (k > 1) want.push_back(k);
    std::sort(sizes.begin(), sizes.end());
    std::sort(want.begin(), want.end());
    if (sizes == want) return s;
  }
  throw GenerationError("could not place agents for the requested blocks after " + std::to_string(o.max_attempts) +
                        " attempts; try a larger grid or a wider path band");
}

Json to_json(const Scenario& s) {
  Json agents = Json::array();
  for (const auto& a : s.agents) agents.push_back(to_json(a, s.net));
  return {{"seed", s.seed},
          {"network", to_json(s.net)},
          {"agents", agents},
          {"meta",
           {{"grid", {s.meta.grid_rows, s.meta.grid_cols}},
            {"block_spec", s.meta.block_spec},
            {"band", {time_to_json(s.meta.band_min), time_to_json(s.meta.band_max)}},
            {"density", s.meta.density}}}};
}

Scenario scenario_from_json(const Json& j) {
  check_fields(j, {"network", "agents"}, {"seed", "meta"});
  Scenario s;
  s.net = network_from_json(j["network"]);
  if (!j["agents"].is_array()) throw FormatError("agents must be an array");
  std::set<AgentId> seen;
  for (const auto& a : j["agents"]) {
    s.agents.push_back(agent_from_json(a, s.net));
    if (!seen.insert(s.agents.back().id).second)
      throw FormatError("duplicate agent id " + std::to_string(s.agents.back().id));
  }
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("meta")) {
    const auto& m = j["meta"];
    check_fields(m, {}, {"grid", "block_spec", "band", "density"});
    if (m.contains("grid")) {
      s.meta.grid_rows = m["grid"].at(0).get<std::size_t>();
      s.meta.grid_cols = m["grid"].at(1).get<std::size_t>();
    }
    if (m.contains("block_spec")) s.meta.block_spec = m["block_spec"].get<std::vector<std::size_t>>();
    if (m.contains("band")) {
      s.meta.band_min = time_from_json(m["band"].at(0));
      s.meta.band_max = time_from_json(m["band"].at(1));
    }
    if (m.contains("density")) s.meta.density = m["density"].get<double>();
  }
  return s;
}

Json solution_to_json(const SolveReport& report, const RoadNetwork& net, bool valid) {
  Json plans = Json::array();
  for (const auto& p : report.solution) plans.push_back(to_json(p, net));
  return {{"algorithm", report.algorithm}, {"cost", report.cost.str()}, {"valid", valid}, {"plans", plans}};
}

BenchRow run_scenario(const Scenario& s, Algorithm algo, const SolveOptions& options) {
  BenchRow row;
  row.seed = s.seed;
  row.agents = s.agents.size();
  row.grid_rows = s.meta.grid_rows;
  row.grid_cols = s.meta.grid_cols;
  row.density = s.meta.density;
  row.report.algorithm = std::string(to_string(algo));
  try {
    row.report = solve(algo, s.agents, s.net, options);
    row.blocks = row.report.root_blocks;
    if (row.report.status != "solved") {
      row.status = row.report.status;
      return row;
    }
    std::vector<SEAgent> sorted = s.agents;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    const bool valid = !validate(row.report.solution, sorted, s.net).has_conflict;
    row.status = valid ? "solved" : "invalid";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

const char* csv_header() {
  return "algorithm,seed,agents,blocks,cost,nodes_generated,nodes_evaluated,elapsed_ms,grid_rows,grid_cols,density,"
         "status";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_row(const BenchRow& row) {
  std::ostringstream os;
  os << csv_escape(row.report.algorithm) << ',' << row.seed << ',' << row.agents << ',' << row.blocks << ','
     << row.report.cost.str() << ',' << row.report.nodes_generated << ',' << row.report.nodes_evaluated << ','
     << fmt_double(row.report.elapsed_ms, "%.3f") << ',' << row.grid_rows << ',' << row.grid_cols << ','
     << fmt_double(row.density, "%.3f") << ',' << csv_escape(row.status);
  return os.str();
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "agents") return SweepAxis::Agents;
  if (name == "path_length" || name == "path-length") return SweepAxis::PathLength;
  if (name == "grid_size" || name == "grid-size") return SweepAxis::GridSize;
  if (name == "density") return SweepAxis::Density;
  throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::vector<BenchRow> sweep(const SweepOptions& options, std::ostream* progress) {
  if (!std::is_sorted(options.values.begin(), options.values.end()))
    throw std::invalid_argument("sweep values must be ascending");
  std::vector<BenchRow> rows;
  for (double value : options.values) {
    GenerateOptions g = options.base;
    switch (options.axis) {
      case SweepAxis::Agents: {
        const auto n = static_cast<std::size_t>(value);
        g.block_spec.assign(n / 2, 2);
        if (n % 2) g.block_spec.push_back(1);
        break;
      }
      case SweepAxis::PathLength:
        g.band_min = Time::from_double(value);
        g.band_max = g.band_min + Time::from_units(4);
        break;
      case SweepAxis::GridSize:
        g.rows = g.cols = static_cast<std::size_t>(value);
        break;
      case SweepAxis::Density:
        g.density = value;
        break;
    }
    for (auto seed : options.seeds) {
      g.seed = seed;
      std::optional<Scenario> scenario;
      std::string failure;
      try {
        scenario = generate_scenario(g);
      } catch (const std::exception& e) {
        failure = std::string("error: ") + e.what();
      }
      for (auto algo : options.algorithms) {
        BenchRow row;
        if (scenario) {
          row = run_scenario(*scenario, algo, options.solve);
        } else {
          row.report.algorithm = std::string(to_string(algo));
          row.seed = seed;
          row.agents = std::accumulate(g.block_spec.begin(), g.block_spec.end(), std::size_t{0});
          row.grid_rows = g.rows;
          row.grid_cols = g.cols;
          row.density = g.density;
          row.status = failure;
        }
        if (progress) *progress << csv_row(row) << '\n';
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace seapath
