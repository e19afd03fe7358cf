#include "seapath/io.hpp"

#include <algorithm>
#include <fstream>

namespace seapath {

namespace {

template <class Tag>
Fixed<Tag> fixed_from_json(const Json& j, std::string_view what) {
  try {
    if (j.is_string()) return Fixed<Tag>::parse(j.get<std::string>());
    if (j.is_number_integer()) return Fixed<Tag>::from_units(j.get<std::int64_t>());
  } catch (const std::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
  throw FormatError(std::string(what) + ": expected a decimal string");
}

const std::string& string_field(const Json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (!v.is_string()) throw FormatError(std::string(key) + ": expected a string");
  return v.get_ref<const std::string&>();
}

VertexId vertex_field(const Json& j, std::string_view key, const RoadNetwork& net) {
  const auto& name = string_field(j, key);
  auto v = net.find_vertex(name);
  if (!v) throw FormatError(std::string(key) + ": unknown vertex '" + name + "'");
  return *v;
}

Location location_field(const Json& j, std::string_view key, const RoadNetwork& net) {
  const auto& name = string_field(j, key);
  auto l = net.find_location(name);
  if (!l) throw FormatError(std::string(key) + ": unknown location '" + name + "'");
  return *l;
}

AgentId id_field(const Json& j, std::string_view key) {
  const auto& v = j.at(std::string(key));
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw FormatError(std::string(key) + ": expected a non-negative integer");
  const auto x = v.get<std::uint64_t>();
  if (x > std::numeric_limits<AgentId>::max()) throw FormatError(std::string(key) + ": out of range");
  return static_cast<AgentId>(x);
}

}  // namespace

void check_fields(const Json& j, std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional) {
  if (!j.is_object()) throw FormatError("expected an object");
  for (auto key : required)
    if (!j.contains(std::string(key))) throw FormatError("missing field '" + std::string(key) + "'");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw FormatError("unknown field '" + key + "'");
  }
}

Json time_to_json(Time t) { return t == Time::max() ? Json("inf") : Json(t.str()); }

Time time_from_json(const Json& j) {
  if (j.is_string() && j.get_ref<const std::string&>() == "inf") return Time::max();
  return fixed_from_json<TimeTag>(j, "time");
}

Json to_json(const RoadNetwork& net) {
  Json vertices = Json::array();
  for (std::uint32_t v = 0; v < net.vertex_count(); ++v) vertices.push_back(net.vertex_name(VertexId{v}));
  Json edges = Json::array();
  for (const auto& e : net.edges()) {
    edges.push_back({{"id", net.edge_name(e.id)},
                     {"a", net.vertex_name(e.a)},
                     {"b", net.vertex_name(e.b)},
                     {"length", e.length.str()},
                     {"speed", e.speed.str()}});
  }
  return {{"vertices", vertices}, {"edges", edges}};
}

RoadNetwork network_from_json(const Json& j) {
  check_fields(j, {"vertices", "edges"});
  if (!j["vertices"].is_array() || !j["edges"].is_array()) throw FormatError("vertices/edges must be arrays");
  RoadNetwork net;
  try {
    for (const auto& v : j["vertices"]) {
      if (!v.is_string()) throw FormatError("vertex names must be strings");
      net.add_vertex(v.get<std::string>());
    }
    for (const auto& e : j["edges"]) {
      check_fields(e, {"id", "a", "b", "length", "speed"});
      net.add_edge(string_field(e, "id"), vertex_field(e, "a", net), vertex_field(e, "b", net),
                   fixed_from_json<DistanceTag>(e["length"], "length"), fixed_from_json<SpeedTag>(e["speed"], "speed"));
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& ex) {
    throw FormatError(std::string("network: ") + ex.what());
  }
  return net;
}

Json to_json(const SEAgent& agent, const RoadNetwork& net) {
  return {{"id", agent.id},
          {"length", agent.length.str()},
          {"initial", net.vertex_name(agent.initial)},
          {"final", net.vertex_name(agent.final)},
          {"speed", agent.speed.str()}};
}

SEAgent agent_from_json(const Json& j, const RoadNetwork& net) {
  check_fields(j, {"id", "length", "initial", "final", "speed"});
  SEAgent a;
  a.id = id_field(j, "id");
  a.length = fixed_from_json<DistanceTag>(j["length"], "length");
  a.initial = vertex_field(j, "initial", net);
  a.final = vertex_field(j, "final", net);
  a.speed = fixed_from_json<SpeedTag>(j["speed"], "speed");
  try {
    a.validate(net);
  } catch (const std::exception& e) {
    throw FormatError(e.what());
  }
  return a;
}

Json to_json(const Action& action, const RoadNetwork& net) {
  if (const auto* m = std::get_if<MoveAction>(&action))
    return {{"type", "move"}, {"loc", net.location_name(m->location)}, {"t", m->t.str()}};
  const auto& w = std::get<WaitAction>(action);
  return {{"type", "wait"}, {"t", w.t.str()}, {"d", w.d.str()}};
}

Action action_from_json(const Json& j, const RoadNetwork& net) {
  if (!j.is_object() || !j.contains("type")) throw FormatError("action without a type");
  const auto& type = string_field(j, "type");
  if (type == "move") {
    check_fields(j, {"type", "loc", "t"});
    return MoveAction{location_field(j, "loc", net), fixed_from_json<TimeTag>(j["t"], "t")};
  }
  if (type == "wait") {
    check_fields(j, {"type", "t", "d"});
    return WaitAction{fixed_from_json<TimeTag>(j["t"], "t"), fixed_from_json<TimeTag>(j["d"], "d")};
  }
  throw FormatError("unknown action type '" + type + "'");
}

Json to_json(const Plan& plan, const RoadNetwork& net) {
  Json actions = Json::array();
  for (const auto& a : plan.actions) actions.push_back(to_json(a, net));
  return {{"agent", plan.agent}, {"cost", plan.cost.str()}, {"actions", actions}};
}

Plan plan_from_json(const Json& j, const RoadNetwork& net) {
  check_fields(j, {"agent", "cost", "actions"});
  if (!j["actions"].is_array()) throw FormatError("actions must be an array");
  Plan p;
  p.agent = id_field(j, "agent");
  p.cost = fixed_from_json<TimeTag>(j["cost"], "cost");
  for (const auto& a : j["actions"]) p.actions.push_back(action_from_json(a, net));
  return p;
}

Json to_json(const Constraint& c, const RoadNetwork& net) {
  return {{"loc", net.location_name(c.location)},
          {"start", time_to_json(c.interval.start)},
          {"end", time_to_json(c.interval.end)},
          {"owner", c.owner}};
}

Constraint constraint_from_json(const Json& j, const RoadNetwork& net) {
  check_fields(j, {"loc", "start", "end", "owner"});
  Constraint c;
  c.location = location_field(j, "loc", net);
  c.interval = {time_from_json(j["start"]), time_from_json(j["end"])};
  c.owner = id_field(j, "owner");
  if (c.interval.empty()) throw FormatError("constraint interval is empty");
  return c;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2, ' ', false, Json::error_handler_t::replace) << '\n';
}

}  // namespace seapath
