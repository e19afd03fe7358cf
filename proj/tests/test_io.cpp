#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "seapath/bench.hpp"
#include "seapath/io.hpp"

using namespace seapath;

TEST_CASE("times serialize with an infinite sentinel") {
  CHECK(time_to_json(Time::max()) == "inf");
  CHECK(time_from_json(Json("inf")) == Time::max());
  for (std::int64_t t : {0, 1, 999, 1000, 123456})
    CHECK(time_from_json(time_to_json(Time::from_ticks(t))) == Time::from_ticks(t));
  CHECK_THROWS_AS(time_from_json(Json("soon")), FormatError);
}

TEST_CASE("networks, agents, plans and constraints round-trip") {
  const auto f = fixture::five_agents();
  const RoadNetwork net = network_from_json(to_json(f.net));
  CHECK(to_json(net) == to_json(f.net));
  CHECK(net.vertex_count() == f.net.vertex_count());
  for (std::size_t i = 0; i < f.agents.size(); ++i) {
    const SEAgent a = agent_from_json(to_json(f.agents[i], f.net), net);
    CHECK(a.id == f.agents[i].id);
    CHECK(a.initial == f.agents[i].initial);
    CHECK(a.final == f.agents[i].final);
    CHECK(a.length == f.agents[i].length);
    CHECK(a.speed == f.agents[i].speed);
    CHECK(plan_from_json(to_json(f.plans[i], f.net), net) == f.plans[i]);
  }
  const Constraint c{f.loc("e2"), {Time::from_units(2), Time::max()}, 3};
  CHECK(constraint_from_json(to_json(c, f.net), net) == c);
  const Action w = WaitAction{Time::from_units(1), Time::from_ticks(1500)};
  CHECK(action_from_json(to_json(w, f.net), net) == w);
}

TEST_CASE("unknown and missing fields are rejected") {
  CHECK_NOTHROW(check_fields(Json{{"a", 1}}, {"a"}, {"b"}));
  CHECK_NOTHROW(check_fields(Json{{"a", 1}, {"b", 2}}, {"a"}, {"b"}));
  CHECK_THROWS_AS(check_fields(Json{{"b", 2}}, {"a"}, {"b"}), FormatError);
  CHECK_THROWS_AS(check_fields(Json{{"a", 1}, {"c", 2}}, {"a"}, {"b"}), FormatError);
  CHECK_THROWS_AS(check_fields(Json::array(), {"a"}), FormatError);

  const auto f = fixture::five_agents();
  Json plan = to_json(f.plans[0], f.net);
  plan["extra"] = true;
  CHECK_THROWS(plan_from_json(plan, f.net));
  Json agent = to_json(f.agents[0], f.net);
  agent["initial"] = "nowhere";
  CHECK_THROWS(agent_from_json(agent, f.net));
}

TEST_CASE("scenario files round-trip through disk") {
  GenerateOptions g;
  g.seed = 17;
  g.block_spec = {2, 2};
  const Scenario s = generate_scenario(g);
  const auto path = std::filesystem::temp_directory_path() / "seapath_io_scenario.json";
  write_json_file(path, to_json(s));
  const Scenario back = scenario_from_json(read_json_file(path));
  std::filesystem::remove(path);
  CHECK(to_json(back) == to_json(s));
  CHECK(back.agents.size() == 4);
  CHECK_THROWS(read_json_file(path));
}
