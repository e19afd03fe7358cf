#pragma once

#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seapath/agents.hpp"
#include "seapath/roadnet.hpp"

namespace seapath {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Throws FormatError unless `j` is an object whose keys all appear in `allowed`
/// and which has every key in `required`.
void check_fields(const Json& j, std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional = {});

Json time_to_json(Time t);  // "inf" for Time::max()
Time time_from_json(const Json& j);

Json to_json(const RoadNetwork& net);
RoadNetwork network_from_json(const Json& j);

Json to_json(const SEAgent& agent, const RoadNetwork& net);
SEAgent agent_from_json(const Json& j, const RoadNetwork& net);

Json to_json(const Action& action, const RoadNetwork& net);
Action action_from_json(const Json& j, const RoadNetwork& net);

/// {"agent": id, "cost": "4.000", "actions": [...]}.
Json to_json(const Plan& plan, const RoadNetwork& net);
Plan plan_from_json(const Json& j, const RoadNetwork& net);

Json to_json(const Constraint& c, const RoadNetwork& net);
Constraint constraint_from_json(const Json& j, const RoadNetwork& net);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace seapath
