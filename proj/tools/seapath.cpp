#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seapath/bench.hpp"
#include "seapath/distrib.hpp"

using namespace seapath;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& s : split(text, ',')) out.push_back(std::stoul(s));
  return out;
}

/// "1,2,5" or "1-10".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoull(part));
      continue;
    }
    const auto lo = std::stoull(part.substr(0, dash));
    const auto hi = std::stoull(part.substr(dash + 1));
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

std::vector<AgentId> sorted_ids(const std::vector<SEAgent>& agents) {
  std::vector<AgentId> ids;
  for (const auto& a : agents) ids.push_back(a.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void write_outputs(const std::string& out_dir, const Scenario& s, const BenchRow& row) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  const bool valid = row.status == "solved";
  write_json_file(std::filesystem::path(out_dir) / "solution.json", solution_to_json(row.report, s.net, valid));
  std::ofstream csv(std::filesystem::path(out_dir) / "result.csv");
  csv << csv_header() << '\n' << csv_row(row) << '\n';
}

struct SolveFlags {
  std::string algo = "xcbs-a";
  std::string heuristic = "deeper";
  double time_limit_s = 0;
  bool parallel = false;

  void add_to(CLI::App* app) {
    app->add_option("--algo", algo, "greedy|xcbs|xcbs-a|xcbs-a-eff|xcbs-la");
    app->add_option("--heuristic", heuristic, "deeper|largest-block|most-singletons");
    app->add_option("--time-limit", time_limit_s, "seconds; 0 means none");
    app->add_flag("--parallel", parallel, "run independent low-level searches with OpenMP");
  }
  SolveOptions options() const {
    SolveOptions o;
    o.heuristic = parse_heuristic(heuristic);
    o.exec = parallel ? Exec::Parallel : Exec::Serial;
    if (time_limit_s > 0) o.time_limit = std::chrono::milliseconds(static_cast<std::int64_t>(time_limit_s * 1000));
    return o;
  }
};

int print_row(const BenchRow& row) {
  std::cout << csv_header() << '\n' << csv_row(row) << '\n';
  return row.status == "solved" ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conflict-based path finding for spatially extended agents"};
  app.require_subcommand(1);

  // gen
  GenerateOptions gen;
  std::string gen_blocks = "2,1", gen_out;
  double band_min = 0, band_max = 0;
  auto* gen_cmd = app.add_subcommand("gen", "generate a grid scenario with a given root block structure");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--rows", gen.rows);
  gen_cmd->add_option("--cols", gen.cols);
  gen_cmd->add_option("--blocks", gen_blocks, "root block sizes, e.g. 4,1");
  gen_cmd->add_option("--band-min", band_min, "shortest unconstrained plan time");
  gen_cmd->add_option("--band-max", band_max, "longest unconstrained plan time; 0 means unbounded");
  gen_cmd->add_option("--density", gen.density, "edge deletion probability");
  gen_cmd->add_option("--out", gen_out, "output directory (stdout when absent)");

  // run
  std::string run_scenario_path, run_out, run_workers;
  SolveFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "solve a scenario file");
  run_cmd->add_option("scenario", run_scenario_path)->required();
  run_cmd->add_option("--out", run_out, "directory for solution.json and result.csv");
  run_cmd->add_option("--workers", run_workers, "comma-separated worker addresses for a distributed run");
  run_flags.add_to(run_cmd);

  // sweep
  SweepOptions sw;
  std::string sw_axis = "agents", sw_values, sw_algos = "xcbs,xcbs-a", sw_seeds = "1", sw_blocks = "2,1", sw_out;
  SolveFlags sw_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "run algorithms across one experiment axis");
  sweep_cmd->add_option("--axis", sw_axis, "agents|path_length|grid_size|density");
  sweep_cmd->add_option("--values", sw_values, "ascending comma-separated axis values")->required();
  sweep_cmd->add_option("--algos", sw_algos);
  sweep_cmd->add_option("--seed,--seeds", sw_seeds, "seed list, e.g. 1-20 or 3,5,8");
  sweep_cmd->add_option("--rows", sw.base.rows);
  sweep_cmd->add_option("--cols", sw.base.cols);
  sweep_cmd->add_option("--blocks", sw_blocks, "block sizes when agents is not the axis");
  sweep_cmd->add_option("--density", sw.base.density);
  sweep_cmd->add_option("--out", sw_out, "directory for sweep.csv (stdout when absent)");
  sw_flags.add_to(sweep_cmd);

  // validate
  std::string val_scenario, val_solution;
  auto* validate_cmd = app.add_subcommand("validate", "check a solution file against a scenario");
  validate_cmd->add_option("scenario", val_scenario)->required();
  validate_cmd->add_option("solution", val_solution)->required();

  // serve-worker
  std::string w_scenario, w_listen = "127.0.0.1:0", w_agents;
  auto* worker_cmd = app.add_subcommand("serve-worker", "plan for some agents on behalf of a coordinator");
  worker_cmd->add_option("scenario", w_scenario)->required();
  worker_cmd->add_option("--listen", w_listen, "host:port");
  worker_cmd->add_option("--agents", w_agents, "comma-separated agent ids (default: all)");

  // serve-coordinator
  std::string c_scenario, c_workers, c_out;
  SolveFlags c_flags;
  auto* coord_cmd = app.add_subcommand("serve-coordinator", "run the search with planning delegated to workers");
  coord_cmd->add_option("scenario", c_scenario)->required();
  coord_cmd->add_option("--workers", c_workers, "comma-separated worker addresses")->required();
  coord_cmd->add_option("--out", c_out);
  c_flags.add_to(coord_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      gen.block_spec = parse_sizes(gen_blocks);
      gen.band_min = Time::from_double(band_min);
      if (band_max > 0) gen.band_max = Time::from_double(band_max);
      const Scenario s = generate_scenario(gen);
      if (gen_out.empty()) {
        std::cout << to_json(s).dump(2) << '\n';
      } else {
        const auto path = std::filesystem::path(gen_out) / ("scenario-" + std::to_string(gen.seed) + ".json");
        write_json_file(path, to_json(s));
        std::cout << path.string() << '\n';
      }
      return 0;
    }
    if (run_cmd->parsed()) {
      const Scenario s = load_scenario(run_scenario_path);
      SolveOptions opts = run_flags.options();
      std::optional<RemotePlanService> remote;
      if (!run_workers.empty()) {
        const auto addrs = split(run_workers, ',');
        remote.emplace(addrs, s.agents, s.net);
        opts.service = &*remote;
      }
      const BenchRow row = run_scenario(s, parse_algorithm(run_flags.algo), opts);
      if (remote) remote->shutdown();
      write_outputs(run_out, s, row);
      return print_row(row);
    }
    if (sweep_cmd->parsed()) {
      sw.axis = parse_axis(sw_axis);
      for (const auto& v : split(sw_values, ',')) sw.values.push_back(std::stod(v));
      for (const auto& a : split(sw_algos, ',')) sw.algorithms.push_back(parse_algorithm(a));
      sw.seeds = parse_seeds(sw_seeds);
      sw.base.block_spec = parse_sizes(sw_blocks);
      sw.solve = sw_flags.options();
      const auto rows = sweep(sw, &std::cerr);
      std::ofstream file;
      if (!sw_out.empty()) {
        std::filesystem::create_directories(sw_out);
        file.open(std::filesystem::path(sw_out) / "sweep.csv");
      }
      std::ostream& out = sw_out.empty() ? std::cout : file;
      out << csv_header() << '\n';
      for (const auto& r : rows) out << csv_row(r) << '\n';
      return 0;
    }
    if (validate_cmd->parsed()) {
      Scenario s = load_scenario(val_scenario);
      const Json sol = read_json_file(val_solution);
      std::vector<Plan> plans;
      for (const auto& p : sol.at("plans")) plans.push_back(plan_from_json(p, s.net));
      std::sort(s.agents.begin(), s.agents.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      std::sort(plans.begin(), plans.end(), [](const auto& a, const auto& b) { return a.agent < b.agent; });
      const Validation v = validate(plans, s.agents, s.net);
      std::cout << (v.has_conflict ? "conflict" : "valid") << " cost " << solution_cost(plans).str() << " blocks";
      for (const auto& b : v.partition.blocks) {
        std::cout << " {";
        for (std::size_t i = 0; i < b.size(); ++i) std::cout << (i ? "," : "") << b[i];
        std::cout << "}";
      }
      std::cout << '\n';
      return v.has_conflict ? 1 : 0;
    }
    if (worker_cmd->parsed()) {
      const Scenario s = load_scenario(w_scenario);
      WorkerConfig cfg;
      cfg.listen = w_listen;
      cfg.agents = s.agents;
      if (w_agents.empty()) {
        cfg.hosted = sorted_ids(s.agents);
      } else {
        for (auto id : parse_sizes(w_agents)) cfg.hosted.push_back(static_cast<AgentId>(id));
      }
      cfg.on_listening = [](const std::string& addr) { std::cout << "listening " << addr << std::endl; };
      return run_worker(cfg, s.net);
    }
    if (coord_cmd->parsed()) {
      const Scenario s = load_scenario(c_scenario);
      RemotePlanService remote(split(c_workers, ','), s.agents, s.net);
      SolveOptions opts = c_flags.options();
      opts.service = &remote;
      const BenchRow row = run_scenario(s, parse_algorithm(c_flags.algo), opts);
      remote.shutdown();
      write_outputs(c_out, s, row);
      return print_row(row);
    }
  } catch (const std::exception& e) {
    std::cerr << "seapath: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
