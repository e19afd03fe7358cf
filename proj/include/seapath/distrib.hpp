#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "seapath/highlevel.hpp"
#include "seapath/service.hpp"

namespace seapath {

class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

/// Sent by a worker when a coordinator connects: the agents it plans for.
struct Hello {
  std::vector<AgentId> agents;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct PlanRequest {
  std::uint64_t request = 0;
  PlanJob job;
  friend bool operator==(const PlanRequest&, const PlanRequest&) = default;
};

struct PlanResponse {
  std::uint64_t request = 0;
  PlanOutcome outcome;
  friend bool operator==(const PlanResponse&, const PlanResponse&) = default;
};

struct BlockSolveRequest {
  std::uint64_t request = 0;
  std::vector<AgentId> agents;
  std::vector<Plan> seeds;
  std::vector<Constraint> constraints;
  friend bool operator==(const BlockSolveRequest&, const BlockSolveRequest&) = default;
};

struct BlockSolveResponse {
  std::uint64_t request = 0;
  std::vector<Plan> plans;
  friend bool operator==(const BlockSolveResponse&, const BlockSolveResponse&) = default;
};

struct ErrorResponse {
  std::optional<std::uint64_t> request;
  std::string message;
  friend bool operator==(const ErrorResponse&, const ErrorResponse&) = default;
};

struct Shutdown {
  friend bool operator==(const Shutdown&, const Shutdown&) = default;
};

using Message =
    std::variant<Hello, PlanRequest, PlanResponse, BlockSolveRequest, BlockSolveResponse, ErrorResponse, Shutdown>;

/// Compact JSON text; plans and constraints name locations through `net`.
std::string encode_payload(const Message& m, const RoadNetwork& net);
/// Throws ProtocolError on anything but a well-formed message.
Message decode_payload(std::string_view payload, const RoadNetwork& net);

/// 4-byte big-endian length followed by the payload.
std::string frame(std::string_view payload);
std::string encode(const Message& m, const RoadNetwork& net);
/// `bytes` must hold exactly one frame.
Message decode(std::string_view bytes, const RoadNetwork& net);

/// Splits a byte stream into frame payloads.
class FrameReader {
public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  /// Next complete payload; throws ProtocolError on an oversize length.
  std::optional<std::string> next();
  std::size_t buffered() const { return buffer_.size(); }

private:
  std::string buffer_;
};

/// SEAPATH_NET_TIMEOUT_MS, default 30000.
std::chrono::milliseconds net_timeout();

/// A connected TCP stream carrying frames.
class Connection {
public:
  explicit Connection(int fd) : fd_(fd) {}
  Connection(Connection&& other) noexcept;
  Connection& operator=(Connection&& other) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;
  ~Connection();

  /// "host:port".
  static Connection connect(const std::string& address, std::chrono::milliseconds timeout);

  void send_frame(std::string_view payload, std::chrono::milliseconds timeout);
  /// nullopt on orderly close; throws on timeout, error or oversize frame.
  std::optional<std::string> receive_frame(std::optional<std::chrono::milliseconds> timeout);

  int fd() const { return fd_; }
  FrameReader& reader() { return reader_; }

private:
  int fd_ = -1;
  FrameReader reader_;
};

class Listener {
public:
  /// "host:port"; port 0 picks a free one.
  explicit Listener(const std::string& address);
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  /// The bound "host:port".
  std::string address() const;
  /// nullopt on timeout.
  std::optional<Connection> accept(std::optional<std::chrono::milliseconds> timeout);

private:
  int fd_ = -1;
};

struct WorkerConfig {
  std::string listen = "127.0.0.1:0";
  /// Every agent of the scenario; the worker answers for `hosted` only.
  std::vector<SEAgent> agents;
  std::vector<AgentId> hosted;
  std::size_t lowlevel_cap = LowLevelOptions{}.max_expansions;
  /// Connections that may be lost before the worker gives up.
  std::size_t max_reconnects = 3;
  /// Called with the bound address once listening.
  std::function<void(const std::string&)> on_listening;
};

/// Serves coordinators until Shutdown (returns 0) or until reconnects run out (returns 1).
int run_worker(const WorkerConfig& config, const RoadNetwork& net);

class WorkerLost : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sends plan jobs to the worker hosting each agent.
class RemotePlanService final : public PlanService {
public:
  /// Connects to every worker and refuses to start unless each agent has exactly one.
  RemotePlanService(std::span<const std::string> workers, std::span<const SEAgent> agents, const RoadNetwork& net);
  ~RemotePlanService() override;

  std::vector<PlanOutcome> plan(std::span<const PlanJob> jobs) override;
  /// Solves a block on the worker hosting its first agent.
  std::vector<Plan> solve_block(std::span<const AgentId> block);
  void shutdown();

private:
  struct Worker {
    std::string address;
    Connection conn;
    std::vector<AgentId> agents;
  };
  std::size_t owner(AgentId id) const;
  [[noreturn]] void lost(std::size_t worker, const std::string& what, std::optional<AgentId> agent) const;

  const RoadNetwork& net_;
  std::vector<Worker> workers_;
  std::vector<std::pair<AgentId, std::size_t>> registry_;
  std::uint64_t next_request_ = 1;
  bool shut_down_ = false;
};

/// solve() with every planning job delegated to the workers.
SolveReport run_coordinator(Algorithm algo, std::span<const SEAgent> agents, const RoadNetwork& net,
                            std::span<const std::string> workers, SolveOptions options = {});

}  // namespace seapath
