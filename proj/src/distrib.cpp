#include "seapath/distrib.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <map>

#include "seapath/io.hpp"

namespace seapath {

namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

std::uint64_t uint_field(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ProtocolError(std::string(key) + ": expected a non-negative integer");
}

AgentId agent_id(const Json& v) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
      v.get<std::uint64_t>() > std::numeric_limits<AgentId>::max())
    throw ProtocolError("expected an agent id");
  return static_cast<AgentId>(v.get<std::uint64_t>());
}

const Json& array_field(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw ProtocolError(std::string(key) + ": expected an array");
  return v;
}

std::vector<AgentId> ids_from(const Json& arr) {
  std::vector<AgentId> out;
  for (const auto& v : arr) out.push_back(agent_id(v));
  return out;
}

Json plans_json(std::span<const Plan> plans, const RoadNetwork& net) {
  Json out = Json::array();
  for (const auto& p : plans) out.push_back(to_json(p, net));
  return out;
}

std::vector<Plan> plans_from(const Json& arr, const RoadNetwork& net) {
  std::vector<Plan> out;
  for (const auto& p : arr) out.push_back(plan_from_json(p, net));
  return out;
}

Json constraints_json(std::span<const Constraint> cs, const RoadNetwork& net) {
  Json out = Json::array();
  for (const auto& c : cs) out.push_back(to_json(c, net));
  return out;
}

std::vector<Constraint> constraints_from(const Json& arr, const RoadNetwork& net) {
  std::vector<Constraint> out;
  for (const auto& c : arr) out.push_back(constraint_from_json(c, net));
  return out;
}

Json to_wire(const Message& m, const RoadNetwork& net) {
  struct Visitor {
    const RoadNetwork& net;
    Json operator()(const Hello& h) const { return {{"type", "hello"}, {"agents", h.agents}}; }
    Json operator()(const PlanRequest& r) const {
      Json required = Json::array();
      for (const auto& l : r.job.required) required.push_back(net.location_name(l));
      Json j{{"type", "plan_request"},
             {"request", r.request},
             {"agent", r.job.agent},
             {"constraints", constraints_json(r.job.constraints.constraints, net)},
             {"commitments", r.job.commitment_context},
             {"required", required},
             {"mode", r.job.mode == PlanMode::Optimal ? "optimal" : "replan"},
             {"quantum", r.job.quantum.str()}};
      if (r.job.seed) j["seed"] = to_json(*r.job.seed, net);
      return j;
    }
    Json operator()(const PlanResponse& r) const {
      Json j{{"type", "plan_response"}, {"request", r.request}, {"fallback", r.outcome.fallback}};
      j["plan"] = r.outcome.plan ? to_json(*r.outcome.plan, net) : Json(nullptr);
      j["cost"] = r.outcome.plan ? Json(r.outcome.plan->cost.str()) : Json(nullptr);
      return j;
    }
    Json operator()(const BlockSolveRequest& r) const {
      return {{"type", "block_request"},
              {"request", r.request},
              {"agents", r.agents},
              {"seeds", plans_json(r.seeds, net)},
              {"constraints", constraints_json(r.constraints, net)}};
    }
    Json operator()(const BlockSolveResponse& r) const {
      return {{"type", "block_response"}, {"request", r.request}, {"plans", plans_json(r.plans, net)}};
    }
    Json operator()(const ErrorResponse& r) const {
      Json j{{"type", "error"}, {"message", r.message}};
      j["request"] = r.request ? Json(*r.request) : Json(nullptr);
      return j;
    }
    Json operator()(const Shutdown&) const { return {{"type", "shutdown"}}; }
  };
  return std::visit(Visitor{net}, m);
}

Message from_wire(const Json& j, const RoadNetwork& net) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw ProtocolError("message without a type");
  const auto& type = j["type"].get_ref<const std::string&>();
  if (type == "hello") {
    check_fields(j, {"type", "agents"});
    return Hello{ids_from(array_field(j, "agents"))};
  }
  if (type == "plan_request") {
    check_fields(j, {"type", "request", "agent", "constraints", "commitments", "required", "mode", "quantum"}, {"seed"});
    PlanRequest r;
    r.request = uint_field(j, "request");
    r.job.agent = agent_id(j["agent"]);
    r.job.constraints = ConstraintSet(constraints_from(array_field(j, "constraints"), net));
    r.job.commitment_context = ids_from(array_field(j, "commitments"));
    for (const auto& l : array_field(j, "required")) {
      if (!l.is_string()) throw ProtocolError("required: expected location names");
      auto loc = net.find_location(l.get<std::string>());
      if (!loc) throw ProtocolError("required: unknown location '" + l.get<std::string>() + "'");
      r.job.required.push_back(*loc);
    }
    const auto& mode = j["mode"];
    if (mode == "optimal") {
      r.job.mode = PlanMode::Optimal;
    } else if (mode == "replan") {
      r.job.mode = PlanMode::Replan;
    } else {
      throw ProtocolError("mode: expected replan or optimal");
    }
    r.job.quantum = time_from_json(j["quantum"]);
    if (r.job.quantum <= Time::zero() || r.job.quantum == Time::max()) throw ProtocolError("quantum must be positive");
    if (j.contains("seed")) r.job.seed = plan_from_json(j["seed"], net);
    return r;
  }
  if (type == "plan_response") {
    check_fields(j, {"type", "request", "plan", "cost", "fallback"});
    PlanResponse r;
    r.request = uint_field(j, "request");
    if (!j["fallback"].is_boolean()) throw ProtocolError("fallback: expected a boolean");
    r.outcome.fallback = j["fallback"].get<bool>();
    if (!j["plan"].is_null()) {
      r.outcome.plan = plan_from_json(j["plan"], net);
      if (time_from_json(j["cost"]) != r.outcome.plan->cost) throw ProtocolError("cost disagrees with the plan");
    } else if (!j["cost"].is_null()) {
      throw ProtocolError("cost without a plan");
    }
    return r;
  }
  if (type == "block_request") {
    check_fields(j, {"type", "request", "agents", "seeds", "constraints"});
    return BlockSolveRequest{uint_field(j, "request"), ids_from(array_field(j, "agents")),
                             plans_from(array_field(j, "seeds"), net),
                             constraints_from(array_field(j, "constraints"), net)};
  }
  if (type == "block_response") {
    check_fields(j, {"type", "request", "plans"});
    return BlockSolveResponse{uint_field(j, "request"), plans_from(array_field(j, "plans"), net)};
  }
  if (type == "error") {
    check_fields(j, {"type", "request", "message"});
    if (!j["message"].is_string()) throw ProtocolError("message: expected a string");
    ErrorResponse r;
    if (!j["request"].is_null()) r.request = uint_field(j, "request");
    r.message = j["message"].get<std::string>();
    return r;
  }
  if (type == "shutdown") {
    check_fields(j, {"type"});
    return Shutdown{};
  }
  throw ProtocolError("unknown message type '" + type + "'");
}

int remaining_ms(std::optional<Clock::time_point> deadline) {
  if (!deadline) return -1;
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
  return static_cast<int>(std::max<std::int64_t>(0, left));
}

std::pair<std::string, std::string> split_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size())
    throw std::invalid_argument("address '" + address + "' is not host:port");
  return {address.substr(0, colon), address.substr(colon + 1)};
}

addrinfo* resolve(const std::string& address, bool passive) {
  const auto [host, port] = split_address(address);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw std::runtime_error("cannot resolve " + address + ": " + gai_strerror(rc));
  return res;
}

}  // namespace

std::string encode_payload(const Message& m, const RoadNetwork& net) {
  // Error texts may echo undecodable input; invalid UTF-8 becomes U+FFFD.
  return to_wire(m, net).dump(-1, ' ', false, Json::error_handler_t::replace);
}

Message decode_payload(std::string_view payload, const RoadNetwork& net) {
  try {
    return from_wire(Json::parse(payload), net);
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProtocolError(e.what());
  }
}

std::string frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw ProtocolError("frame exceeds 16 MiB");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>(n >> 24));
  out.push_back(static_cast<char>(n >> 16 & 0xff));
  out.push_back(static_cast<char>(n >> 8 & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

std::string encode(const Message& m, const RoadNetwork& net) { return frame(encode_payload(m, net)); }

Message decode(std::string_view bytes, const RoadNetwork& net) {
  FrameReader reader;
  reader.feed(bytes);
  auto payload = reader.next();
  if (!payload) throw ProtocolError("truncated frame");
  if (reader.buffered() != 0) throw ProtocolError("trailing bytes after frame");
  return decode_payload(*payload, net);
}

std::optional<std::string> FrameReader::next() {
  if (buffer_.size() < 4) return std::nullopt;
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n = n << 8 | static_cast<unsigned char>(buffer_[static_cast<std::size_t>(i)]);
  if (n > kMaxFrameBytes) throw ProtocolError("frame length " + std::to_string(n) + " exceeds 16 MiB");
  if (buffer_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  std::string payload = buffer_.substr(4, n);
  buffer_.erase(0, 4 + static_cast<std::size_t>(n));
  return payload;
}

std::chrono::milliseconds net_timeout() {
  if (const char* v = std::getenv("SEAPATH_NET_TIMEOUT_MS")) {
    char* end = nullptr;
    const long long ms = std::strtoll(v, &end, 10);
    if (end != v && *end == '\0' && ms > 0) return std::chrono::milliseconds(ms);
  }
  return std::chrono::milliseconds(30000);
}

// ---------------------------------------------------------------- transport

Connection::Connection(Connection&& other) noexcept : fd_(other.fd_), reader_(std::move(other.reader_)) {
  other.fd_ = -1;
}

Connection& Connection::operator=(Connection&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    reader_ = std::move(other.reader_);
    other.fd_ = -1;
  }
  return *this;
}

Connection::~Connection() {
  if (fd_ >= 0) ::close(fd_);
}

Connection Connection::connect(const std::string& address, std::chrono::milliseconds timeout) {
  addrinfo* res = resolve(address, false);
  const auto deadline = Clock::now() + timeout;
  std::string last = "no address";
  // Workers may still be starting; retry until the deadline.
  while (true) {
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) {
        last = errno_text("socket");
        continue;
      }
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        freeaddrinfo(res);
        return Connection(fd);
      }
      last = errno_text("connect");
      ::close(fd);
    }
    if (Clock::now() >= deadline) break;
    ::usleep(50000);
  }
  freeaddrinfo(res);
  throw std::runtime_error("cannot connect to " + address + ": " + last);
}

void Connection::send_frame(std::string_view payload, std::chrono::milliseconds timeout) {
  const std::string bytes = frame(payload);
  const auto deadline = Clock::now() + timeout;
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    pollfd p{fd_, POLLOUT, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw std::runtime_error(errno_text("poll"));
    if (rc == 0) throw std::runtime_error("send timed out");
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      throw std::runtime_error(errno_text("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> Connection::receive_frame(std::optional<std::chrono::milliseconds> timeout) {
  std::optional<Clock::time_point> deadline;
  if (timeout) deadline = Clock::now() + *timeout;
  char buf[65536];
  while (true) {
    if (auto payload = reader_.next()) return payload;
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw std::runtime_error(errno_text("poll"));
    if (rc == 0) throw std::runtime_error("receive timed out");
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(errno_text("recv"));
    }
    if (n == 0) {
      if (reader_.buffered() != 0) throw ProtocolError("connection closed inside a frame");
      return std::nullopt;
    }
    reader_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
  }
}

Listener::Listener(const std::string& address) {
  addrinfo* res = resolve(address, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, res->ai_protocol);
  if (fd_ < 0) {
    freeaddrinfo(res);
    throw std::runtime_error(errno_text("socket"));
  }
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const int rc = ::bind(fd_, res->ai_addr, res->ai_addrlen);
  freeaddrinfo(res);
  if (rc != 0 || ::listen(fd_, 8) != 0) {
    const std::string what = errno_text("bind/listen");
    ::close(fd_);
    throw std::runtime_error(what + " on " + address);
  }
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

std::string Listener::address() const {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  char host[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, host, sizeof host);
  return std::string(host) + ":" + std::to_string(ntohs(addr.sin_port));
}

std::optional<Connection> Listener::accept(std::optional<std::chrono::milliseconds> timeout) {
  std::optional<Clock::time_point> deadline;
  if (timeout) deadline = Clock::now() + *timeout;
  while (true) {
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw std::runtime_error(errno_text("poll"));
    if (rc == 0) return std::nullopt;
    const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      throw std::runtime_error(errno_text("accept"));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Connection(fd);
  }
}

// ---------------------------------------------------------------- worker

namespace {

/// Outcome of one request on the worker side.
Message answer(const Message& m, const WorkerConfig& config, const RoadNetwork& net) {
  auto hosts = [&](AgentId id) { return std::find(config.hosted.begin(), config.hosted.end(), id) != config.hosted.end(); };
  if (const auto* r = std::get_if<PlanRequest>(&m)) {
    if (!hosts(r->job.agent))
      return ErrorResponse{r->request, "agent " + std::to_string(r->job.agent) + " is not hosted here"};
    try {
      return PlanResponse{r->request, run_plan_job(r->job, config.agents, net, config.lowlevel_cap)};
    } catch (const std::exception& e) {
      return ErrorResponse{r->request, e.what()};
    }
  }
  if (const auto* r = std::get_if<BlockSolveRequest>(&m)) {
    // Block searches restart from the unconstrained optimum, so seed plans are
    // not consulted; outside constraints would change the problem and are refused.
    if (!r->constraints.empty()) return ErrorResponse{r->request, "block requests with outside constraints are not supported"};
    try {
      SolveOptions opts;
      opts.lowlevel_cap = config.lowlevel_cap;
      return BlockSolveResponse{r->request, block_level_search(r->agents, config.agents, net, opts)};
    } catch (const std::exception& e) {
      return ErrorResponse{r->request, e.what()};
    }
  }
  return ErrorResponse{std::nullopt, "unexpected message for a worker"};
}

}  // namespace

int run_worker(const WorkerConfig& config, const RoadNetwork& net) {
  std::vector<SEAgent> sorted = config.agents;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  WorkerConfig cfg = config;
  cfg.agents = std::move(sorted);
  for (AgentId id : cfg.hosted) (void)agent_index(cfg.agents, id);

  Listener listener(cfg.listen);
  if (cfg.on_listening) cfg.on_listening(listener.address());
  const auto timeout = net_timeout();
  std::size_t losses = 0;
  while (true) {
    auto conn = listener.accept(losses == 0 ? std::nullopt : std::optional(timeout));
    if (!conn) {
      if (++losses > cfg.max_reconnects) return 1;
      continue;
    }
    try {
      conn->send_frame(encode_payload(Hello{cfg.hosted}, net), timeout);
      while (true) {
        std::optional<std::string> payload;
        try {
          payload = conn->receive_frame(std::nullopt);
        } catch (const ProtocolError& e) {
          // The stream cannot be resynchronised after a bad length.
          conn->send_frame(encode_payload(ErrorResponse{std::nullopt, e.what()}, net), timeout);
          break;
        }
        if (!payload) break;
        Message reply;
        try {
          const Message m = decode_payload(*payload, net);
          if (std::holds_alternative<Shutdown>(m)) return 0;
          reply = answer(m, cfg, net);
        } catch (const ProtocolError& e) {
          reply = ErrorResponse{std::nullopt, e.what()};
        }
        conn->send_frame(encode_payload(reply, net), timeout);
      }
    } catch (const std::exception&) {
      // Lost the coordinator; wait for a reconnect.
    }
    if (++losses > cfg.max_reconnects) return 1;
  }
}

// ---------------------------------------------------------------- coordinator

RemotePlanService::RemotePlanService(std::span<const std::string> workers, std::span<const SEAgent> agents,
                                     const RoadNetwork& net)
    : net_(net) {
  const auto timeout = net_timeout();
  for (const auto& address : workers) {
    Connection conn = Connection::connect(address, timeout);
    auto payload = conn.receive_frame(timeout);
    if (!payload) throw WorkerLost("worker " + address + " closed before saying hello");
    const Message m = decode_payload(*payload, net);
    const auto* hello = std::get_if<Hello>(&m);
    if (!hello) throw ProtocolError("worker " + address + " did not start with hello");
    workers_.push_back({address, std::move(conn), hello->agents});
    for (AgentId id : hello->agents) registry_.emplace_back(id, workers_.size() - 1);
  }
  std::sort(registry_.begin(), registry_.end());
  for (std::size_t i = 1; i < registry_.size(); ++i)
    if (registry_[i].first == registry_[i - 1].first)
      throw std::invalid_argument("agent " + std::to_string(registry_[i].first) + " is hosted by two workers");
  for (const auto& a : agents)
    if (!std::binary_search(registry_.begin(), registry_.end(), std::pair{a.id, std::size_t{0}},
                            [](const auto& x, const auto& y) { return x.first < y.first; }))
      throw std::invalid_argument("no worker hosts agent " + std::to_string(a.id));
}

RemotePlanService::~RemotePlanService() {
  try {
    shutdown();
  } catch (...) {
  }
}

std::size_t RemotePlanService::owner(AgentId id) const {
  auto it = std::lower_bound(registry_.begin(), registry_.end(), std::pair{id, std::size_t{0}},
                             [](const auto& x, const auto& y) { return x.first < y.first; });
  if (it == registry_.end() || it->first != id) throw std::invalid_argument("no worker hosts agent " + std::to_string(id));
  return it->second;
}

void RemotePlanService::lost(std::size_t worker, const std::string& what, std::optional<AgentId> agent) const {
  std::string msg = "worker " + workers_[worker].address;
  if (agent) {
    msg += " (agent " + std::to_string(*agent) + ")";
  } else {
    msg += " (agents";
    for (AgentId a : workers_[worker].agents) msg += " " + std::to_string(a);
    msg += ")";
  }
  throw WorkerLost(msg + ": " + what);
}

std::vector<PlanOutcome> RemotePlanService::plan(std::span<const PlanJob> jobs) {
  if (shut_down_) throw std::logic_error("plan service already shut down");
  requests_ += jobs.size();
  const auto start = Clock::now();
  const auto timeout = net_timeout();

  struct Pending {
    std::size_t job;
    AgentId agent;
  };
  std::vector<std::string> outbox(workers_.size());
  std::vector<std::size_t> sent(workers_.size(), 0);
  std::vector<std::map<std::uint64_t, Pending>> waiting(workers_.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const std::size_t w = owner(jobs[k].agent);
    const std::uint64_t id = next_request_++;
    outbox[w] += frame(encode_payload(PlanRequest{id, jobs[k]}, net_));
    waiting[w].emplace(id, Pending{k, jobs[k].agent});
  }

  // Requests to different workers are in flight together; each worker
  // answers its own in order.
  std::vector<PlanOutcome> out(jobs.size());
  char buf[65536];
  while (true) {
    std::vector<pollfd> fds;
    std::vector<std::size_t> which;
    for (std::size_t w = 0; w < workers_.size(); ++w) {
      short events = 0;
      if (sent[w] < outbox[w].size()) events |= POLLOUT;
      if (!waiting[w].empty()) events |= POLLIN;
      if (events == 0) continue;
      fds.push_back({workers_[w].conn.fd(), events, 0});
      which.push_back(w);
    }
    if (fds.empty()) break;
    const int rc = ::poll(fds.data(), fds.size(), static_cast<int>(timeout.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw std::runtime_error(errno_text("poll"));
    if (rc == 0) lost(which.front(), "timed out", waiting[which.front()].begin()->second.agent);
    for (std::size_t i = 0; i < fds.size(); ++i) {
      const std::size_t w = which[i];
      auto first_agent = [&] { return waiting[w].begin()->second.agent; };
      if (fds[i].revents & POLLOUT) {
        const ssize_t n = ::send(fds[i].fd, outbox[w].data() + sent[w], outbox[w].size() - sent[w],
                                 MSG_NOSIGNAL | MSG_DONTWAIT);
        if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) lost(w, errno_text("send"), first_agent());
        if (n > 0) sent[w] += static_cast<std::size_t>(n);
      }
      if (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) {
        const ssize_t n = ::recv(fds[i].fd, buf, sizeof buf, MSG_DONTWAIT);
        if (n == 0) lost(w, "connection closed", first_agent());
        if (n < 0) {
          if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
          lost(w, errno_text("recv"), first_agent());
        }
        auto& reader = workers_[w].conn.reader();
        reader.feed(std::string_view(buf, static_cast<std::size_t>(n)));
        while (auto payload = reader.next()) {
          const Message m = decode_payload(*payload, net_);
          if (const auto* err = std::get_if<ErrorResponse>(&m)) {
            const AgentId agent = err->request && waiting[w].count(*err->request) ? waiting[w].at(*err->request).agent
                                                                                  : first_agent();
            throw std::runtime_error("worker " + workers_[w].address + " failed planning agent " +
                                     std::to_string(agent) + ": " + err->message);
          }
          const auto* resp = std::get_if<PlanResponse>(&m);
          if (!resp) throw ProtocolError("unexpected message from worker " + workers_[w].address);
          auto it = waiting[w].find(resp->request);
          if (it == waiting[w].end()) throw ProtocolError("response to unknown request " + std::to_string(resp->request));
          out[it->second.job] = resp->outcome;
          waiting[w].erase(it);
        }
      }
    }
  }
  busy_ms_ += std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return out;
}

std::vector<Plan> RemotePlanService::solve_block(std::span<const AgentId> block) {
  if (block.empty()) return {};
  const std::size_t w = owner(block.front());
  const auto timeout = net_timeout();
  const std::uint64_t id = next_request_++;
  BlockSolveRequest req{id, std::vector<AgentId>(block.begin(), block.end()), {}, {}};
  std::optional<std::string> payload;
  try {
    workers_[w].conn.send_frame(encode_payload(req, net_), timeout);
    payload = workers_[w].conn.receive_frame(timeout);
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::runtime_error& e) {
    lost(w, e.what(), block.front());
  }
  if (!payload) lost(w, "connection closed", block.front());
  const Message m = decode_payload(*payload, net_);
  if (const auto* err = std::get_if<ErrorResponse>(&m)) throw std::runtime_error("block solve failed: " + err->message);
  const auto* resp = std::get_if<BlockSolveResponse>(&m);
  if (!resp || resp->request != id) throw ProtocolError("unexpected reply to a block request");
  return resp->plans;
}

void RemotePlanService::shutdown() {
  if (shut_down_) return;
  shut_down_ = true;
  const auto timeout = net_timeout();
  for (auto& w : workers_) {
    try {
      w.conn.send_frame(encode_payload(Shutdown{}, net_), timeout);
    } catch (const std::exception&) {
    }
  }
}

SolveReport run_coordinator(Algorithm algo, std::span<const SEAgent> agents, const RoadNetwork& net,
                            std::span<const std::string> workers, SolveOptions options) {
  RemotePlanService service(workers, agents, net);
  options.service = &service;
  SolveReport report = solve(algo, agents, net, options);
  service.shutdown();
  return report;
}

}  // namespace seapath
