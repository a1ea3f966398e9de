#include "avsearch/bridge.hpp"

#include <array>
#include <deque>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "avsearch/environment.hpp"

namespace avsearch {

namespace {

constexpr int kProtocolVersion = 1;

class BridgeSession {
 public:
  explicit BridgeSession(const SimulationConfig& cfg) : cfg_(cfg) {}

  std::string hello() const {
    nlohmann::ordered_json j;
    j["type"] = "hello";
    j["protocol"] = "avsearch-bridge";
    j["version"] = kProtocolVersion;
    return j.dump();
  }

  // Returns the reply line; sets *closing when the client asked to close.
  std::string handle(const std::string& line, bool* closing) {
    *closing = false;
    try {
      const auto j = nlohmann::json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "reset") return handle_reset(j);
      if (type == "step") return handle_step(j);
      if (type == "close") {
        *closing = true;
        return R"({"type":"bye"})";
      }
      return error("unknown request type: " + type);
    } catch (const std::exception& e) {
      return error(e.what());
    }
  }

 private:
  std::string error(const std::string& message) const {
    nlohmann::ordered_json j;
    j["type"] = "error";
    j["message"] = message;
    return j.dump();
  }

  std::string handle_reset(const nlohmann::json& j) {
    const auto seed = j.at("seed").get<std::uint64_t>();
    const auto map_path = j.at("map_path").get<std::string>();
    env_ = std::make_unique<Environment>(load_map(map_path), cfg_);
    const CognitiveState state = env_->reset(seed);
    est_theta_.assign(4, state.summary.map_estimate.theta_deg);
    est_r_.assign(4, state.summary.map_estimate.r);
    return reply(state, 0.0, false, std::nullopt);
  }

  std::string handle_step(const nlohmann::json& j) {
    if (!env_) return error("step before reset");
    if (env_->done()) return error("episode already terminated; send reset");
    const Action a = action_from_string(j.at("action").get<std::string>());
    const auto result = env_->step(a);
    est_theta_.pop_front();
    est_theta_.push_back(result.state.summary.map_estimate.theta_deg);
    est_r_.pop_front();
    est_r_.push_back(result.state.summary.map_estimate.r);
    return reply(result.state, result.reward, result.done, result.outcome);
  }

  std::string reply(const CognitiveState& state, Scalar reward, bool done,
                    std::optional<Outcome> outcome) const {
    nlohmann::ordered_json obs;
    obs["est_theta"] = est_theta_;
    obs["theta_uncertainty"] = state.summary.theta_uncertainty_deg;
    obs["est_r"] = est_r_;
    obs["r_uncertainty"] = state.summary.r_uncertainty_m;
    std::array<int, 4> actions{};
    for (size_t i = 0; i < actions.size(); ++i)
      actions[i] = history_code(state.last_actions[i]);
    obs["last_actions"] = actions;
    auto posterior = nlohmann::json::array();
    const GridArray probs = state.posterior.probabilities();
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
      for (Eigen::Index k = 0; k < probs.cols(); ++k) posterior.push_back(probs(i, k));
    obs["posterior"] = std::move(posterior);
    obs["posterior_entropy"] = state.summary.entropy_nats;
    obs["elapsed_steps"] = state.elapsed_steps;

    nlohmann::ordered_json j;
    j["type"] = "observation";
    j["obs"] = std::move(obs);
    j["reward"] = reward;
    j["done"] = done;
    j["outcome"] = outcome ? nlohmann::json(to_string(*outcome)) : nlohmann::json(nullptr);
    return j.dump();
  }

  SimulationConfig cfg_;
  std::unique_ptr<Environment> env_;
  std::deque<Scalar> est_theta_;
  std::deque<Scalar> est_r_;
};

}  // namespace

void bridge_serve(std::istream& in, std::ostream& out, const SimulationConfig& cfg) {
  BridgeSession session(cfg);
  out << session.hello() << "\n" << std::flush;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    bool closing = false;
    out << session.handle(line, &closing) << "\n" << std::flush;
    if (closing) break;
  }
}

namespace {

void write_all(int fd, const std::string& text) {
  size_t off = 0;
  while (off < text.size()) {
    const ssize_t n = ::write(fd, text.data() + off, text.size() - off);
    if (n <= 0) return;
    off += static_cast<size_t>(n);
  }
}

}  // namespace

void bridge_serve_tcp(int port, const SimulationConfig& cfg, int* bound_port) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw std::runtime_error("bridge: cannot create socket");
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listener);
    throw std::runtime_error("bridge: cannot bind port");
  }
  if (::listen(listener, 8) != 0) {
    ::close(listener);
    throw std::runtime_error("bridge: cannot listen");
  }
  if (bound_port) {
    sockaddr_in actual{};
    socklen_t len = sizeof(actual);
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&actual), &len);
    *bound_port = ntohs(actual.sin_port);
  }

  const int client = ::accept(listener, nullptr, nullptr);
  if (client < 0) {
    ::close(listener);
    throw std::runtime_error("bridge: accept failed");
  }

  BridgeSession session(cfg);
  write_all(client, session.hello() + "\n");

  std::string buffer;
  bool closing = false;
  while (!closing) {
    pollfd fds[2];
    fds[0] = {client, POLLIN, 0};
    fds[1] = {listener, POLLIN, 0};
    if (::poll(fds, 2, -1) < 0) break;

    if (fds[1].revents & POLLIN) {
      // A second client while one is active: refuse.
      const int extra = ::accept(listener, nullptr, nullptr);
      if (extra >= 0) {
        write_all(extra, R"({"type":"error","message":"busy: one client at a time"})"
                         "\n");
        ::close(extra);
      }
    }

    if (fds[0].revents & (POLLIN | POLLHUP)) {
      char chunk[4096];
      const ssize_t n = ::read(client, chunk, sizeof(chunk));
      if (n <= 0) break;  // client went away
      buffer.append(chunk, static_cast<size_t>(n));
      size_t pos;
      while (!closing && (pos = buffer.find('\n')) != std::string::npos) {
        const std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        if (line.empty()) continue;
        write_all(client, session.handle(line, &closing) + "\n");
      }
    }
  }

  ::close(client);
  ::close(listener);
}

}  // namespace avsearch
