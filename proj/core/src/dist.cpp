#include "cellfree/dist.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <sstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "cellfree/errors.hpp"

namespace cellfree {

namespace {
constexpr std::uint64_t kW0Stream = 0x57306d61ULL;  // initial broadcast matrix
}

Coordinator::Coordinator(int num_agents) : num_agents_(num_agents), pending_(num_agents) {
  if (num_agents < 1) throw ConfigError("coordinator needs at least one agent");
}

int Coordinator::rows_received() const {
  int n = 0;
  for (const auto& p : pending_) {
    if (p.has_value()) ++n;
  }
  return n;
}

void Coordinator::submit_row(int round, int agent_id, const std::vector<double>& row) {
  if (agent_id < 0 || agent_id >= num_agents_) {
    throw ProtocolError("row from unknown agent " + std::to_string(agent_id));
  }
  if (round != round_) {
    throw ProtocolError("agent " + std::to_string(agent_id) + " submitted for round " +
                        std::to_string(round) + " but round " + std::to_string(round_) +
                        " is open");
  }
  if (pending_[agent_id].has_value()) {
    throw ProtocolError("duplicate row from agent " + std::to_string(agent_id) + " in round " +
                        std::to_string(round));
  }
  pending_[agent_id] = row;
}

bool Coordinator::round_complete() const { return rows_received() == num_agents_; }

std::optional<Mat> Coordinator::try_assemble() {
  if (!round_complete()) return std::nullopt;  // barrier: wait for every agent
  const int K = static_cast<int>(pending_[0]->size());
  Mat W(num_agents_, K);
  for (int m = 0; m < num_agents_; ++m) {
    if (static_cast<int>(pending_[m]->size()) != K) {
      throw ProtocolError("agent rows disagree on length");
    }
    std::copy(pending_[m]->begin(), pending_[m]->end(), W.row(m));
    pending_[m].reset();
  }
  ++round_;
  return W;
}

AgentView::AgentView(int m_, const Scenario& scenario, const UplinkEnv::Options& opts,
                     const DistHyper& hyper)
    : m(m_),
      replay(hyper.agent.replay_capacity),
      noise_rng(Rng::stream(hyper.seed + static_cast<std::uint64_t>(m_), 0x6e6f6973ULL)),
      sample_rng(Rng::stream(hyper.seed + static_cast<std::uint64_t>(m_), 0x73616d70ULL)),
      env(scenario, opts) {
  Rng init_rng = Rng::stream(hyper.seed + static_cast<std::uint64_t>(m_), 0x696e6974ULL);
  DdpgHyper agent_hyper = hyper.agent;
  // The action is one row: a K-vector, normalized as one softmax group when
  // the column activation is requested (a 1-row column softmax would pin
  // every entry to one).
  if (agent_hyper.action_act == OutputActivation::kColumnSoftmax) {
    agent_hyper.action_act = OutputActivation::kFlatSoftmax;
  }
  if (hyper.warm_start.rows == scenario.config.M && hyper.warm_start.cols == scenario.config.K) {
    Mat row(1, scenario.config.K);
    for (int k = 0; k < scenario.config.K; ++k) row(0, k) = hyper.warm_start(m_, k);
    agent_hyper.actor_bias_init = policy_bias_for(row, agent_hyper.action_act);
  }
  core = DdpgCore::create(env.K(), 1, env.K(), agent_hyper, init_rng);
  W_local = Mat(env.M(), env.K());
  // runner pointers are bound by dist_train once every agent has its final
  // address; binding here would dangle if the owning vector relocates.
}

namespace {

EnvAdapter row_adapter(AgentView& agent) {
  EnvAdapter adapter;
  adapter.reset = [&agent]() { return agent.env.reset().gamma; };
  adapter.step = [&agent](const std::vector<double>& row) {
    Mat W = agent.W_local;
    std::copy(row.begin(), row.end(), W.row(agent.m));
    return agent.env.step(W);
  };
  return adapter;
}

}  // namespace

void local_episode(AgentView& agent) {
  agent.best = BestTracker{};
  agent.runner.run_episode(row_adapter(agent), agent.curve, &agent.best);
}

DistResult dist_train(const Scenario& scenario, const DistHyper& hyper,
                      const UplinkEnv::Options& env_opts) {
  const int M = scenario.config.M;
  const int K = scenario.config.K;

  DdpgHyper agent_hyper = hyper.agent;
  agent_hyper.episodes = hyper.rounds;  // one local episode per round

  DistHyper bound = hyper;
  bound.agent = agent_hyper;

  std::vector<AgentView> agents;
  agents.reserve(M);
  for (int m = 0; m < M; ++m) agents.emplace_back(m, scenario, env_opts, bound);

  // Fresh evaluation environment for the assembled matrix each round.
  UplinkEnv eval_env(scenario, env_opts);

  // Initial broadcast: the supplied warm start, or a random box matrix.
  Mat W_new(M, K);
  if (hyper.warm_start.rows == M && hyper.warm_start.cols == K) {
    W_new = hyper.warm_start;
  } else {
    Rng w0_rng = Rng::stream(hyper.seed, kW0Stream);
    for (double& v : W_new.a) v = w0_rng.uniform();
  }
  for (AgentView& a : agents) a.W_local = W_new;

  const long total_steps = static_cast<long>(hyper.rounds) * agent_hyper.steps_per_episode;
  for (AgentView& a : agents) {
    a.runner.core = &a.core;
    a.runner.replay = &a.replay;
    a.runner.noise_rng = &a.noise_rng;
    a.runner.sample_rng = &a.sample_rng;
    a.runner.hyper = &bound.agent;
    a.runner.total_steps = total_steps;
  }

  DistResult result;
  Coordinator coord(M);
  for (int round = 0; round < hyper.rounds; ++round) {
    DistRoundPoint pt;
    pt.round = round;

    if (hyper.deterministic || M == 1) {
      for (AgentView& a : agents) local_episode(a);
    } else {
      // Agents share nothing within a round; episodes run in parallel.
      std::vector<std::thread> pool;
      pool.reserve(M);
      for (AgentView& a : agents) pool.emplace_back([&a]() { local_episode(a); });
      for (std::thread& th : pool) th.join();
    }
    for (AgentView& a : agents) {
      pt.agent_best_rewards.push_back(a.best.reward);
      coord.submit_row(round, a.m, a.best.action);
    }

    const std::optional<Mat> assembled = coord.try_assemble();
    if (!assembled.has_value()) {
      throw ProtocolError("coordinator barrier left incomplete after all agents reported");
    }
    W_new = *assembled;
    for (AgentView& a : agents) a.W_local = W_new;

    pt.assembled_reward = eval_env.reward_of(W_new);
    result.curve.push_back(std::move(pt));
  }

  result.W = W_new;
  for (AgentView& a : agents) result.agent_curves.push_back(std::move(a.curve));
  return result;
}

namespace socket_transport {

namespace {

void send_line(int fd, const std::string& line) {
  std::string payload = line;
  payload.push_back('\n');
  size_t sent = 0;
  while (sent < payload.size()) {
    const ssize_t n = ::send(fd, payload.data() + sent, payload.size() - sent, 0);
    if (n <= 0) throw ProtocolError("socket send failed");
    sent += static_cast<size_t>(n);
  }
}

std::string recv_line(int fd) {
  std::string line;
  char ch = 0;
  for (;;) {
    const ssize_t n = ::recv(fd, &ch, 1, 0);
    if (n <= 0) throw ProtocolError("socket closed mid-line");
    if (ch == '\n') return line;
    line.push_back(ch);
  }
}

int make_server(int port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw ProtocolError("cannot create server socket");
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw ProtocolError("cannot bind coordinator port");
  }
  if (::listen(fd, 64) != 0) {
    ::close(fd);
    throw ProtocolError("cannot listen on coordinator port");
  }
  return fd;
}

}  // namespace

Mat serve_coordinator(int port, int num_agents, int num_rounds) {
  const int server = make_server(port);
  std::vector<int> clients;
  clients.reserve(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    const int fd = ::accept(server, nullptr, nullptr);
    if (fd < 0) {
      for (int c : clients) ::close(c);
      ::close(server);
      throw ProtocolError("accept failed");
    }
    clients.push_back(fd);
  }

  Coordinator coord(num_agents);
  Mat W;
  try {
    for (int round = 0; round < num_rounds; ++round) {
      for (int i = 0; i < num_agents; ++i) {
        const auto msg = nlohmann::json::parse(recv_line(clients[i]));
        coord.submit_row(msg.at("round").get<int>(), msg.at("agent_id").get<int>(),
                         msg.at("row").get<std::vector<double>>());
      }
      const std::optional<Mat> assembled = coord.try_assemble();
      if (!assembled.has_value()) throw ProtocolError("round left incomplete");
      W = *assembled;

      nlohmann::json out;
      out["round"] = round;
      auto rows = nlohmann::json::array();
      for (int m = 0; m < W.rows; ++m) {
        rows.push_back(std::vector<double>(W.row(m), W.row(m) + W.cols));
      }
      out["W"] = rows;
      const std::string line = out.dump();
      for (int c : clients) send_line(c, line);
    }
  } catch (...) {
    for (int c : clients) ::close(c);
    ::close(server);
    throw;
  }
  for (int c : clients) ::close(c);
  ::close(server);
  return W;
}

Mat run_scripted_agent(int port, int agent_id, int num_rounds, const std::vector<double>& row) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw ProtocolError("cannot create agent socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw ProtocolError("agent cannot reach coordinator");
  }

  Mat W;
  try {
    for (int round = 0; round < num_rounds; ++round) {
      nlohmann::json msg;
      msg["round"] = round;
      msg["agent_id"] = agent_id;
      msg["row"] = row;
      send_line(fd, msg.dump());

      const auto reply = nlohmann::json::parse(recv_line(fd));
      const auto rows = reply.at("W").get<std::vector<std::vector<double>>>();
      W = Mat(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
      for (size_t m = 0; m < rows.size(); ++m) {
        std::copy(rows[m].begin(), rows[m].end(), W.row(static_cast<int>(m)));
      }
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  return W;
}

}  // namespace socket_transport

}  // namespace cellfree
