#pragma once

// Tabular Q-learning scheduler: state discretisation, the reward signal,
// epsilon-greedy selection, a replay memory and the temporal-difference
// update
//
//   Q(s,a) <- Q(s,a) + alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))
//
// with the bootstrap term dropped on terminal transitions.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsched/errors.hpp"
#include "qsched/format.hpp"
#include "qsched/rng.hpp"
#include "qsched/sim.hpp"

namespace qsched {

struct DiscretizationScheme {
  std::size_t cpu_bins = 10;
  std::size_t mem_bins = 10;
  // Finite upper bounds; an implicit unbounded bucket follows the last one.
  std::vector<std::size_t> queue_bounds{0, 2, 5, 10, 20};
  double q_max_norm = 20.0;

  std::size_t bucket_count() const { return queue_bounds.size() + 1; }
  std::size_t state_count() const { return cpu_bins * mem_bins * bucket_count(); }

  friend bool operator==(const DiscretizationScheme&, const DiscretizationScheme&) = default;
};

inline void validate(const DiscretizationScheme& s) {
  if (s.cpu_bins < 1 || s.mem_bins < 1) throw ConfigError("discretization bins must be >= 1");
  for (std::size_t i = 1; i < s.queue_bounds.size(); ++i)
    if (s.queue_bounds[i] <= s.queue_bounds[i - 1]) throw ConfigError("queue bucket bounds must be strictly increasing");
  if (!(s.q_max_norm > 0.0) || !std::isfinite(s.q_max_norm)) throw ConfigError("q_max_norm must be positive");
}

using StateId = std::size_t;

struct StateCoords {
  std::size_t cpu_bin = 0;
  std::size_t mem_bin = 0;
  std::size_t bucket = 0;

  friend bool operator==(const StateCoords&, const StateCoords&) = default;
};

inline StateId encode_state(const StateCoords& c, const DiscretizationScheme& s) {
  return c.cpu_bin * (s.mem_bins * s.bucket_count()) + c.mem_bin * s.bucket_count() + c.bucket;
}

inline StateCoords decode_state(StateId id, const DiscretizationScheme& s) {
  const std::size_t per_cpu = s.mem_bins * s.bucket_count();
  return {id / per_cpu, (id % per_cpu) / s.bucket_count(), id % s.bucket_count()};
}

inline StateCoords state_coords(const Observation& obs, const DiscretizationScheme& s) {
  auto bin = [](double frac, std::size_t bins) {
    double f = std::isfinite(frac) ? std::clamp(frac, 0.0, 1.0) : 0.0;
    return std::min(static_cast<std::size_t>(std::floor(f * static_cast<double>(bins))), bins - 1);
  };
  StateCoords c;
  c.cpu_bin = bin(obs.cpu_util, s.cpu_bins);
  c.mem_bin = bin(obs.mem_util, s.mem_bins);
  c.bucket = static_cast<std::size_t>(
      std::lower_bound(s.queue_bounds.begin(), s.queue_bounds.end(), obs.queue_len) - s.queue_bounds.begin());
  return c;
}

inline StateId discretize(const Observation& obs, const DiscretizationScheme& s) {
  return encode_state(state_coords(obs, s), s);
}

// -(cpu + mem + min(queue, cap) / cap), in [-3, 0].
inline double reward(const Observation& obs, const DiscretizationScheme& s) {
  double cpu = std::clamp(obs.cpu_util, 0.0, 1.0);
  double mem = std::clamp(obs.mem_util, 0.0, 1.0);
  double queue = std::min(static_cast<double>(obs.queue_len), s.q_max_norm) / s.q_max_norm;
  return 0.0 - (cpu + mem + queue);
}

class QTable {
 public:
  QTable() = default;
  QTable(std::size_t states, std::size_t actions)
      : states_(states), actions_(actions), values_(states * actions, 0.0) {}

  std::size_t state_count() const { return states_; }
  std::size_t action_count() const { return actions_; }

  double& at(StateId s, std::size_t a) { return values_[s * actions_ + a]; }
  double at(StateId s, std::size_t a) const { return values_[s * actions_ + a]; }

  std::span<double> row(StateId s) { return {values_.data() + s * actions_, actions_}; }
  std::span<const double> row(StateId s) const { return {values_.data() + s * actions_, actions_}; }

  std::span<const double> values() const { return values_; }

  double max_value(StateId s) const {
    auto r = row(s);
    return *std::max_element(r.begin(), r.end());
  }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> values_;
};

// First maximum wins, so ties go to the lowest action index.
inline std::size_t argmax(std::span<const double> row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

struct Transition {
  StateId s = 0;
  std::size_t a = 0;
  double r = 0.0;
  StateId s_next = 0;
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

inline void q_update(QTable& table, const Transition& t, double alpha, double gamma) {
  double bootstrap = t.terminal ? 0.0 : table.max_value(t.s_next);
  double& q = table.at(t.s, t.a);
  q = q + alpha * (t.r + gamma * bootstrap - q);
}

// One uniform draw decides explore vs exploit; exploring takes a second draw
// for the action index.
inline std::size_t select_action(const QTable& table, StateId s, double epsilon, Rng& rng) {
  if (rng.uniform01() < epsilon) return rng.uniform_index(table.action_count());
  return argmax(table.row(s));
}

struct Hyperparams {
  double alpha = 0.1;
  double gamma = 0.95;
  double eps_start = 1.0;
  double eps_decay = 0.95;
  double eps_min = 0.05;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 10000;
  std::size_t episodes = 200;
  std::uint64_t seed = 0;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

inline void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0, 1], got " + format_sig9(alpha));
}

inline void validate(const Hyperparams& hp) {
  validate_alpha(hp.alpha);
  if (!(hp.gamma >= 0.0 && hp.gamma < 1.0)) throw ConfigError("gamma must be in [0, 1)");
  if (!(hp.eps_start >= 0.0 && hp.eps_start <= 1.0)) throw ConfigError("eps_start must be in [0, 1]");
  if (!(hp.eps_decay > 0.0 && hp.eps_decay <= 1.0)) throw ConfigError("eps_decay must be in (0, 1]");
  if (!(hp.eps_min >= 0.0 && hp.eps_min <= 1.0)) throw ConfigError("eps_min must be in [0, 1]");
  if (hp.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (hp.replay_capacity < 1) throw ConfigError("replay_capacity must be >= 1");
}

inline double epsilon_schedule(std::size_t episode, const Hyperparams& hp) {
  return std::max(hp.eps_min, hp.eps_start * std::pow(hp.eps_decay, static_cast<double>(episode)));
}

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw ConfigError("replay capacity must be >= 1");
    items_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  std::uint64_t insertions() const { return insertions_; }

  void push(const Transition& t) {
    if (items_.size() < capacity_) {
      items_.push_back(t);
    } else {
      items_[head_] = t;
      head_ = (head_ + 1) % capacity_;
    }
    ++insertions_;
  }

  // Oldest first.
  const Transition& operator[](std::size_t i) const { return items_[(head_ + i) % items_.size()]; }

  // Uniform with replacement; nullopt while fewer than batch_size are stored.
  std::optional<std::vector<Transition>> sample(std::size_t batch_size, Rng& rng) const {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (items_.size() < batch_size) return std::nullopt;
    std::vector<Transition> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) batch.push_back((*this)[rng.uniform_index(items_.size())]);
    return batch;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest element once full
  std::uint64_t insertions_ = 0;
  std::vector<Transition> items_;
};

inline void replay_push(ReplayBuffer& buffer, const Transition& t) { buffer.push(t); }

inline std::optional<std::vector<Transition>> replay_sample(const ReplayBuffer& buffer, std::size_t batch_size,
                                                            Rng& rng) {
  return buffer.sample(batch_size, rng);
}

// Owns the table, the replay memory and the exploration and replay streams.
class QLearner {
 public:
  QLearner(std::size_t states, std::size_t actions, const Hyperparams& hp)
      : hp_(hp),
        table_(states, actions),
        buffer_(hp.replay_capacity),
        explore_(hp.seed, Stream::Exploration),
        replay_(hp.seed, Stream::Replay) {
    validate(hp_);
  }

  std::size_t act(StateId s, double epsilon) { return select_action(table_, s, epsilon, explore_); }

  // Stores the transition, then applies one sampled batch once enough are held.
  void learn(const Transition& t) {
    buffer_.push(t);
    if (auto batch = buffer_.sample(hp_.batch_size, replay_)) {
      for (const auto& b : *batch) q_update(table_, b, hp_.alpha, hp_.gamma);
      updates_ += batch->size();
    }
  }

  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::uint64_t update_count() const { return updates_; }

 private:
  Hyperparams hp_;
  QTable table_;
  ReplayBuffer buffer_;
  Rng explore_;
  Rng replay_;
  std::uint64_t updates_ = 0;
};

struct RewardPoint {
  std::size_t episode = 0;
  double epsilon = 0.0;
  double total_reward = 0.0;
  std::size_t decisions = 0;
  bool truncated = false;

  friend bool operator==(const RewardPoint&, const RewardPoint&) = default;
};

struct TrainResult {
  QTable table;
  std::vector<RewardPoint> curve;
  std::uint64_t updates = 0;
};

// ---------------------------------------------------------------------------
// Training against an arbitrary finite environment.

struct EnvStep {
  StateId next = 0;
  double reward = 0.0;
  bool terminal = false;
};

template <class E>
concept Environment = requires(E& env, std::size_t a) {
  { env.state_count() } -> std::convertible_to<std::size_t>;
  { env.action_count() } -> std::convertible_to<std::size_t>;
  { env.reset() } -> std::convertible_to<StateId>;
  { env.step(a) } -> std::convertible_to<EnvStep>;
};

template <Environment Env>
TrainResult train_env(Env& env, const Hyperparams& hp, std::size_t max_steps_per_episode = 10000) {
  QLearner learner(env.state_count(), env.action_count(), hp);
  TrainResult result;
  for (std::size_t ep = 0; ep < hp.episodes; ++ep) {
    RewardPoint point;
    point.episode = ep;
    point.epsilon = epsilon_schedule(ep, hp);
    StateId s = env.reset();
    std::size_t steps = 0;
    for (; steps < max_steps_per_episode; ++steps) {
      std::size_t a = learner.act(s, point.epsilon);
      EnvStep out = env.step(a);
      bool last = out.terminal || steps + 1 == max_steps_per_episode;
      learner.learn({s, a, out.reward, out.next, last});
      point.total_reward += out.reward;
      ++point.decisions;
      s = out.next;
      if (out.terminal) break;
    }
    point.truncated = steps == max_steps_per_episode;
    result.curve.push_back(point);
  }
  result.updates = learner.update_count();
  result.table = learner.table();
  return result;
}

// ---------------------------------------------------------------------------
// Training inside the cluster simulator.

namespace detail {

class LearningPolicy {
 public:
  LearningPolicy(QLearner& learner, const DiscretizationScheme& scheme, double epsilon)
      : learner_(learner), scheme_(scheme), epsilon_(epsilon) {}

  Decision decide(const ClusterState& c) {
    state_ = discretize(observe(c), scheme_);
    action_ = learner_.act(state_, epsilon_);
    return static_cast<Action>(action_);
  }

  void on_step(const StepRecord& rec) {
    learner_.learn({state_, action_, rec.reward, discretize(rec.after, scheme_), rec.terminal});
    total_reward_ += rec.reward;
    ++decisions_;
  }

  double total_reward() const { return total_reward_; }
  std::size_t decisions() const { return decisions_; }

 private:
  QLearner& learner_;
  const DiscretizationScheme& scheme_;
  double epsilon_;
  StateId state_ = 0;
  std::size_t action_ = 0;
  double total_reward_ = 0.0;
  std::size_t decisions_ = 0;
};

}  // namespace detail

// Each episode starts from an empty cluster. The reward learned from is the
// per-tick one: the decision that closes a tick gets the reward of the
// post-advance observation, the others record 0.
inline TrainResult train(std::span<const Task> workload, const SimConfig& sim, const Hyperparams& hp,
                         const DiscretizationScheme& scheme = {}) {
  validate(hp);
  validate(scheme);
  QLearner learner(scheme.state_count(), kActionCount, hp);
  SimConfig cfg = sim;
  cfg.reward = [&scheme](const Observation& o) { return reward(o, scheme); };
  TrainResult result;
  result.curve.reserve(hp.episodes);
  for (std::size_t ep = 0; ep < hp.episodes; ++ep) {
    const double eps = epsilon_schedule(ep, hp);
    detail::LearningPolicy policy(learner, scheme, eps);
    EpisodeLog log = run_episode(workload, policy, cfg, hp.seed + ep);
    result.curve.push_back({ep, eps, policy.total_reward(), policy.decisions(), log.summary.truncated});
  }
  result.updates = learner.update_count();
  result.table = learner.table();
  return result;
}

// Deterministic exploitation of a table: epsilon = 0 selection.
class QGreedyPolicy {
 public:
  QGreedyPolicy(QTable table, DiscretizationScheme scheme) : table_(std::move(table)), scheme_(std::move(scheme)) {
    validate(scheme_);
    if (table_.state_count() != scheme_.state_count() || table_.action_count() != kActionCount)
      throw ConfigError("Q table shape does not match the discretization scheme");
  }

  Action operator()(const Observation& obs) const {
    return static_cast<Action>(argmax(table_.row(discretize(obs, scheme_))));
  }

  Decision decide(const ClusterState& c) const { return (*this)(observe(c)); }

  const QTable& table() const { return table_; }

 private:
  QTable table_;
  DiscretizationScheme scheme_;
};

inline QGreedyPolicy greedy_policy(const QTable& table, const DiscretizationScheme& scheme) {
  return QGreedyPolicy(table, scheme);
}

// ---------------------------------------------------------------------------
// Persistence: state_id,action_id,q_value in ascending (state, action) order.

inline constexpr std::string_view kQTableHeader = "state_id,action_id,q_value";

inline std::string table_to_csv(const QTable& table) {
  std::string out(kQTableHeader);
  out += '\n';
  for (std::size_t s = 0; s < table.state_count(); ++s)
    for (std::size_t a = 0; a < table.action_count(); ++a)
      out += std::to_string(s) + "," + std::to_string(a) + "," + format_sig9(table.at(s, a)) + "\n";
  return out;
}

inline QTable table_from_csv(std::string_view text, const std::string& source = "<memory>") {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (lines.empty() || lines[0] != kQTableHeader) throw FormatError(source + ": missing q-table header");

  struct Row {
    std::size_t s, a;
    double q;
  };
  std::vector<Row> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto c1 = lines[i].find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : lines[i].find(',', c1 + 1);
    Row r{};
    if (c2 == std::string_view::npos || !parse_number(lines[i].substr(0, c1), r.s) ||
        !parse_number(lines[i].substr(c1 + 1, c2 - c1 - 1), r.a) || !parse_number(lines[i].substr(c2 + 1), r.q))
      throw FormatError(source + ": malformed row " + std::to_string(i));
    rows.push_back(r);
  }
  if (rows.empty()) return {};
  std::size_t actions = 0;
  while (actions < rows.size() && rows[actions].s == 0) ++actions;
  if (rows.size() % actions != 0) throw FormatError(source + ": table is not dense");
  QTable table(rows.size() / actions, actions);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].s != i / actions || rows[i].a != i % actions)
      throw FormatError(source + ": rows out of order at row " + std::to_string(i + 1));
    table.at(rows[i].s, rows[i].a) = rows[i].q;
  }
  return table;
}

inline void save_table(const QTable& table, const std::string& path) { write_file(path, table_to_csv(table)); }

inline QTable load_table(const std::string& path) { return table_from_csv(read_file(path), path); }

}  // namespace qsched
