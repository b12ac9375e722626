#pragma once

// Discrete-time cluster simulator. One tick is one second. Within a tick the
// policy is consulted repeatedly (up to a cap) until it defers, a placement
// turns out infeasible, or the queue drains; then the clock advances, finished
// tasks release their resources and new arrivals join the queue.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "qsched/errors.hpp"
#include "qsched/format.hpp"

namespace qsched {

using Tick = std::int64_t;
using TaskId = std::uint64_t;

inline constexpr int kMinPriority = 0;
inline constexpr int kMaxPriority = 4;

// Slack for floating-point accumulation in capacity checks.
inline constexpr double kCapacityEps = 1e-9;

struct Task {
  TaskId id = 0;
  Tick arrival_time = 0;
  Tick duration = 1;
  double cpu_req = 1.0;
  double mem_req = 1.0;
  int priority = 0;  // higher is more urgent

  friend bool operator==(const Task&, const Task&) = default;
};

// Empty string when valid, otherwise the first violated rule.
inline std::string task_violation(const Task& t) {
  if (t.arrival_time < 0) return "arrival_time must be >= 0";
  if (t.duration < 1) return "duration must be >= 1";
  if (!(t.cpu_req > 0.0) || !std::isfinite(t.cpu_req)) return "cpu_request must be a positive number";
  if (!(t.mem_req > 0.0) || !std::isfinite(t.mem_req)) return "mem_request must be a positive number";
  if (t.priority < kMinPriority || t.priority > kMaxPriority) return "priority must be in [0, 4]";
  return {};
}

struct RunningTask {
  TaskId id = 0;
  Tick arrival = 0;
  Tick start = 0;
  Tick finish = 0;
  double cpu = 0.0;
  double mem = 0.0;
};

struct Machine {
  std::size_t id = 0;
  double cpu_capacity = 0.0;
  double mem_capacity = 0.0;
  double cpu_allocated = 0.0;
  double mem_allocated = 0.0;
  std::vector<RunningTask> running;

  double free_cpu() const { return cpu_capacity - cpu_allocated; }
  double free_mem() const { return mem_capacity - mem_allocated; }
  bool fits(const Task& t) const {
    return cpu_allocated + t.cpu_req <= cpu_capacity + kCapacityEps &&
           mem_allocated + t.mem_req <= mem_capacity + kCapacityEps;
  }
};

struct CompletedTask {
  TaskId id = 0;
  Tick arrival = 0;
  Tick start = 0;
  Tick finish = 0;
};

struct ClusterState {
  std::vector<Machine> machines;
  std::vector<Task> queue;  // pending, front is the head
  Tick clock = 0;
  std::vector<CompletedTask> completed;

  std::size_t running_count() const {
    std::size_t n = 0;
    for (const auto& m : machines) n += m.running.size();
    return n;
  }
  double total_cpu_capacity() const {
    double s = 0.0;
    for (const auto& m : machines) s += m.cpu_capacity;
    return s;
  }
  double total_mem_capacity() const {
    double s = 0.0;
    for (const auto& m : machines) s += m.mem_capacity;
    return s;
  }
};

struct FleetConfig {
  std::size_t machine_count = 8;
  double cpu_capacity = 4.0;
  double mem_capacity = 8.0;

  friend bool operator==(const FleetConfig&, const FleetConfig&) = default;
};

inline void validate(const FleetConfig& fleet) {
  if (fleet.machine_count < 1) throw ConfigError("fleet needs at least one machine");
  if (!(fleet.cpu_capacity > 0.0) || !std::isfinite(fleet.cpu_capacity))
    throw ConfigError("cpu_capacity must be positive");
  if (!(fleet.mem_capacity > 0.0) || !std::isfinite(fleet.mem_capacity))
    throw ConfigError("mem_capacity must be positive");
}

inline ClusterState init_cluster(const FleetConfig& fleet) {
  validate(fleet);
  ClusterState c;
  c.machines.reserve(fleet.machine_count);
  for (std::size_t i = 0; i < fleet.machine_count; ++i) {
    Machine m;
    m.id = i;
    m.cpu_capacity = fleet.cpu_capacity;
    m.mem_capacity = fleet.mem_capacity;
    c.machines.push_back(std::move(m));
  }
  return c;
}

inline ClusterState init_cluster(std::size_t machine_count, double cpu_capacity, double mem_capacity) {
  return init_cluster(FleetConfig{machine_count, cpu_capacity, mem_capacity});
}

struct Observation {
  double cpu_util = 0.0;
  double mem_util = 0.0;
  std::size_t queue_len = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline Observation observe(const ClusterState& c) {
  double cpu_alloc = 0.0, mem_alloc = 0.0, cpu_cap = 0.0, mem_cap = 0.0;
  for (const auto& m : c.machines) {
    cpu_alloc += m.cpu_allocated;
    mem_alloc += m.mem_allocated;
    cpu_cap += m.cpu_capacity;
    mem_cap += m.mem_capacity;
  }
  Observation o;
  o.cpu_util = cpu_cap > 0.0 ? std::clamp(cpu_alloc / cpu_cap, 0.0, 1.0) : 0.0;
  o.mem_util = mem_cap > 0.0 ? std::clamp(mem_alloc / mem_cap, 0.0, 1.0) : 0.0;
  o.queue_len = c.queue.size();
  return o;
}

// The agent's action set.
enum class Action : std::uint8_t {
  PackBestFit = 0,        // head of queue onto the feasible machine with least leftover cpu
  SpreadLeastLoaded = 1,  // head of queue onto the feasible machine with most free cpu
  Defer = 2,              // place nothing
  PromoteUrgent = 3,      // highest-priority queued task first, then best fit
};

inline constexpr std::size_t kActionCount = 4;

inline const char* action_name(Action a) {
  switch (a) {
    case Action::PackBestFit: return "pack";
    case Action::SpreadLeastLoaded: return "spread";
    case Action::Defer: return "defer";
    case Action::PromoteUrgent: return "promote";
  }
  return "?";
}

// Explicit directive from a rule-based policy: queue position onto machine.
struct Placement {
  std::size_t queue_index = 0;
  std::size_t machine = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

using Decision = std::variant<Action, Placement>;

enum class OutcomeKind : std::uint8_t { Placed, Deferred, Infeasible };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Deferred;
  std::size_t machine = 0;  // valid when Placed
  TaskId task = 0;          // valid when Placed

  static Outcome placed(std::size_t machine, TaskId task) { return {OutcomeKind::Placed, machine, task}; }
  static Outcome deferred() { return {OutcomeKind::Deferred, 0, 0}; }
  static Outcome infeasible() { return {OutcomeKind::Infeasible, 0, 0}; }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Feasible machine minimising leftover cpu; ties go to the lowest id.
inline std::optional<std::size_t> best_fit_machine(const ClusterState& c, const Task& t) {
  std::optional<std::size_t> best;
  double best_left = 0.0;
  for (const auto& m : c.machines) {
    if (!m.fits(t)) continue;
    double left = m.free_cpu() - t.cpu_req;
    if (!best || left < best_left - kCapacityEps) {
      best = m.id;
      best_left = left;
    }
  }
  return best;
}

// Feasible machine with the most free cpu; ties go to the lowest id.
inline std::optional<std::size_t> least_loaded_machine(const ClusterState& c, const Task& t) {
  std::optional<std::size_t> best;
  double best_free = 0.0;
  for (const auto& m : c.machines) {
    if (!m.fits(t)) continue;
    if (!best || m.free_cpu() > best_free + kCapacityEps) {
      best = m.id;
      best_free = m.free_cpu();
    }
  }
  return best;
}

// Highest priority, then earliest arrival, then lowest id.
inline std::optional<std::size_t> most_urgent_index(const std::vector<Task>& queue) {
  if (queue.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < queue.size(); ++i) {
    const Task& a = queue[i];
    const Task& b = queue[best];
    if (a.priority != b.priority ? a.priority > b.priority
        : a.arrival_time != b.arrival_time ? a.arrival_time < b.arrival_time
                                           : a.id < b.id)
      best = i;
  }
  return best;
}

namespace detail {

inline Outcome place(ClusterState& c, std::size_t queue_index, std::size_t machine) {
  Task t = c.queue[queue_index];
  Machine& m = c.machines[machine];
  m.cpu_allocated += t.cpu_req;
  m.mem_allocated += t.mem_req;
  m.running.push_back({t.id, t.arrival_time, c.clock, c.clock + t.duration, t.cpu_req, t.mem_req});
  c.queue.erase(c.queue.begin() + static_cast<std::ptrdiff_t>(queue_index));
  return Outcome::placed(machine, t.id);
}

}  // namespace detail

inline Outcome apply_action(ClusterState& c, Action action) {
  if (c.queue.empty() || action == Action::Defer) return Outcome::deferred();
  std::size_t idx = 0;
  std::optional<std::size_t> target;
  switch (action) {
    case Action::PackBestFit:
      target = best_fit_machine(c, c.queue.front());
      break;
    case Action::SpreadLeastLoaded:
      target = least_loaded_machine(c, c.queue.front());
      break;
    case Action::PromoteUrgent:
      idx = *most_urgent_index(c.queue);
      target = best_fit_machine(c, c.queue[idx]);
      break;
    case Action::Defer:
      break;
  }
  // A failed promotion leaves the queue order untouched.
  if (!target) return Outcome::infeasible();
  return detail::place(c, idx, *target);
}

inline Outcome apply_placement(ClusterState& c, const Placement& p) {
  if (c.queue.empty()) return Outcome::deferred();
  if (p.queue_index >= c.queue.size() || p.machine >= c.machines.size()) return Outcome::infeasible();
  if (!c.machines[p.machine].fits(c.queue[p.queue_index])) return Outcome::infeasible();
  return detail::place(c, p.queue_index, p.machine);
}

inline Outcome apply_decision(ClusterState& c, const Decision& d) {
  if (const auto* a = std::get_if<Action>(&d)) return apply_action(c, *a);
  return apply_placement(c, std::get<Placement>(d));
}

// Enqueue workload tasks arriving exactly at `tick`, ascending id. Returns the
// number enqueued. `workload` must be sorted by arrival time.
inline std::size_t admit_arrivals(ClusterState& c, std::span<const Task> workload, Tick tick) {
  auto lo = std::lower_bound(workload.begin(), workload.end(), tick,
                             [](const Task& t, Tick v) { return t.arrival_time < v; });
  auto hi = std::upper_bound(lo, workload.end(), tick,
                             [](Tick v, const Task& t) { return v < t.arrival_time; });
  std::vector<Task> batch(lo, hi);
  std::sort(batch.begin(), batch.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
  for (auto& t : batch) c.queue.push_back(t);
  return batch.size();
}

inline void release_finished(ClusterState& c) {
  std::vector<CompletedTask> done;
  for (auto& m : c.machines) {
    auto it = std::stable_partition(m.running.begin(), m.running.end(),
                                    [&](const RunningTask& r) { return r.finish != c.clock; });
    for (auto r = it; r != m.running.end(); ++r) {
      m.cpu_allocated -= r->cpu;
      m.mem_allocated -= r->mem;
      done.push_back({r->id, r->arrival, r->start, r->finish});
    }
    m.running.erase(it, m.running.end());
    if (m.running.empty()) {
      m.cpu_allocated = 0.0;
      m.mem_allocated = 0.0;
    }
  }
  std::sort(done.begin(), done.end(), [](const CompletedTask& a, const CompletedTask& b) { return a.id < b.id; });
  c.completed.insert(c.completed.end(), done.begin(), done.end());
}

// clock += 1, then release tasks finishing now, then admit arrivals. Returns
// the number of arrivals admitted.
inline std::size_t advance_tick(ClusterState& c, std::span<const Task> workload) {
  ++c.clock;
  release_finished(c);
  return admit_arrivals(c, workload, c.clock);
}

// ---------------------------------------------------------------------------
// Episodes

struct SimConfig {
  FleetConfig fleet;
  std::size_t max_attempts_per_tick = 8;
  std::optional<Tick> horizon;  // defaults to default_horizon(workload)
  // Per-tick reward, evaluated on the observation after the decision that
  // closes a tick (post-decision, post-advance). Unset records 0.
  std::function<double(const Observation&)> reward;
};

inline Tick default_horizon(std::span<const Task> workload) {
  if (workload.empty()) return 0;
  Tick total = 0;
  for (const auto& t : workload) total += t.duration;
  return 10 * workload.back().arrival_time + total;
}

struct StepRecord {
  Tick tick = 0;
  Observation before;
  Decision decision = Action::Defer;
  Outcome outcome;
  double reward = 0.0;
  Observation after;
  bool terminal = false;
};

struct TaskRecord {
  TaskId id = 0;
  Tick arrival = 0;
  std::optional<Tick> start;
  std::optional<Tick> finish;
  double cpu = 0.0;
  double mem = 0.0;
};

struct EpisodeSummary {
  Tick end_clock = 0;
  std::size_t completed = 0;
  std::size_t running = 0;
  std::size_t queued = 0;
  bool truncated = false;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::vector<TaskRecord> tasks;  // workload order
  EpisodeSummary summary;
};

template <class P>
concept SchedulingPolicy = requires(P& p, const ClusterState& c) {
  { p.decide(c) } -> std::convertible_to<Decision>;
};

struct NoObserver {
  void operator()(const ClusterState&, std::size_t) const {}
};

// Runs `policy` over `workload` (sorted by arrival, then id). Policies may
// optionally provide begin_episode(seed) and on_step(const StepRecord&).
// `observer(cluster, arrived_count)` is called after every state change.
template <SchedulingPolicy Policy, class Observer = NoObserver>
EpisodeLog run_episode(std::span<const Task> workload, Policy& policy, const SimConfig& config,
                       std::uint64_t seed, Observer&& observer = {}) {
  if (config.max_attempts_per_tick < 1) throw ConfigError("max_attempts_per_tick must be >= 1");
  ClusterState c = init_cluster(config.fleet);
  if constexpr (requires { policy.begin_episode(seed); }) policy.begin_episode(seed);

  EpisodeLog log;
  log.seed = seed;
  log.tasks.reserve(workload.size());
  std::unordered_map<TaskId, std::size_t> index;
  for (const auto& t : workload) {
    index.emplace(t.id, log.tasks.size());
    log.tasks.push_back({t.id, t.arrival_time, std::nullopt, std::nullopt, t.cpu_req, t.mem_req});
  }

  const Tick horizon = config.horizon.value_or(default_horizon(workload));
  std::size_t arrived = admit_arrivals(c, workload, 0);
  auto all_done = [&] { return c.completed.size() == workload.size(); };
  auto step_clock = [&] {
    std::size_t before = c.completed.size();
    arrived += advance_tick(c, workload);
    for (std::size_t i = before; i < c.completed.size(); ++i)
      log.tasks[index.at(c.completed[i].id)].finish = c.completed[i].finish;
  };
  observer(std::as_const(c), arrived);

  while (!all_done() && c.clock < horizon) {
    bool advanced = false;
    for (std::size_t attempt = 0; !c.queue.empty() && attempt < config.max_attempts_per_tick; ++attempt) {
      StepRecord rec;
      rec.tick = c.clock;
      rec.before = observe(c);
      rec.decision = policy.decide(std::as_const(c));
      rec.outcome = apply_decision(c, rec.decision);
      if (rec.outcome.kind == OutcomeKind::Placed) log.tasks[index.at(rec.outcome.task)].start = c.clock;

      bool last = rec.outcome.kind != OutcomeKind::Placed || c.queue.empty() ||
                  attempt + 1 == config.max_attempts_per_tick;
      if (last) {
        step_clock();
        advanced = true;
      }
      rec.after = observe(c);
      rec.terminal = last && (all_done() || c.clock >= horizon);
      // Reward accrues per tick: only the decision that closes the tick is
      // credited; placements inside a tick take no time and earn 0.
      rec.reward = last && config.reward ? config.reward(rec.after) : 0.0;
      if constexpr (requires { policy.on_step(rec); }) policy.on_step(std::as_const(rec));
      log.steps.push_back(rec);
      observer(std::as_const(c), arrived);
      if (last) break;
    }
    if (!advanced) {
      step_clock();
      observer(std::as_const(c), arrived);
    }
  }

  log.summary.end_clock = c.clock;
  log.summary.completed = c.completed.size();
  log.summary.running = c.running_count();
  log.summary.queued = c.queue.size();
  log.summary.truncated = !all_done();
  return log;
}

inline std::string decision_text(const Decision& d) {
  if (const auto* a = std::get_if<Action>(&d)) return action_name(*a);
  const auto& p = std::get<Placement>(d);
  return "q" + std::to_string(p.queue_index) + "->m" + std::to_string(p.machine);
}

inline std::string outcome_text(const Outcome& o) {
  switch (o.kind) {
    case OutcomeKind::Placed: return "placed:" + std::to_string(o.task) + "@" + std::to_string(o.machine);
    case OutcomeKind::Deferred: return "deferred";
    case OutcomeKind::Infeasible: return "infeasible";
  }
  return "?";
}

// Canonical text form of a log, used for byte-level determinism checks.
inline std::string to_text(const EpisodeLog& log) {
  std::string out = "seed," + std::to_string(log.seed) + "\n";
  out += "tick,cpu_util,mem_util,queue_len,decision,outcome,reward\n";
  for (const auto& s : log.steps) {
    out += std::to_string(s.tick) + "," + format_sig9(s.before.cpu_util) + "," + format_sig9(s.before.mem_util) + "," +
           std::to_string(s.before.queue_len) + "," + decision_text(s.decision) + "," + outcome_text(s.outcome) + "," +
           format_sig9(s.reward) + "\n";
  }
  out += "task_id,arrival,start,finish\n";
  for (const auto& t : log.tasks) {
    out += std::to_string(t.id) + "," + std::to_string(t.arrival) + "," +
           (t.start ? std::to_string(*t.start) : "-") + "," + (t.finish ? std::to_string(*t.finish) : "-") + "\n";
  }
  out += "end_clock," + std::to_string(log.summary.end_clock) + ",completed," + std::to_string(log.summary.completed) +
         ",truncated," + (log.summary.truncated ? "1" : "0") + "\n";
  return out;
}

}  // namespace qsched
