#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "qsched/errors.hpp"
#include "qsched/qagent.hpp"
#include "qsched/sim.hpp"

namespace qsched {

// Strict FIFO. The head task goes to the machine under the cursor, or the next
// one round that can hold it; after a placement the cursor moves one past the
// chosen machine. A full cycle without a fit defers and leaves the cursor.
inline Decision round_robin_decide(const ClusterState& c, std::size_t& cursor) {
  if (c.queue.empty() || c.machines.empty()) return Action::Defer;
  const std::size_t n = c.machines.size();
  const Task& head = c.queue.front();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t m = (cursor + k) % n;
    if (c.machines[m].fits(head)) {
      cursor = (m + 1) % n;
      return Placement{0, m};
    }
  }
  return Action::Defer;
}

// Non-preemptive. The most urgent queued task (priority, then arrival, then
// id) goes to the lowest-id machine that fits; if none fits, defer.
inline Decision priority_decide(const ClusterState& c) {
  auto idx = most_urgent_index(c.queue);
  if (!idx) return Action::Defer;
  for (const auto& m : c.machines)
    if (m.fits(c.queue[*idx])) return Placement{*idx, m.id};
  return Action::Defer;
}

// Dynamic allocation instantiated as best fit: head task onto the feasible
// machine with the least cpu left over, then least memory left over, then
// lowest id.
inline std::optional<std::size_t> dra_machine(const ClusterState& c, const Task& t) {
  std::optional<std::size_t> best;
  double best_cpu = 0.0, best_mem = 0.0;
  for (const auto& m : c.machines) {
    if (!m.fits(t)) continue;
    double cpu_left = m.free_cpu() - t.cpu_req;
    double mem_left = m.free_mem() - t.mem_req;
    bool better = !best || cpu_left < best_cpu - kCapacityEps ||
                  (cpu_left <= best_cpu + kCapacityEps && mem_left < best_mem - kCapacityEps);
    if (better) {
      best = m.id;
      best_cpu = cpu_left;
      best_mem = mem_left;
    }
  }
  return best;
}

inline Decision dra_decide(const ClusterState& c) {
  if (c.queue.empty()) return Action::Defer;
  if (auto m = dra_machine(c, c.queue.front())) return Placement{0, *m};
  return Action::Defer;
}

class RoundRobinPolicy {
 public:
  void begin_episode(std::uint64_t) { cursor_ = 0; }
  Decision decide(const ClusterState& c) { return round_robin_decide(c, cursor_); }
  std::size_t cursor() const { return cursor_; }

 private:
  std::size_t cursor_ = 0;
};

class PriorityPolicy {
 public:
  Decision decide(const ClusterState& c) const { return priority_decide(c); }
};

class DraPolicy {
 public:
  Decision decide(const ClusterState& c) const { return dra_decide(c); }
};

enum class PolicyKind { RoundRobin, Priority, Dra, QGreedy };

// Rows of a comparison are always emitted in this order.
inline constexpr PolicyKind kPolicyOrder[] = {PolicyKind::RoundRobin, PolicyKind::Priority, PolicyKind::Dra,
                                              PolicyKind::QGreedy};

inline std::string_view policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::RoundRobin: return "round-robin";
    case PolicyKind::Priority: return "priority";
    case PolicyKind::Dra: return "dra";
    case PolicyKind::QGreedy: return "q-greedy";
  }
  return "?";
}

inline PolicyKind parse_policy_kind(std::string_view name) {
  for (auto k : kPolicyOrder)
    if (policy_name(k) == name) return k;
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected round-robin | priority | dra | q-greedy)");
}

// Any of the four policies behind one decision interface.
class AnyPolicy {
 public:
  explicit AnyPolicy(RoundRobinPolicy p) : impl_(p) {}
  explicit AnyPolicy(PriorityPolicy p) : impl_(p) {}
  explicit AnyPolicy(DraPolicy p) : impl_(p) {}
  explicit AnyPolicy(QGreedyPolicy p) : impl_(std::move(p)) {}

  void begin_episode(std::uint64_t seed) {
    if (auto* rr = std::get_if<RoundRobinPolicy>(&impl_)) rr->begin_episode(seed);
  }
  Decision decide(const ClusterState& c) {
    return std::visit([&](auto& p) -> Decision { return p.decide(c); }, impl_);
  }

 private:
  std::variant<RoundRobinPolicy, PriorityPolicy, DraPolicy, QGreedyPolicy> impl_;
};

// `table` is required for QGreedy and ignored otherwise.
inline AnyPolicy make_policy(PolicyKind kind, const QTable* table = nullptr, const DiscretizationScheme& scheme = {}) {
  switch (kind) {
    case PolicyKind::RoundRobin: return AnyPolicy(RoundRobinPolicy{});
    case PolicyKind::Priority: return AnyPolicy(PriorityPolicy{});
    case PolicyKind::Dra: return AnyPolicy(DraPolicy{});
    case PolicyKind::QGreedy:
      if (!table) throw ConfigError("q-greedy policy needs a trained table");
      return AnyPolicy(QGreedyPolicy(*table, scheme));
  }
  throw ConfigError("unknown policy kind");
}

}  // namespace qsched
