#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "qsched/qsched.hpp"

namespace qtest {

// Random but valid synthetic parameters; the spread is wide enough to produce
// both idle and heavily congested fleets.
inline qsched::SynthParams random_params(std::uint64_t seed, std::size_t max_tasks = 60) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  qsched::SynthParams p;
  p.task_count = 1 + g() % max_tasks;
  p.arrival_rate = 0.2 + 2.8 * u(g);
  p.duration_min = 1 + static_cast<qsched::Tick>(g() % 5);
  p.duration_max = p.duration_min + static_cast<qsched::Tick>(g() % 20);
  p.cpu_min = 0.05 + 1.5 * u(g);
  p.cpu_max = p.cpu_min + 2.5 * u(g);
  p.mem_min = 0.05 + 2.0 * u(g);
  p.mem_max = p.mem_min + 6.0 * u(g);
  p.seed = g();
  return p;
}

inline qsched::FleetConfig random_fleet(std::uint64_t seed) {
  std::mt19937_64 g(seed ^ 0xf1ee7ULL);
  return {1 + g() % 6, 4.0, 8.0};
}

// Observer for run_episode that records every capacity or conservation breach.
struct InvariantChecker {
  std::vector<std::string> violations;
  qsched::Tick last_clock = 0;

  void operator()(const qsched::ClusterState& c, std::size_t arrived) {
    if (c.clock < last_clock) violations.push_back("clock went backwards at " + std::to_string(c.clock));
    last_clock = c.clock;
    for (const auto& m : c.machines) {
      double cpu = 0.0, mem = 0.0;
      for (const auto& r : m.running) {
        cpu += r.cpu;
        mem += r.mem;
      }
      if (cpu > m.cpu_capacity + 1e-9 || mem > m.mem_capacity + 1e-9)
        violations.push_back("capacity exceeded on machine " + std::to_string(m.id) + " at " + std::to_string(c.clock));
    }
    if (arrived != c.queue.size() + c.running_count() + c.completed.size())
      violations.push_back("conservation broken at " + std::to_string(c.clock));
  }
};

// Exhaustive best fit, independent of the library: leftovers are compared at
// micro-unit resolution so accumulated rounding cannot split real ties.
inline std::optional<std::size_t> exhaustive_best_fit(const qsched::ClusterState& c, const qsched::Task& t) {
  std::optional<std::tuple<long long, long long, std::size_t>> best;
  for (const auto& m : c.machines) {
    double cpu_left = m.cpu_capacity - m.cpu_allocated - t.cpu_req;
    double mem_left = m.mem_capacity - m.mem_allocated - t.mem_req;
    if (cpu_left < -1e-9 || mem_left < -1e-9) continue;
    std::tuple<long long, long long, std::size_t> key{std::llround(cpu_left * 1e6), std::llround(mem_left * 1e6), m.id};
    if (!best || key < *best) best = key;
  }
  if (!best) return std::nullopt;
  return std::get<2>(*best);
}

}  // namespace qtest
