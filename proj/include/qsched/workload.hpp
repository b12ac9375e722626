#pragma once

// Simplified cluster-trace format. One task per row:
//
//   task_id,arrival_time,duration,cpu_request,mem_request,priority
//
// Integers for ids, ticks and priority (0..4, higher is more urgent), reals for
// the two demands. A seventh `scheduler_decision` column is accepted and
// ignored. Rows are '\n'-terminated; a trailing '\r' is tolerated on input.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qsched/errors.hpp"
#include "qsched/format.hpp"
#include "qsched/rng.hpp"
#include "qsched/sim.hpp"

namespace qsched {

inline constexpr std::string_view kTraceHeader = "task_id,arrival_time,duration,cpu_request,mem_request,priority";
inline constexpr std::string_view kTraceDecisionColumn = "scheduler_decision";

struct Workload {
  std::vector<Task> tasks;  // sorted by (arrival_time, id)
  std::string source;
  std::uint64_t checksum = 0;

  std::span<const Task> view() const { return tasks; }
};

inline std::string to_csv(std::span<const Task> tasks) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& t : tasks) {
    out += std::to_string(t.id);
    out += ',';
    out += std::to_string(t.arrival_time);
    out += ',';
    out += std::to_string(t.duration);
    out += ',';
    out += format_shortest(t.cpu_req);
    out += ',';
    out += format_shortest(t.mem_req);
    out += ',';
    out += std::to_string(t.priority);
    out += '\n';
  }
  return out;
}

inline std::uint64_t workload_checksum(std::span<const Task> tasks) { return fnv1a64(to_csv(tasks)); }

// Validates every task, sorts into canonical order and stamps the checksum.
inline Workload make_workload(std::vector<Task> tasks, std::string source) {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (auto why = task_violation(tasks[i]); !why.empty())
      throw ValidationError("task " + std::to_string(tasks[i].id) + ": " + why);
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    return a.arrival_time != b.arrival_time ? a.arrival_time < b.arrival_time : a.id < b.id;
  });
  std::unordered_map<TaskId, std::size_t> seen;
  for (const auto& t : tasks) {
    if (!seen.emplace(t.id, 0).second) throw ValidationError("duplicate task id " + std::to_string(t.id));
  }
  Workload w;
  w.checksum = workload_checksum(tasks);
  w.tasks = std::move(tasks);
  w.source = std::move(source);
  return w;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace detail

// Errors name the 1-based data row (the header is not counted).
inline Workload parse_trace_text(std::string_view text, std::string source = "<memory>") {
  std::vector<std::string_view> lines = detail::split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw FormatError(source + ": empty trace, missing header");

  std::string_view header = detail::chomp(lines[0]);
  std::size_t columns = 6;
  if (header == kTraceHeader) {
    columns = 6;
  } else if (header.size() == kTraceHeader.size() + 1 + kTraceDecisionColumn.size() &&
             header.substr(0, kTraceHeader.size()) == kTraceHeader &&
             header.substr(kTraceHeader.size()) == std::string(",") + std::string(kTraceDecisionColumn)) {
    columns = 7;
  } else {
    throw FormatError(source + ": bad header, expected '" + std::string(kTraceHeader) + "'");
  }

  std::vector<Task> tasks;
  std::unordered_map<TaskId, std::size_t> first_row;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;
    auto fail = [&](const std::string& why) -> ValidationError {
      return ValidationError(source + ": row " + std::to_string(row) + ": " + why);
    };
    std::string_view line = detail::chomp(lines[li]);
    if (line.empty()) throw fail("empty row");
    auto fields = detail::split(line, ',');
    if (fields.size() != columns)
      throw fail("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()));

    Task t;
    std::int64_t id = 0;
    if (!parse_number(fields[0], id) || id < 0) throw fail("task_id must be a non-negative integer");
    t.id = static_cast<TaskId>(id);
    if (!parse_number(fields[1], t.arrival_time)) throw fail("arrival_time is not an integer");
    if (!parse_number(fields[2], t.duration)) throw fail("duration is not an integer");
    if (!parse_number(fields[3], t.cpu_req)) throw fail("cpu_request is not a number");
    if (!parse_number(fields[4], t.mem_req)) throw fail("mem_request is not a number");
    if (!parse_number(fields[5], t.priority)) throw fail("priority is not an integer");
    if (auto why = task_violation(t); !why.empty()) throw fail(why);
    auto [it, fresh] = first_row.emplace(t.id, row);
    if (!fresh) throw fail("duplicate task_id " + std::to_string(t.id) + " (first seen at row " +
                           std::to_string(it->second) + ")");
    tasks.push_back(t);
  }
  return make_workload(std::move(tasks), std::move(source));
}

inline Workload parse_trace(const std::string& path) { return parse_trace_text(read_file(path), path); }

inline void write_trace(const Workload& w, const std::string& path) { write_file(path, to_csv(w.tasks)); }

// ---------------------------------------------------------------------------
// Synthetic generator

struct SynthParams {
  std::size_t task_count = 200;
  double arrival_rate = 1.0;  // mean arrivals per tick
  Tick duration_min = 1;
  Tick duration_max = 20;
  double cpu_min = 0.5;
  double cpu_max = 3.0;
  double mem_min = 0.5;
  double mem_max = 4.0;
  std::uint64_t seed = 1;

  friend bool operator==(const SynthParams&, const SynthParams&) = default;
};

// Demands are quantised to hundredths so traces stay short and exact.
inline constexpr double kDemandScale = 100.0;
inline constexpr double kDemandStep = 1.0 / kDemandScale;

inline void validate(const SynthParams& p) {
  if (!(p.arrival_rate > 0.0) || !std::isfinite(p.arrival_rate)) throw ConfigError("arrival rate must be > 0");
  if (p.duration_min < 1 || p.duration_max < p.duration_min)
    throw ConfigError("duration range must satisfy 1 <= min <= max");
  auto check = [](double lo, double hi, const char* what) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo < kDemandStep || hi < lo)
      throw ConfigError(std::string(what) + " range must satisfy 0.01 <= min <= max");
  };
  check(p.cpu_min, p.cpu_max, "cpu");
  check(p.mem_min, p.mem_max, "mem");
}

// Per task, draws are taken in the order: inter-arrival gap, duration, cpu,
// mem, priority. Arrivals are the floor of a Poisson process's event times.
inline Workload generate_synthetic(const SynthParams& p) {
  validate(p);
  Rng rng(p.seed, Stream::Workload);
  auto demand = [&](double lo, double hi) {
    double v = lo + rng.uniform01() * (hi - lo);
    // Dividing the rounded count yields the same double a trace parse would.
    v = std::round(v * kDemandScale) / kDemandScale;
    return std::clamp(v, lo, hi);
  };
  std::vector<Task> tasks;
  tasks.reserve(p.task_count);
  double t = 0.0;
  for (std::size_t i = 0; i < p.task_count; ++i) {
    t += rng.exponential(p.arrival_rate);
    Task task;
    task.id = i;
    task.arrival_time = static_cast<Tick>(std::floor(t));
    task.duration =
        p.duration_min + static_cast<Tick>(rng.uniform_index(static_cast<std::size_t>(p.duration_max - p.duration_min + 1)));
    task.cpu_req = demand(p.cpu_min, p.cpu_max);
    task.mem_req = demand(p.mem_min, p.mem_max);
    task.priority = static_cast<int>(rng.uniform_index(kMaxPriority - kMinPriority + 1)) + kMinPriority;
    tasks.push_back(task);
  }
  return make_workload(std::move(tasks), "synthetic:seed=" + std::to_string(p.seed));
}

}  // namespace qsched
