#pragma once

// Experiment orchestration: JSON configuration, per-run metrics, the
// policy comparison, the learning-rate sweep and report files.
//
// Config schema (unknown keys are rejected at every level):
//
//   {
//     "seed": 42,                                   // agent rng seed
//     "fleet": {"machines": 8, "cpu_capacity": 4.0, "mem_capacity": 8.0},
//     "sim": {"max_attempts_per_tick": 8, "horizon": 5000},           // optional
//     "workload": {"trace": "path.csv"}  or  {"synthetic": {
//         "tasks": 200, "rate": 1.0, "duration": [1, 20],
//         "cpu": [0.5, 3.0], "mem": [0.5, 4.0], "seed": 7}},
//     "policies": ["round-robin", "priority", "dra", "q-greedy"],
//     "hyperparams": {"alpha": 0.1, "gamma": 0.95, "eps_start": 1.0,  // optional
//                     "eps_decay": 0.95, "eps_min": 0.05, "batch_size": 32,
//                     "replay_capacity": 10000, "episodes": 200},
//     "discretization": {"cpu_bins": 10, "mem_bins": 10,               // optional
//                        "queue_bounds": [0, 2, 5, 10, 20], "q_max_norm": 20},
//     "output_dir": "out"                                              // optional
//   }
//
// Trace paths are resolved relative to the config file.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsched/baselines.hpp"
#include "qsched/errors.hpp"
#include "qsched/format.hpp"
#include "qsched/qagent.hpp"
#include "qsched/sim.hpp"
#include "qsched/workload.hpp"

namespace qsched {

using json = nlohmann::json;

struct WorkloadSource {
  std::optional<std::string> trace;  // as written in the config
  std::optional<SynthParams> synthetic;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  FleetConfig fleet;
  std::size_t max_attempts_per_tick = 8;
  std::optional<Tick> horizon;
  WorkloadSource workload;
  std::vector<PolicyKind> policies{std::begin(kPolicyOrder), std::end(kPolicyOrder)};
  Hyperparams hp;  // hp.seed mirrors `seed`
  DiscretizationScheme scheme;
  std::string output_dir;
  std::string base_dir = ".";  // directory of the config file

  SimConfig sim_config() const {
    SimConfig s;
    s.fleet = fleet;
    s.max_attempts_per_tick = max_attempts_per_tick;
    s.horizon = horizon;
    return s;
  }
};

namespace detail {

// Reads one JSON object while tracking which keys were consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    if (!j_.contains(key)) return std::nullopt;
    used_.insert(key);
    const json& v = j_.at(key);
    std::string path = where_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + " must be a boolean");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(path + " must be a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path + " must be an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path + " must be a string");
    }
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

template <class T>
std::pair<T, T> read_range(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(where + " must be a [min, max] pair of numbers");
  if constexpr (std::is_integral_v<T>) {
    if (!v[0].is_number_integer() || !v[1].is_number_integer()) throw ConfigError(where + " must hold integers");
  }
  return {v[0].get<T>(), v[1].get<T>()};
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j, const std::string& base_dir = ".") {
  ExperimentConfig c;
  c.base_dir = base_dir;
  detail::ObjectReader top(j, "config");
  top.read("seed", c.seed);
  top.read("output_dir", c.output_dir);

  if (!top.has("fleet")) throw ConfigError("config.fleet is required");
  {
    detail::ObjectReader f(top.raw("fleet"), "config.fleet");
    f.read("machines", c.fleet.machine_count);
    f.read("cpu_capacity", c.fleet.cpu_capacity);
    f.read("mem_capacity", c.fleet.mem_capacity);
    f.finish();
  }
  validate(c.fleet);

  if (top.has("sim")) {
    detail::ObjectReader s(top.raw("sim"), "config.sim");
    s.read("max_attempts_per_tick", c.max_attempts_per_tick);
    if (s.has("horizon") && !s.raw("horizon").is_null()) c.horizon = s.get<Tick>("horizon");
    s.finish();
    if (c.max_attempts_per_tick < 1) throw ConfigError("config.sim.max_attempts_per_tick must be >= 1");
    if (c.horizon && *c.horizon < 0) throw ConfigError("config.sim.horizon must be >= 0");
  }

  if (!top.has("workload")) throw ConfigError("config.workload is required");
  {
    detail::ObjectReader w(top.raw("workload"), "config.workload");
    if (w.has("trace") == w.has("synthetic"))
      throw ConfigError("config.workload needs exactly one of 'trace' or 'synthetic'");
    if (w.has("trace")) {
      c.workload.trace = w.get<std::string>("trace");
    } else {
      SynthParams p;
      detail::ObjectReader s(w.raw("synthetic"), "config.workload.synthetic");
      s.read("tasks", p.task_count);
      s.read("rate", p.arrival_rate);
      s.read("seed", p.seed);
      if (s.has("duration"))
        std::tie(p.duration_min, p.duration_max) = detail::read_range<Tick>(s.raw("duration"), "duration");
      if (s.has("cpu")) std::tie(p.cpu_min, p.cpu_max) = detail::read_range<double>(s.raw("cpu"), "cpu");
      if (s.has("mem")) std::tie(p.mem_min, p.mem_max) = detail::read_range<double>(s.raw("mem"), "mem");
      s.finish();
      validate(p);
      c.workload.synthetic = p;
    }
    w.finish();
  }

  if (top.has("policies")) {
    const json& list = top.raw("policies");
    if (!list.is_array() || list.empty()) throw ConfigError("config.policies must be a non-empty array");
    c.policies.clear();
    for (const auto& v : list) {
      if (!v.is_string()) throw ConfigError("config.policies entries must be strings");
      auto kind = parse_policy_kind(v.get<std::string>());
      if (std::find(c.policies.begin(), c.policies.end(), kind) != c.policies.end())
        throw ConfigError("duplicate policy '" + v.get<std::string>() + "'");
      c.policies.push_back(kind);
    }
  }

  if (top.has("hyperparams")) {
    detail::ObjectReader h(top.raw("hyperparams"), "config.hyperparams");
    h.read("alpha", c.hp.alpha);
    h.read("gamma", c.hp.gamma);
    h.read("eps_start", c.hp.eps_start);
    h.read("eps_decay", c.hp.eps_decay);
    h.read("eps_min", c.hp.eps_min);
    h.read("batch_size", c.hp.batch_size);
    h.read("replay_capacity", c.hp.replay_capacity);
    h.read("episodes", c.hp.episodes);
    h.finish();
  }
  c.hp.seed = c.seed;
  validate(c.hp);

  if (top.has("discretization")) {
    detail::ObjectReader d(top.raw("discretization"), "config.discretization");
    d.read("cpu_bins", c.scheme.cpu_bins);
    d.read("mem_bins", c.scheme.mem_bins);
    d.read("queue_bounds", c.scheme.queue_bounds);
    d.read("q_max_norm", c.scheme.q_max_norm);
    d.finish();
  }
  validate(c.scheme);

  top.finish();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto dir = std::filesystem::path(path).parent_path();
  return config_from_json(j, dir.empty() ? "." : dir.string());
}

// Canonical echo of a config. The output directory and config location are
// not part of it, so identical experiments echo identically wherever they run.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["fleet"] = {{"machines", c.fleet.machine_count},
                {"cpu_capacity", c.fleet.cpu_capacity},
                {"mem_capacity", c.fleet.mem_capacity}};
  j["sim"] = {{"max_attempts_per_tick", c.max_attempts_per_tick},
              {"horizon", c.horizon ? json(*c.horizon) : json(nullptr)}};
  if (c.workload.trace) {
    j["workload"] = {{"trace", *c.workload.trace}};
  } else if (c.workload.synthetic) {
    const auto& p = *c.workload.synthetic;
    j["workload"] = {{"synthetic",
                      {{"tasks", p.task_count},
                       {"rate", p.arrival_rate},
                       {"duration", {p.duration_min, p.duration_max}},
                       {"cpu", {p.cpu_min, p.cpu_max}},
                       {"mem", {p.mem_min, p.mem_max}},
                       {"seed", p.seed}}}};
  }
  j["policies"] = json::array();
  for (auto k : c.policies) j["policies"].push_back(std::string(policy_name(k)));
  j["hyperparams"] = {{"alpha", c.hp.alpha},
                      {"gamma", c.hp.gamma},
                      {"eps_start", c.hp.eps_start},
                      {"eps_decay", c.hp.eps_decay},
                      {"eps_min", c.hp.eps_min},
                      {"batch_size", c.hp.batch_size},
                      {"replay_capacity", c.hp.replay_capacity},
                      {"episodes", c.hp.episodes}};
  j["discretization"] = {{"cpu_bins", c.scheme.cpu_bins},
                         {"mem_bins", c.scheme.mem_bins},
                         {"queue_bounds", c.scheme.queue_bounds},
                         {"q_max_norm", c.scheme.q_max_norm}};
  return j;
}

inline std::string config_checksum(const ExperimentConfig& c) { return hex64(fnv1a64(config_to_json(c).dump())); }

inline Workload load_workload(const ExperimentConfig& c) {
  if (c.workload.trace) {
    std::filesystem::path p(*c.workload.trace);
    if (p.is_relative()) p = std::filesystem::path(c.base_dir) / p;
    return parse_trace(p.string());
  }
  if (c.workload.synthetic) return generate_synthetic(*c.workload.synthetic);
  throw ConfigError("config has no workload source");
}

// ---------------------------------------------------------------------------
// Metrics

struct RunReport {
  std::string policy;
  std::optional<double> mean_completion_time;  // nullopt: no task completed
  Tick makespan = 0;
  double resource_utilization = 0.0;  // percent
  std::size_t tasks_completed = 0;
  std::size_t tasks_total = 0;
  bool truncated = false;
  std::uint64_t seed = 0;
  std::string workload_checksum;
  std::string config_checksum;
};

// Turnaround is finish - arrival per completed task. Utilisation integrates
// each task's allocation over [start, min(finish, end)) and averages the cpu
// and memory fractions over the episode's ticks.
inline RunReport compute_metrics(const EpisodeLog& log, const FleetConfig& fleet) {
  RunReport r;
  r.truncated = log.summary.truncated;
  r.seed = log.seed;
  r.tasks_total = log.tasks.size();
  const Tick end = log.summary.end_clock;

  double turnaround = 0.0;
  double cpu_area = 0.0, mem_area = 0.0;
  Tick last_finish = 0;
  for (const auto& t : log.tasks) {
    if (t.finish) {
      ++r.tasks_completed;
      turnaround += static_cast<double>(*t.finish - t.arrival);
      last_finish = std::max(last_finish, *t.finish);
    }
    if (t.start) {
      Tick stop = std::min(t.finish.value_or(end), end);
      Tick span = std::max<Tick>(0, stop - *t.start);
      cpu_area += t.cpu * static_cast<double>(span);
      mem_area += t.mem * static_cast<double>(span);
    }
  }
  if (r.tasks_completed > 0) r.mean_completion_time = turnaround / static_cast<double>(r.tasks_completed);
  r.makespan = r.truncated ? end : last_finish;
  if (end > 0) {
    const double ticks = static_cast<double>(end);
    const double n = static_cast<double>(fleet.machine_count);
    double cpu = cpu_area / (ticks * n * fleet.cpu_capacity);
    double mem = mem_area / (ticks * n * fleet.mem_capacity);
    r.resource_utilization = std::clamp((cpu + mem) / 2.0 * 100.0, 0.0, 100.0);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Experiments

struct ComparisonTable {
  std::vector<RunReport> rows;       // fixed policy order
  std::vector<std::string> ranking;  // best mean completion time first
  std::string workload_checksum;
  FleetConfig fleet;
};

struct SweepRow {
  double alpha = 0.0;
  RunReport report;
};

struct ExperimentResults {
  ExperimentConfig config;
  std::string config_checksum;
  std::string workload_checksum;
  std::optional<ComparisonTable> comparison;
  std::optional<std::vector<SweepRow>> sweep;
  std::optional<TrainResult> training;
  std::string q_table_checksum;  // set with `training`; the table itself is not reported
};

inline RunReport evaluate(PolicyKind kind, const Workload& w, const ExperimentConfig& c, const QTable* table) {
  AnyPolicy policy = make_policy(kind, table, c.scheme);
  SimConfig sim = c.sim_config();
  const auto& scheme = c.scheme;
  sim.reward = [&scheme](const Observation& o) { return reward(o, scheme); };
  EpisodeLog log = run_episode(w.view(), policy, sim, c.seed);
  RunReport r = compute_metrics(log, c.fleet);
  r.policy = std::string(policy_name(kind));
  r.workload_checksum = hex64(w.checksum);
  r.config_checksum = config_checksum(c);
  return r;
}

inline std::vector<std::string> rank_by_completion(const std::vector<RunReport>& rows) {
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = rows[a].mean_completion_time;
    const auto& y = rows[b].mean_completion_time;
    if (x && y) return *x < *y;
    return x.has_value() && !y.has_value();
  });
  std::vector<std::string> names;
  for (auto i : order) names.push_back(rows[i].policy);
  return names;
}

// Trains the agent when q-greedy is requested, then runs every policy on the
// same workload and fleet. Evaluation of the agent is greedy (epsilon = 0).
inline ExperimentResults compare(const ExperimentConfig& c) {
  ExperimentResults res;
  res.config = c;
  res.config_checksum = config_checksum(c);
  Workload w = load_workload(c);
  res.workload_checksum = hex64(w.checksum);

  const bool wants_agent = std::find(c.policies.begin(), c.policies.end(), PolicyKind::QGreedy) != c.policies.end();
  if (wants_agent) {
    res.training = train(w.view(), c.sim_config(), c.hp, c.scheme);
    res.q_table_checksum = hex64(fnv1a64(table_to_csv(res.training->table)));
  }

  ComparisonTable table;
  table.workload_checksum = res.workload_checksum;
  table.fleet = c.fleet;
  for (auto kind : kPolicyOrder) {
    if (std::find(c.policies.begin(), c.policies.end(), kind) == c.policies.end()) continue;
    try {
      table.rows.push_back(evaluate(kind, w, c, res.training ? &res.training->table : nullptr));
    } catch (const std::exception& e) {
      throw std::runtime_error("policy " + std::string(policy_name(kind)) + " failed: " + e.what());
    }
  }
  table.ranking = rank_by_completion(table.rows);
  res.comparison = std::move(table);
  return res;
}

inline ExperimentResults train_experiment(const ExperimentConfig& c) {
  ExperimentResults res;
  res.config = c;
  res.config_checksum = config_checksum(c);
  Workload w = load_workload(c);
  res.workload_checksum = hex64(w.checksum);
  res.training = train(w.view(), c.sim_config(), c.hp, c.scheme);
  res.q_table_checksum = hex64(fnv1a64(table_to_csv(res.training->table)));
  return res;
}

// One trained agent per alpha with everything else, seeds included, held
// fixed. Rows run concurrently and are merged in list order.
inline ExperimentResults sweep_alpha(const ExperimentConfig& c, const std::vector<double>& alphas) {
  if (alphas.empty()) throw ConfigError("alpha list is empty");
  for (double a : alphas) validate_alpha(a);

  ExperimentResults res;
  res.config = c;
  res.config_checksum = config_checksum(c);
  const Workload w = load_workload(c);
  res.workload_checksum = hex64(w.checksum);

  std::vector<std::future<SweepRow>> jobs;
  for (double a : alphas) {
    jobs.push_back(std::async(std::launch::async, [&c, &w, a] {
      ExperimentConfig row_cfg = c;
      row_cfg.hp.alpha = a;
      TrainResult trained = train(w.view(), row_cfg.sim_config(), row_cfg.hp, row_cfg.scheme);
      RunReport r = evaluate(PolicyKind::QGreedy, w, row_cfg, &trained.table);
      return SweepRow{a, r};
    }));
  }
  res.sweep.emplace();
  for (auto& job : jobs) res.sweep->push_back(job.get());
  return res;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string opt_sig9(const std::optional<double>& v) { return v ? format_sig9(*v) : "NA"; }

inline std::string comparison_to_csv(const ComparisonTable& t) {
  std::string out =
      "policy,mean_completion_time,makespan,resource_utilization,tasks_completed,tasks_total,truncated,rank,seed,"
      "workload_checksum,config_checksum\n";
  for (const auto& r : t.rows) {
    auto rank = std::find(t.ranking.begin(), t.ranking.end(), r.policy) - t.ranking.begin() + 1;
    out += r.policy + "," + opt_sig9(r.mean_completion_time) + "," + std::to_string(r.makespan) + "," +
           format_sig9(r.resource_utilization) + "," + std::to_string(r.tasks_completed) + "," +
           std::to_string(r.tasks_total) + "," + (r.truncated ? "1" : "0") + "," + std::to_string(rank) + "," +
           std::to_string(r.seed) + "," + r.workload_checksum + "," + r.config_checksum + "\n";
  }
  return out;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "alpha,mean_completion_time,resource_utilization\n";
  for (const auto& row : rows)
    out += format_sig9(row.alpha) + "," + opt_sig9(row.report.mean_completion_time) + "," +
           format_sig9(row.report.resource_utilization) + "\n";
  return out;
}

inline std::string reward_curve_to_csv(const std::vector<RewardPoint>& curve) {
  std::string out = "episode,epsilon,total_reward,decisions\n";
  for (const auto& p : curve)
    out += std::to_string(p.episode) + "," + format_sig9(p.epsilon) + "," + format_sig9(p.total_reward) + "," +
           std::to_string(p.decisions) + "\n";
  return out;
}

inline json num9(double v) { return round_sig9(v); }

inline json to_json(const RunReport& r) {
  return {{"policy", r.policy},
          {"mean_completion_time", r.mean_completion_time ? num9(*r.mean_completion_time) : json(nullptr)},
          {"makespan", r.makespan},
          {"resource_utilization", num9(r.resource_utilization)},
          {"tasks_completed", r.tasks_completed},
          {"tasks_total", r.tasks_total},
          {"truncated", r.truncated},
          {"seed", r.seed},
          {"workload_checksum", r.workload_checksum},
          {"config_checksum", r.config_checksum}};
}

inline RunReport run_report_from_json(const json& j) {
  RunReport r;
  r.policy = j.at("policy").get<std::string>();
  if (!j.at("mean_completion_time").is_null()) r.mean_completion_time = j.at("mean_completion_time").get<double>();
  r.makespan = j.at("makespan").get<Tick>();
  r.resource_utilization = j.at("resource_utilization").get<double>();
  r.tasks_completed = j.at("tasks_completed").get<std::size_t>();
  r.tasks_total = j.at("tasks_total").get<std::size_t>();
  r.truncated = j.at("truncated").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.workload_checksum = j.at("workload_checksum").get<std::string>();
  r.config_checksum = j.at("config_checksum").get<std::string>();
  return r;
}

inline json results_to_json(const ExperimentResults& res) {
  json j;
  j["config"] = config_to_json(res.config);
  j["config_checksum"] = res.config_checksum;
  j["workload_checksum"] = res.workload_checksum;
  if (res.comparison) {
    json rows = json::array();
    for (const auto& r : res.comparison->rows) rows.push_back(to_json(r));
    j["comparison"] = {{"rows", rows}, {"ranking", res.comparison->ranking}};
  }
  if (res.sweep) {
    json rows = json::array();
    for (const auto& row : *res.sweep) rows.push_back({{"alpha", num9(row.alpha)}, {"report", to_json(row.report)}});
    j["sweep"] = rows;
  }
  if (res.training) {
    json curve = json::array();
    for (const auto& p : res.training->curve)
      curve.push_back({{"episode", p.episode},
                       {"epsilon", num9(p.epsilon)},
                       {"total_reward", num9(p.total_reward)},
                       {"decisions", p.decisions},
                       {"truncated", p.truncated}});
    j["training"] = {{"updates", res.training->updates},
                     {"q_table_checksum", res.q_table_checksum},
                     {"reward_curve", curve}};
  }
  return j;
}

// Inverse of results_to_json. Reals come back at 9 significant digits; the
// Q table itself is not part of the report.
inline ExperimentResults results_from_json(const json& j) {
  ExperimentResults res;
  res.config = config_from_json(j.at("config"));
  res.config_checksum = j.at("config_checksum").get<std::string>();
  res.workload_checksum = j.at("workload_checksum").get<std::string>();
  if (j.contains("comparison")) {
    ComparisonTable t;
    for (const auto& r : j["comparison"]["rows"]) t.rows.push_back(run_report_from_json(r));
    t.ranking = j["comparison"]["ranking"].get<std::vector<std::string>>();
    t.workload_checksum = res.workload_checksum;
    t.fleet = res.config.fleet;
    res.comparison = std::move(t);
  }
  if (j.contains("sweep")) {
    res.sweep.emplace();
    for (const auto& row : j["sweep"])
      res.sweep->push_back({row.at("alpha").get<double>(), run_report_from_json(row.at("report"))});
  }
  if (j.contains("training")) {
    TrainResult t;
    t.updates = j["training"]["updates"].get<std::uint64_t>();
    for (const auto& p : j["training"]["reward_curve"])
      t.curve.push_back({p.at("episode").get<std::size_t>(), p.at("epsilon").get<double>(),
                         p.at("total_reward").get<double>(), p.at("decisions").get<std::size_t>(),
                         p.at("truncated").get<bool>()});
    res.training = std::move(t);
    res.q_table_checksum = j["training"]["q_table_checksum"].get<std::string>();
  }
  return res;
}

// Writes every artifact present in `res`: comparison.csv, sweep.csv,
// reward_curve.csv, q_table.csv and always report.json. Returns the paths.
inline std::vector<std::string> emit_reports(const ExperimentResults& res, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& body) {
    std::string path = (std::filesystem::path(dir) / name).string();
    write_file(path, body);
    written.push_back(path);
  };
  if (res.comparison) put("comparison.csv", comparison_to_csv(*res.comparison));
  if (res.sweep) put("sweep.csv", sweep_to_csv(*res.sweep));
  if (res.training) {
    put("reward_curve.csv", reward_curve_to_csv(res.training->curve));
    put("q_table.csv", table_to_csv(res.training->table));
  }
  put("report.json", results_to_json(res).dump(2) + "\n");
  return written;
}

}  // namespace qsched
