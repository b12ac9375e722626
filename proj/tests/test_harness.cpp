#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "qsched/qsched.hpp"
#include "support.hpp"

using namespace qsched;

namespace {

std::string data(const std::string& name) { return std::string(QSCHED_DATA_DIR) + "/" + name; }

std::string tmp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("qsched_harness_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

json small_config() {
  return json::parse(R"({
    "seed": 5,
    "fleet": {"machines": 3, "cpu_capacity": 4.0, "mem_capacity": 8.0},
    "workload": {"synthetic": {"tasks": 60, "rate": 0.8, "duration": [2, 10],
                               "cpu": [0.5, 3.0], "mem": [0.5, 4.0], "seed": 3}},
    "hyperparams": {"episodes": 20}
  })");
}

TaskRecord record(TaskId id, Tick arrival, std::optional<Tick> start, std::optional<Tick> finish, double cpu,
                  double mem) {
  return {id, arrival, start, finish, cpu, mem};
}

}  // namespace

TEST(Metrics, MeanCompletion) {
  EpisodeLog log;
  log.tasks = {record(0, 0, 0, 10, 1.0, 1.0), record(1, 5, 5, 10, 1.0, 1.0)};
  log.summary.end_clock = 10;
  auto r = compute_metrics(log, {2, 4.0, 8.0});
  ASSERT_TRUE(r.mean_completion_time);
  EXPECT_DOUBLE_EQ(*r.mean_completion_time, ((10 - 0) + (10 - 5)) / 2.0);
  EXPECT_EQ(*r.mean_completion_time, 7.5);
  EXPECT_EQ(r.makespan, 10);
  EXPECT_EQ(r.tasks_completed, 2u);
}

TEST(Metrics, UtilizationIntegratesAllocation) {
  EpisodeLog log;
  log.tasks = {record(0, 0, 0, 10, 2.0, 0.0)};
  log.summary.end_clock = 20;
  // Tick-by-tick oracle.
  double cpu_sum = 0.0;
  for (Tick t = 0; t < 20; ++t) cpu_sum += (t < 10 ? 2.0 : 0.0) / 4.0;
  double expect = (cpu_sum / 20.0 + 0.0) / 2.0 * 100.0;
  auto r = compute_metrics(log, {1, 4.0, 8.0});
  EXPECT_DOUBLE_EQ(r.resource_utilization, expect);
  EXPECT_DOUBLE_EQ(r.resource_utilization, 12.5);
}

TEST(Metrics, EmptyLogIsNoData) {
  auto r = compute_metrics(EpisodeLog{}, {1, 4.0, 8.0});
  EXPECT_FALSE(r.mean_completion_time);
  EXPECT_EQ(r.resource_utilization, 0.0);
}

TEST(Metrics, TruncatedCountsOnlyCompleted) {
  EpisodeLog log;
  log.tasks = {record(0, 0, 0, 4, 1.0, 1.0), record(1, 0, 2, std::nullopt, 1.0, 1.0),
               record(2, 1, std::nullopt, std::nullopt, 1.0, 1.0)};
  log.summary.end_clock = 6;
  log.summary.truncated = true;
  auto r = compute_metrics(log, {1, 4.0, 8.0});
  EXPECT_EQ(*r.mean_completion_time, 4.0);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.makespan, 6);
  double cpu = (4.0 + 4.0) / (6.0 * 4.0), mem = (4.0 + 4.0) / (6.0 * 8.0);
  EXPECT_DOUBLE_EQ(r.resource_utilization, (cpu + mem) / 2.0 * 100.0);
}

TEST(Metrics, UtilizationBoundedUnderFuzz) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto w = generate_synthetic(qtest::random_params(seed));
    SimConfig sim;
    sim.fleet = qtest::random_fleet(seed);
    for (auto kind : {PolicyKind::RoundRobin, PolicyKind::Priority, PolicyKind::Dra}) {
      auto p = make_policy(kind);
      auto r = compute_metrics(run_episode(w.view(), p, sim, 0), sim.fleet);
      EXPECT_GE(r.resource_utilization, 0.0);
      EXPECT_LE(r.resource_utilization, 100.0);
    }
  }
}

TEST(Config, Defaults) {
  auto c = config_from_json(small_config());
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.hp.seed, 5u);
  EXPECT_EQ(c.hp.episodes, 20u);
  EXPECT_EQ(c.hp.alpha, 0.1);
  EXPECT_EQ(c.policies.size(), 4u);
  EXPECT_EQ(c.scheme, DiscretizationScheme{});
}

TEST(Config, RejectsUnknownAndInvalid) {
  auto bad = small_config();
  bad["colour"] = 1;
  EXPECT_THROW(config_from_json(bad), ConfigError);
  bad = small_config();
  bad["fleet"]["gpus"] = 2;
  EXPECT_THROW(config_from_json(bad), ConfigError);
  bad = small_config();
  bad["hyperparams"]["alpha"] = 0.0;
  EXPECT_THROW(config_from_json(bad), ConfigError);
  bad = small_config();
  bad["fleet"]["machines"] = 0;
  EXPECT_THROW(config_from_json(bad), ConfigError);
  bad = small_config();
  bad["fleet"]["machines"] = "eight";
  EXPECT_THROW(config_from_json(bad), ConfigError);
  bad = small_config();
  bad.erase("fleet");
  EXPECT_THROW(config_from_json(bad), ConfigError);
  bad = small_config();
  bad["policies"] = {"fifo"};
  EXPECT_THROW(config_from_json(bad), ConfigError);
  bad = small_config();
  bad["workload"]["trace"] = "x.csv";
  EXPECT_THROW(config_from_json(bad), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/qsched.json"), IoError);
}

TEST(Config, EchoRoundTrips) {
  auto c = config_from_json(small_config());
  auto again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
  EXPECT_EQ(config_checksum(again), config_checksum(c));
}

TEST(Config, TracePathIsRelativeToConfig) {
  auto c = load_config(data("benchmark_trace.json"));
  auto w = load_workload(c);
  EXPECT_EQ(w.checksum, load_workload(load_config(data("benchmark.json"))).checksum);
}

TEST(Compare, SingleRowAndSharedWorkload) {
  auto j = small_config();
  j["policies"] = {"dra"};
  auto res = compare(config_from_json(j));
  ASSERT_EQ(res.comparison->rows.size(), 1u);
  EXPECT_FALSE(res.training);

  auto all = compare(config_from_json(small_config()));
  ASSERT_EQ(all.comparison->rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(all.comparison->rows[i].policy, policy_name(kPolicyOrder[i]));
    EXPECT_EQ(all.comparison->rows[i].workload_checksum, all.workload_checksum);
  }
  EXPECT_EQ(all.comparison->rows[2].mean_completion_time, res.comparison->rows[0].mean_completion_time);
}

TEST(Compare, ReportFilesAreDeterministic) {
  auto c = config_from_json(small_config());
  auto a = tmp_dir("det_a"), b = tmp_dir("det_b");
  emit_reports(compare(c), a);
  emit_reports(compare(c), b);
  for (const char* f : {"comparison.csv", "reward_curve.csv", "q_table.csv", "report.json"})
    EXPECT_EQ(read_file(a + "/" + f), read_file(b + "/" + f)) << f;
  auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  EXPECT_EQ(lines(read_file(a + "/reward_curve.csv")), 1 + 20);
}

TEST(Compare, BenchmarkAgentBeatsRoundRobin) {
  auto res = compare(load_config(data("benchmark.json")));
  const auto& rows = res.comparison->rows;
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_LT(*rows[3].mean_completion_time, *rows[0].mean_completion_time);
}

TEST(Compare, TraceAndSyntheticBenchmarksAgree) {
  auto a = compare(load_config(data("benchmark.json")));
  auto b = compare(load_config(data("benchmark_trace.json")));
  for (std::size_t i = 0; i < a.comparison->rows.size(); ++i) {
    EXPECT_EQ(a.comparison->rows[i].mean_completion_time, b.comparison->rows[i].mean_completion_time);
    EXPECT_EQ(a.comparison->rows[i].resource_utilization, b.comparison->rows[i].resource_utilization);
  }
}

TEST(Sweep, DuplicatesAndConsistencyWithCompare) {
  auto c = config_from_json(small_config());
  auto res = sweep_alpha(c, {0.3, 0.05, 0.3});
  ASSERT_EQ(res.sweep->size(), 3u);
  EXPECT_EQ((*res.sweep)[0].alpha, 0.3);
  EXPECT_EQ((*res.sweep)[0].report.mean_completion_time, (*res.sweep)[2].report.mean_completion_time);
  EXPECT_EQ((*res.sweep)[0].report.resource_utilization, (*res.sweep)[2].report.resource_utilization);

  auto j = small_config();
  j["hyperparams"]["alpha"] = 0.05;
  auto direct = compare(config_from_json(j));
  const auto& q = direct.comparison->rows[3];
  EXPECT_EQ((*res.sweep)[1].report.mean_completion_time, q.mean_completion_time);
  EXPECT_EQ((*res.sweep)[1].report.resource_utilization, q.resource_utilization);
}

TEST(Sweep, RejectsBadAlphaUpFront) {
  auto c = config_from_json(small_config());
  EXPECT_THROW(sweep_alpha(c, {}), ConfigError);
  EXPECT_THROW(sweep_alpha(c, {0.1, 0.0}), ConfigError);
  EXPECT_THROW(sweep_alpha(c, {1.5}), ConfigError);
}

TEST(Reports, JsonRoundTrip) {
  auto c = config_from_json(small_config());
  auto res = compare(c);
  res.sweep = sweep_alpha(c, {0.2}).sweep;
  auto dir = tmp_dir("json");
  emit_reports(res, dir);
  auto back = results_from_json(json::parse(read_file(dir + "/report.json")));
  EXPECT_EQ(results_to_json(back), results_to_json(res));
  EXPECT_EQ(back.config_checksum, res.config_checksum);
  ASSERT_EQ(back.comparison->rows.size(), res.comparison->rows.size());
  for (std::size_t i = 0; i < res.comparison->rows.size(); ++i) {
    const auto& x = res.comparison->rows[i];
    const auto& y = back.comparison->rows[i];
    EXPECT_EQ(y.policy, x.policy);
    EXPECT_EQ(*y.mean_completion_time, round_sig9(*x.mean_completion_time));
    EXPECT_EQ(y.resource_utilization, round_sig9(x.resource_utilization));
    EXPECT_EQ(y.makespan, x.makespan);
  }
  ASSERT_EQ(back.training->curve.size(), res.training->curve.size());
  EXPECT_EQ(back.training->updates, res.training->updates);
  EXPECT_EQ(back.comparison->ranking, res.comparison->ranking);
}

TEST(Reports, CsvShapes) {
  auto c = config_from_json(small_config());
  auto res = compare(c);
  auto csv = comparison_to_csv(*res.comparison);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "policy,mean_completion_time,makespan,resource_utilization,tasks_completed,tasks_total,truncated,rank,seed,"
            "workload_checksum,config_checksum");
  EXPECT_EQ(reward_curve_to_csv({}), "episode,epsilon,total_reward,decisions\n");
  RunReport none;
  EXPECT_EQ(sweep_to_csv({{0.5, none}}), "alpha,mean_completion_time,resource_utilization\n0.5,NA,0\n");
}

TEST(Reports, RankingOrdersByCompletion) {
  std::vector<RunReport> rows(3);
  rows[0].policy = "a";
  rows[0].mean_completion_time = 9.0;
  rows[1].policy = "b";
  rows[2].policy = "c";
  rows[2].mean_completion_time = 3.0;
  EXPECT_EQ(rank_by_completion(rows), (std::vector<std::string>{"c", "a", "b"}));
}
