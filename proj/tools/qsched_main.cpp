// qsched command line.
//
// Exit codes: 0 success, 1 validation or configuration error, 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsched/qsched.hpp"

namespace {

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!qsched::parse_number(item, v)) throw qsched::ConfigError("bad alpha value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_comparison(const qsched::ComparisonTable& t) {
  std::printf("%-12s %22s %10s %16s %10s\n", "policy", "mean completion (s)", "makespan", "utilization (%)", "done");
  for (const auto& r : t.rows)
    std::printf("%-12s %22s %10lld %16.2f %6zu/%zu%s\n", r.policy.c_str(), qsched::opt_sig9(r.mean_completion_time).c_str(),
                static_cast<long long>(r.makespan), r.resource_utilization, r.tasks_completed, r.tasks_total,
                r.truncated ? " (truncated)" : "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-learning cluster scheduling simulator"};
  app.require_subcommand(1);

  qsched::SynthParams synth;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-workload", "Generate a synthetic trace CSV");
  gen->add_option("--out", gen_out, "Output trace path")->required();
  gen->add_option("--tasks", synth.task_count, "Number of tasks");
  gen->add_option("--rate", synth.arrival_rate, "Mean arrivals per tick");
  gen->add_option("--seed", synth.seed, "Generator seed");
  gen->add_option("--duration-min", synth.duration_min);
  gen->add_option("--duration-max", synth.duration_max);
  gen->add_option("--cpu-min", synth.cpu_min);
  gen->add_option("--cpu-max", synth.cpu_max);
  gen->add_option("--mem-min", synth.mem_min);
  gen->add_option("--mem-max", synth.mem_max);

  std::string config_path, out_dir, alphas_text;
  auto* train_cmd = app.add_subcommand("train", "Train the Q agent; writes q_table.csv, reward_curve.csv, report.json");
  train_cmd->add_option("--config", config_path)->required();
  train_cmd->add_option("--out-dir", out_dir);

  auto* compare_cmd = app.add_subcommand("compare", "Train, then compare all configured policies");
  compare_cmd->add_option("--config", config_path)->required();
  compare_cmd->add_option("--out-dir", out_dir);

  auto* sweep_cmd = app.add_subcommand("sweep", "Learning-rate sweep");
  sweep_cmd->add_option("--config", config_path)->required();
  sweep_cmd->add_option("--alphas", alphas_text, "Comma-separated learning rates")->required();
  sweep_cmd->add_option("--out-dir", out_dir);

  std::string trace_path;
  auto* validate_cmd = app.add_subcommand("validate-trace", "Check a trace CSV");
  validate_cmd->add_option("path", trace_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto resolve_out = [&](const qsched::ExperimentConfig& c) {
      if (!out_dir.empty()) return out_dir;
      if (!c.output_dir.empty()) return c.output_dir;
      throw qsched::ConfigError("no output directory: pass --out-dir or set output_dir");
    };

    if (*gen) {
      auto w = qsched::generate_synthetic(synth);
      qsched::write_trace(w, gen_out);
      std::printf("wrote %zu tasks to %s (checksum %s)\n", w.tasks.size(), gen_out.c_str(),
                  qsched::hex64(w.checksum).c_str());
    } else if (*validate_cmd) {
      auto w = qsched::parse_trace(trace_path);
      std::printf("ok: %zu tasks, checksum %s\n", w.tasks.size(), qsched::hex64(w.checksum).c_str());
    } else if (*train_cmd) {
      auto cfg = qsched::load_config(config_path);
      auto res = qsched::train_experiment(cfg);
      auto dir = resolve_out(cfg);
      qsched::emit_reports(res, dir);
      const auto& curve = res.training->curve;
      if (!curve.empty())
        std::printf("trained %zu episodes, %llu updates; last episode reward %s\n", curve.size(),
                    static_cast<unsigned long long>(res.training->updates),
                    qsched::format_sig9(curve.back().total_reward).c_str());
      std::printf("reports in %s\n", dir.c_str());
    } else if (*compare_cmd) {
      auto cfg = qsched::load_config(config_path);
      auto dir = resolve_out(cfg);
      auto res = qsched::compare(cfg);
      qsched::emit_reports(res, dir);
      print_comparison(*res.comparison);
      std::printf("reports in %s\n", dir.c_str());
    } else if (*sweep_cmd) {
      auto alphas = parse_alpha_list(alphas_text);
      auto cfg = qsched::load_config(config_path);
      auto dir = resolve_out(cfg);
      auto res = qsched::sweep_alpha(cfg, alphas);
      qsched::emit_reports(res, dir);
      std::printf("%-10s %22s %16s\n", "alpha", "mean completion (s)", "utilization (%)");
      for (const auto& row : *res.sweep)
        std::printf("%-10s %22s %16.2f\n", qsched::format_sig9(row.alpha).c_str(),
                    qsched::opt_sig9(row.report.mean_completion_time).c_str(), row.report.resource_utilization);
      std::printf("reports in %s\n", dir.c_str());
    }
  } catch (const qsched::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qsched::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const qsched::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
