// Command-line harness: train / eval / baseline / report / diagnose.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metarl/config.hpp"
#include "metarl/pearl.hpp"
#include "metarl/report.hpp"

namespace fs = std::filesystem;
using namespace metarl;

namespace {

constexpr uint64_t kCliEvalSalt = 0x636c6965ULL;      // "clie"
constexpr uint64_t kCliBaselineSalt = 0x636c6962ULL;  // "clib"

struct MeanSe {
  double mean = 0.0, se = 0.0;
};

// Standard error with the n-1 estimator; a single sample reports 0.
MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return r;
  double s2 = 0.0;
  for (double x : v) s2 += (x - r.mean) * (x - r.mean);
  s2 /= static_cast<double>(v.size() - 1);
  r.se = std::sqrt(s2 / static_cast<double>(v.size()));
  return r;
}

PearlTrainer load_trained(const std::string& run_dir) {
  MetaRunConfig cfg = parse_run_line(load_run_dir(run_dir).run_line);
  cfg.out_dir = run_dir;
  PearlTrainer tr(cfg);
  tr.load_checkpoint(tr.checkpoint_path());
  return tr;
}

int cmd_train(const std::string& config_path, bool seed_set, uint64_t seed,
              const std::string& out, bool resume, int threads) {
  MetaRunConfig cfg = load_run_config(config_path);
  if (seed_set) cfg.master_seed = seed;
  if (!out.empty()) cfg.out_dir = out;
  if (threads > 0) cfg.collect_threads = threads;
  PearlTrainer tr(cfg);
  tr.run(resume);
  std::printf("done: %s env_steps=%ld iterations=%d\n", tr.cfg().out_dir.c_str(), tr.env_steps(),
              tr.iteration());
  return 0;
}

int cmd_eval(const std::string& run_dir, const std::string& out, uint64_t seed) {
  PearlTrainer tr = load_trained(run_dir);
  const std::string out_dir = out.empty() ? run_dir : out;
  fs::create_directories(out_dir);

  std::vector<double> adapted, exploration;
  std::ofstream csv(out_dir + "/eval.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("eval: cannot open " + out_dir + "/eval.csv");
  csv << "# metarl eval v1\n# run: " << tr.run_line() << "\n";
  csv << "task_seed,exploration_return,adapted_return";
  for (int d = 0; d < tr.cfg().sac.latent_dim; ++d) csv << ",z" << d + 1;
  csv << "\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const TaskSpec& task : tr.test_tasks()) {
    AdaptationResult r = tr.meta_test(task, mix_seed(seed, kCliEvalSalt, task.seed));
    adapted.push_back(r.adapted_return);
    exploration.push_back(r.exploration_return);
    csv << task.seed << "," << fmt(r.exploration_return) << "," << fmt(r.adapted_return);
    for (double z : r.z_hat) csv << "," << fmt(z);
    csv << "\n";
  }
  const MeanSe a = mean_se(adapted), e = mean_se(exploration);
  std::printf("adapted return:     %.4f +- %.4f (standard error, n=%zu test tasks)\n", a.mean,
              a.se, adapted.size());
  std::printf("exploration return: %.4f +- %.4f\n", e.mean, e.se);
  std::printf("per-task results: %s/eval.csv\n", out_dir.c_str());
  return 0;
}

int cmd_baseline(const std::string& config_path, bool seed_set, uint64_t seed,
                 const std::string& out) {
  MetaRunConfig cfg = load_run_config(config_path);
  if (seed_set) cfg.master_seed = seed;
  if (!out.empty()) cfg.out_dir = out;
  PearlTrainer tr(cfg);
  fs::create_directories(tr.cfg().out_dir);

  std::vector<double> returns;
  std::ofstream csv(tr.cfg().out_dir + "/baseline.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("baseline: cannot open " + tr.cfg().out_dir +
                                     "/baseline.csv");
  csv << "# metarl sac200 baseline v1\n# run: " << tr.run_line() << "\n";
  csv << "task_seed,final_return\n";
  char buf[64];
  for (const TaskSpec& task : tr.test_tasks()) {
    const double ret =
        tr.run_sac200_baseline(task, mix_seed(tr.cfg().master_seed, kCliBaselineSalt, task.seed));
    returns.push_back(ret);
    std::snprintf(buf, sizeof(buf), "%.17g", ret);
    csv << task.seed << "," << buf << "\n";
    std::fprintf(stderr, "sac200 task %llu: %.4f\n", static_cast<unsigned long long>(task.seed),
                 ret);
  }
  const MeanSe m = mean_se(returns);
  std::printf("sac200 return: %.4f +- %.4f (standard error, n=%zu test tasks)\n", m.mean, m.se,
              returns.size());
  std::printf("per-task results: %s/baseline.csv\n", tr.cfg().out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale meta-RL laboratory"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_dir, out;
  uint64_t seed = 0;
  int threads = 0;
  bool resume = false;
  std::vector<std::string> run_dirs;

  auto* train = app.add_subcommand("train", "Meta-train under a config file");
  train->add_option("--config", config_path, "run config file")->required();
  auto* train_seed = train->add_option("--seed", seed, "override master seed");
  train->add_option("--out", out, "override output directory");
  train->add_flag("--resume", resume, "continue from the run's checkpoint");
  train->add_option("--threads", threads, "data-collection fan-out (results are identical)");

  auto* eval = app.add_subcommand("eval", "Adaptation protocol on a trained run");
  eval->add_option("--checkpoint", checkpoint_dir, "run directory (metrics.csv + checkpoint.bin)")
      ->required();
  eval->add_option("--out", out, "output directory (default: the run directory)");
  eval->add_option("--seed", seed, "evaluation seed");

  auto* baseline = app.add_subcommand("baseline", "Per-task SAC-200 baseline on the test tasks");
  baseline->add_option("--config", config_path, "run config file")->required();
  auto* base_seed = baseline->add_option("--seed", seed, "override master seed");
  baseline->add_option("--out", out, "override output directory");

  auto* report = app.add_subcommand("report", "Aggregate run directories into figures + table");
  report->add_option("--out", out, "report output directory")->required();
  report->add_option("runs", run_dirs, "run directories")->required();

  auto* diagnose = app.add_subcommand("diagnose", "Posterior/latent figures for one run");
  diagnose->add_option("--checkpoint", checkpoint_dir, "run directory")->required();
  diagnose->add_option("--out", out, "output directory (default: <run>/diagnostics)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return cmd_train(config_path, train_seed->count() > 0, seed, out, resume, threads);
    }
    if (eval->parsed()) return cmd_eval(checkpoint_dir, out, seed);
    if (baseline->parsed()) {
      return cmd_baseline(config_path, base_seed->count() > 0, seed, out);
    }
    if (report->parsed()) {
      write_report(run_dirs, out);
      return 0;
    }
    if (diagnose->parsed()) {
      diagnose_run(checkpoint_dir, out.empty() ? checkpoint_dir + "/diagnostics" : out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
