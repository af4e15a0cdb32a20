#pragma once

#include <memory>
#include <string>
#include <vector>

#include "metarl/diagnostics.hpp"
#include "metarl/env.hpp"
#include "metarl/metrics.hpp"
#include "metarl/replay.hpp"
#include "metarl/sac.hpp"
#include "metarl/tasks.hpp"

namespace metarl {

/// Environment registry: gaze_linear, gaze_nonlinear, socialnav, racer, plus
/// the const_stub used by protocol cross-checks.
std::unique_ptr<Environment> make_env(const std::string& env_name);
/// The reward-combination family each environment trains over.
struct EnvTaskFamily {
  TaskFamily family = TaskFamily::convex;
  int components = 0;
  int default_latent_dim = 0;
};
EnvTaskFamily env_task_family(const std::string& env_name);
/// Installs task-dependent state on task-aware environments (racer).
void apply_task(Environment& env, const TaskSpec& task);


struct MetaRunConfig {
  std::string env_name = "racer";
  int n_train_tasks = 100;
  int n_test_tasks = 20;
  int adaptation_steps = 200;  // prior-conditioned exploration budget at test
  int episode_len = 200;
  int traj_per_task = 2;    // trajectories collected per task per iteration
  int context_size = 64;    // transitions per posterior update
  int updates_per_iter = 125;  // task minibatches per training iteration
  int task_minibatch = 8;
  size_t buffer_capacity = 100000;
  long total_env_step_budget = 150000;
  int eval_interval = 1;  // iterations between evaluation/checkpoint points
  int sac200_grad_steps_per_obs = 25;
  int collect_threads = 1;  // data collection fan-out; results are identical for any value
  uint64_t master_seed = 0;
  std::string out_dir = "runs/default";
  SacConfig sac;  // obs/act dims are filled from the environment
};

/// Inverse of PearlTrainer::run_line(); rebuilds the config a metrics file
/// was produced under (out_dir/threads excluded, they are not run identity).
MetaRunConfig parse_run_line(const std::string& line);

struct LossRecord {
  double critic = 0.0, actor = 0.0, encoder = 0.0, kl = 0.0;
};

struct AdaptationResult {
  double exploration_return = 0.0;  // summed reward of the prior-conditioned phase
  double adapted_return = 0.0;      // one episode conditioned on the latent estimate
  std::vector<double> z_hat;
};

struct EvalSummary {
  double mean_adapted = 0.0;
  double std_adapted = 0.0;
  double mean_exploration = 0.0;
  std::vector<AdaptationResult> per_task;
};

/// Meta-training driver: alternating per-task data collection (posterior- or
/// prior-conditioned exploration) and off-policy updates over task
/// minibatches, plus the 200-step meta-test protocol and the SAC-200
/// baseline. All randomness derives from (master seed, iteration, task), so
/// runs are bit-reproducible and resumable at iteration boundaries.
class PearlTrainer {
 public:
  explicit PearlTrainer(MetaRunConfig cfg);

  // -- meta-training --
  void collect_for_task(int task_index);
  void collect_iteration();  // K trajectories for every training task
  LossRecord train_iteration();

  // -- evaluation --
  AdaptationResult meta_test(const TaskSpec& task, uint64_t eval_seed);
  EvalSummary evaluate_test_tasks();
  double run_sac200_baseline(const TaskSpec& task, uint64_t seed) const;

  /// Budget loop with metrics + checkpoints under cfg.out_dir; set resume to
  /// continue from the checkpoint if one exists.
  void run(bool resume);

  /// Writes/loads full training state (params, optimizers, buffers, history).
  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

  CollapseRecord collapse_probe();

  const MetaRunConfig& cfg() const { return cfg_; }
  SacAgent& agent() { return *agent_; }
  const std::vector<TaskSpec>& train_tasks() const { return train_tasks_; }
  const std::vector<TaskSpec>& test_tasks() const { return test_tasks_; }
  std::vector<TaskBuffer>& buffers() { return buffers_; }
  const std::vector<int>& probe_task_indices() const { return probe_tasks_; }
  long env_steps() const { return env_steps_; }
  int iteration() const { return iteration_; }
  const std::vector<MetricsRow>& history() const { return history_; }
  const std::vector<CollapseRecord>& collapse_history() const { return collapse_history_; }
  std::string metrics_path() const;
  std::string checkpoint_path() const;
  /// The run identity a checkpoint is bound to (no stopping condition).
  std::string config_signature() const;
  /// Human-readable description written into metrics files.
  std::string run_line() const;

 private:
  MetaRunConfig cfg_;
  std::unique_ptr<Environment> env_;
  std::vector<TaskSpec> train_tasks_, test_tasks_;
  std::vector<TaskBuffer> buffers_;
  std::vector<int> probe_tasks_;
  std::unique_ptr<SacAgent> agent_;
  long env_steps_ = 0;
  int iteration_ = 0;
  std::vector<MetricsRow> history_;
  std::vector<CollapseRecord> collapse_history_;

  long collect_with(Environment& env, int task_index);
  void record_evaluation(const LossRecord& losses);
};

/// Plain (task-free) SAC on one fixed task: a latent pinned to zero and no
/// encoder updates. Used for sanity baselines.
struct SoloSacResult {
  bool reached = false;
  long steps_used = 0;
  double best_eval_return = 0.0;
  std::vector<double> eval_returns;
};

double random_policy_mean_return(Environment& env, const TaskSpec& task, int episodes,
                                 int episode_len, uint64_t seed);

SoloSacResult run_solo_sac(Environment& env, const TaskSpec& task, const SacConfig& cfg,
                           long max_steps, int episode_len, double stop_at_return,
                           int eval_every_episodes, uint64_t seed);

}  // namespace metarl
