#include "metarl/pearl.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "metarl/checkpoint.hpp"
#include "metarl/env/const_stub.hpp"
#include "metarl/env/gaze.hpp"
#include "metarl/env/racer.hpp"
#include "metarl/env/socialnav.hpp"

namespace metarl {
namespace {

// Stream separation: every consumer mixes its own salt into the master seed,
// and per-iteration streams are derived statelessly so a resumed run replays
// the exact random sequences of an uninterrupted one.
constexpr uint64_t kCollectSalt = 0x636f6c6cULL;
constexpr uint64_t kTrainSalt = 0x7472616eULL;
constexpr uint64_t kEvalSalt = 0x6576616cULL;
constexpr uint64_t kProbeSalt = 0x70726f62ULL;
constexpr uint64_t kSac200Salt = 0x73616332ULL;
constexpr uint64_t kSoloSalt = 0x736f6c6fULL;
constexpr uint64_t kRandomPolicySalt = 0x72616e64ULL;
constexpr uint64_t kCheckpointMagic = 0x4d455441524c4331ULL;  // "METARLC1"

uint64_t iter_task_key(int iteration, int task_index) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(iteration)) << 32) |
         static_cast<uint32_t>(task_index);
}

// Shortest decimal string that parses back to the same double, so a run line
// reconstructs the exact configuration it was written from.
std::string fmt_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Tensor noise_row(Rng& rng, int n) {
  Tensor t = Tensor::zeros({1, n});
  for (auto& x : t.v) x = rng.normal();
  return t;
}

std::vector<double> scaled(std::vector<double> a, const std::vector<double>& scale) {
  for (size_t i = 0; i < a.size(); ++i) a[i] *= scale[i];
  return a;
}

double episode_return(Environment& env, const TaskSpec& task, const SacNetworks& nets,
                      const std::vector<double>& z, int episode_len, uint64_t reset_seed) {
  const std::vector<double> scale = env.action_scale();
  std::vector<double> obs = env.reset(reset_seed);
  double ret = 0.0;
  for (int t = 0; t < episode_len; ++t) {
    StepResult sr = env.step(scaled(nets.act_mean(obs, z), scale));
    ret += task.evaluate(sr.components);
    obs = std::move(sr.obs);
  }
  return ret;
}

}  // namespace

std::unique_ptr<Environment> make_env(const std::string& env_name) {
  if (env_name == "gaze_linear" || env_name == "gaze_nonlinear")
    return std::make_unique<GazeEnv>();
  if (env_name == "socialnav") return std::make_unique<SocialNavEnv>();
  if (env_name == "racer") return std::make_unique<RacerEnv>();
  if (env_name == "const_stub") return std::make_unique<ConstRewardEnv>();
  throw std::runtime_error("unknown environment: " + env_name);
}

EnvTaskFamily env_task_family(const std::string& env_name) {
  if (env_name == "gaze_linear") return {TaskFamily::convex, 3, 3};
  if (env_name == "gaze_nonlinear") return {TaskFamily::reward_net, 3, 3};
  if (env_name == "socialnav") return {TaskFamily::convex, 5, 5};
  if (env_name == "racer") return {TaskFamily::racer, 3, 3};
  if (env_name == "const_stub") return {TaskFamily::convex, 1, 1};
  throw std::runtime_error("unknown environment: " + env_name);
}

void apply_task(Environment& env, const TaskSpec& task) {
  // reward-weight families reweight components outside the env; only the
  // racer's reward landscape lives inside it
  if (auto* racer = dynamic_cast<RacerEnv*>(&env)) {
    if (task.family != TaskFamily::racer)
      throw std::runtime_error("apply_task: racer env needs a racer-family task");
    racer->set_task(task.racer);
  }
}

PearlTrainer::PearlTrainer(MetaRunConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.n_train_tasks < 1) throw std::runtime_error("config: need at least one training task");
  if (cfg_.n_test_tasks < 0) throw std::runtime_error("config: negative test task count");
  if (cfg_.traj_per_task < 1 || cfg_.episode_len < 1 || cfg_.context_size < 1 ||
      cfg_.task_minibatch < 1 || cfg_.updates_per_iter < 1 || cfg_.adaptation_steps < 1 ||
      cfg_.eval_interval < 1 || cfg_.sac.batch_size < 1)
    throw std::runtime_error("config: all sizes and intervals must be positive");

  env_ = make_env(cfg_.env_name);
  cfg_.sac.obs_dim = env_->obs_dim();
  cfg_.sac.act_dim = env_->act_dim();

  EnvTaskFamily fam = env_task_family(cfg_.env_name);
  train_tasks_ = make_task_set(fam.family, fam.components, train_task_seeds(cfg_.n_train_tasks));
  test_tasks_ = make_task_set(fam.family, fam.components, test_task_seeds(cfg_.n_test_tasks));

  buffers_.reserve(train_tasks_.size());
  for (int i = 0; i < cfg_.n_train_tasks; ++i) buffers_.emplace_back(i, cfg_.buffer_capacity);

  // fixed probe set for posterior-health traces, comparable across runs
  std::vector<int> idx(cfg_.n_train_tasks);
  std::iota(idx.begin(), idx.end(), 0);
  Rng probe_rng(17);
  int want = std::min(5, cfg_.n_train_tasks);
  for (int i = 0; i < want; ++i)
    std::swap(idx[i], idx[i + probe_rng.uniform_int(cfg_.n_train_tasks - i)]);
  probe_tasks_.assign(idx.begin(), idx.begin() + want);
  std::sort(probe_tasks_.begin(), probe_tasks_.end());

  agent_ = std::make_unique<SacAgent>(cfg_.sac, cfg_.master_seed);
}

long PearlTrainer::collect_with(Environment& env, int task_index) {
  Rng rng(mix_seed(cfg_.master_seed, kCollectSalt, iter_task_key(iteration_, task_index)));
  const TaskSpec& task = train_tasks_[static_cast<size_t>(task_index)];
  TaskBuffer& buf = buffers_[static_cast<size_t>(task_index)];
  apply_task(env, task);
  const std::vector<double> scale = env.action_scale();
  const int d = cfg_.sac.latent_dim;
  long steps = 0;
  for (int k = 0; k < cfg_.traj_per_task; ++k) {
    // posterior-conditioned exploration once the task has any history,
    // prior-conditioned on first contact
    std::vector<double> z;
    if (buf.size() == 0) {
      z = rng.normal_vec(d);
    } else {
      PosteriorGaussian post =
          agent_->nets.task_encoder().posterior(buf.sample(cfg_.context_size, rng));
      z = sample_latent(post, rng.normal_vec(d));
    }
    std::vector<double> obs = env.reset(rng.next_u64());
    for (int t = 0; t < cfg_.episode_len; ++t) {
      std::vector<double> a = agent_->nets.act(obs, z, noise_row(rng, env.act_dim()));
      StepResult sr;
      try {
        sr = env.step(scaled(a, scale));
      } catch (const std::exception& e) {
        std::cerr << "collect: env fault on task " << task_index << " step " << t << ": "
                  << e.what() << "; aborting trajectory\n";
        break;
      }
      buf.push({std::move(obs), std::move(a), task.evaluate(sr.components), sr.obs});
      obs = std::move(sr.obs);
      ++steps;
    }
  }
  return steps;
}

void PearlTrainer::collect_for_task(int task_index) {
  if (task_index < 0 || task_index >= cfg_.n_train_tasks)
    throw std::out_of_range("collect_for_task: bad task index");
  env_steps_ += collect_with(*env_, task_index);
}

void PearlTrainer::collect_iteration() {
  for (auto& b : buffers_) b.begin_collection();
  int threads = std::min(std::max(1, cfg_.collect_threads), cfg_.n_train_tasks);
  if (threads == 1) {
    for (int i = 0; i < cfg_.n_train_tasks; ++i) collect_for_task(i);
    return;
  }
  // per-task work is independent and seeded by (iteration, task), so the
  // schedule cannot change results
  std::atomic<int> next{0};
  std::atomic<long> total{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      auto env = make_env(cfg_.env_name);
      for (int i = next.fetch_add(1); i < cfg_.n_train_tasks; i = next.fetch_add(1))
        total.fetch_add(collect_with(*env, i));
    });
  }
  for (auto& th : pool) th.join();
  env_steps_ += total.load();
}

LossRecord PearlTrainer::train_iteration() {
  for (const TaskBuffer& b : buffers_)
    if (b.size() < static_cast<size_t>(cfg_.context_size))
      throw std::runtime_error("train: task " + std::to_string(b.task_id()) + " has only " +
                               std::to_string(b.size()) + " transitions; need at least " +
                               std::to_string(cfg_.context_size) + " (collect first)");

  Rng rng(mix_seed(cfg_.master_seed, kTrainSalt, static_cast<uint64_t>(iteration_)));
  const int n = cfg_.n_train_tasks;
  const int mb = std::min(cfg_.task_minibatch, n);
  const int d = cfg_.sac.latent_dim;
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  LossRecord sum;
  long count = 0;
  for (int u = 0; u < cfg_.updates_per_iter; ++u) {
    for (int i = 0; i < mb; ++i) std::swap(order[i], order[i + rng.uniform_int(n - i)]);
    for (int i = 0; i < mb; ++i) {
      int ti = order[static_cast<size_t>(i)];
      TaskBuffer& buf = buffers_[static_cast<size_t>(ti)];
      std::vector<Transition> context = buf.sample_recent(cfg_.context_size, rng);
      PosteriorGaussian post = agent_->nets.task_encoder().posterior(context);
      std::vector<double> z = sample_latent(post, rng.normal_vec(d));
      Batch batch = make_batch(ti, buf.sample(cfg_.sac.batch_size, rng));
      sum.critic += agent_->critic_update(batch, z, rng);
      sum.actor += agent_->actor_update(batch, z, rng);
      auto [enc_loss, kl] = agent_->encoder_update(batch, context, rng);
      sum.encoder += enc_loss;
      sum.kl += kl;
      agent_->finish_update();
      ++count;
    }
  }
  sum.critic /= static_cast<double>(count);
  sum.actor /= static_cast<double>(count);
  sum.encoder /= static_cast<double>(count);
  sum.kl /= static_cast<double>(count);
  return sum;
}

AdaptationResult PearlTrainer::meta_test(const TaskSpec& task, uint64_t eval_seed) {
  Rng rng(mix_seed(cfg_.master_seed, kEvalSalt, eval_seed));
  apply_task(*env_, task);
  const std::vector<double> scale = env_->action_scale();
  const int d = cfg_.sac.latent_dim;
  AdaptationResult out;
  std::vector<Transition> context;
  context.reserve(static_cast<size_t>(cfg_.adaptation_steps));
  int steps = 0;
  while (steps < cfg_.adaptation_steps) {
    // fresh prior draw each exploration episode; the encoder has seen nothing
    // of this task yet
    std::vector<double> z = rng.normal_vec(d);
    std::vector<double> obs = env_->reset(rng.next_u64());
    for (int t = 0; t < cfg_.episode_len && steps < cfg_.adaptation_steps; ++t, ++steps) {
      std::vector<double> a = agent_->nets.act(obs, z, noise_row(rng, env_->act_dim()));
      StepResult sr = env_->step(scaled(a, scale));
      double r = task.evaluate(sr.components);
      out.exploration_return += r;
      context.push_back({std::move(obs), std::move(a), r, sr.obs});
      obs = std::move(sr.obs);
    }
  }
  out.z_hat = agent_->nets.task_encoder().posterior_mean_estimate(context);
  out.adapted_return =
      episode_return(*env_, task, agent_->nets, out.z_hat, cfg_.episode_len, rng.next_u64());
  return out;
}

EvalSummary PearlTrainer::evaluate_test_tasks() {
  EvalSummary s;
  s.per_task.reserve(test_tasks_.size());
  for (size_t i = 0; i < test_tasks_.size(); ++i)
    s.per_task.push_back(meta_test(test_tasks_[i], iter_task_key(iteration_, static_cast<int>(i))));
  if (s.per_task.empty()) return s;
  const double n = static_cast<double>(s.per_task.size());
  double sq = 0.0;
  for (const auto& r : s.per_task) {
    s.mean_adapted += r.adapted_return;
    s.mean_exploration += r.exploration_return;
    sq += r.adapted_return * r.adapted_return;
  }
  s.mean_adapted /= n;
  s.mean_exploration /= n;
  s.std_adapted = std::sqrt(std::max(0.0, sq / n - s.mean_adapted * s.mean_adapted));
  return s;
}

double PearlTrainer::run_sac200_baseline(const TaskSpec& task, uint64_t seed) const {
  auto env = make_env(cfg_.env_name);
  apply_task(*env, task);
  SacConfig sc = cfg_.sac;
  sc.variant = Variant::vanilla_pearl;  // constant z pins the lift to identity
  sc.latent_dim = 1;
  SacAgent agent(sc, mix_seed(seed, kSac200Salt));
  Rng rng(mix_seed(seed, kSac200Salt, 1));
  const std::vector<double> z = {0.0};
  const std::vector<double> scale = env->action_scale();

  // the entire experience budget: 200 observations, nothing more
  TaskBuffer buf(0, 200);
  std::vector<double> obs = env->reset(rng.next_u64());
  int t_in_ep = 0;
  for (int steps = 0; steps < 200; ++steps, ++t_in_ep) {
    if (t_in_ep == cfg_.episode_len) {
      obs = env->reset(rng.next_u64());
      t_in_ep = 0;
    }
    std::vector<double> a = agent.nets.act(obs, z, noise_row(rng, env->act_dim()));
    StepResult sr = env->step(scaled(a, scale));
    buf.push({std::move(obs), std::move(a), task.evaluate(sr.components), sr.obs});
    obs = std::move(sr.obs);
  }
  if (buf.size() != 200)
    throw std::logic_error("sac200: expected exactly 200 stored transitions, have " +
                           std::to_string(buf.size()));

  const long updates = 200L * cfg_.sac200_grad_steps_per_obs;
  for (long u = 0; u < updates; ++u) {
    Batch b = make_batch(0, buf.sample(static_cast<size_t>(sc.batch_size), rng));
    agent.critic_update(b, z, rng);
    agent.actor_update(b, z, rng);
    agent.finish_update();
  }
  return episode_return(*env, task, agent.nets, z, cfg_.episode_len, rng.next_u64());
}

CollapseRecord PearlTrainer::collapse_probe() {
  Rng rng(mix_seed(cfg_.master_seed, kProbeSalt, static_cast<uint64_t>(iteration_)));
  std::vector<const TaskBuffer*> probes;
  probes.reserve(probe_tasks_.size());
  for (int i : probe_tasks_) probes.push_back(&buffers_[static_cast<size_t>(i)]);
  return record_collapse_metrics(agent_->nets.task_encoder(), probes, cfg_.context_size,
                                 iteration_, env_steps_, rng);
}

std::string PearlTrainer::metrics_path() const { return cfg_.out_dir + "/metrics.csv"; }
std::string PearlTrainer::checkpoint_path() const { return cfg_.out_dir + "/checkpoint.bin"; }

// Everything that shapes the training trajectory. The step budget is a
// stopping condition, not an identity: resuming with a larger budget is the
// point of resuming, so it stays out of the signature.
std::string PearlTrainer::config_signature() const {
  auto dims = [](const std::vector<int>& h) {
    std::string s;
    for (size_t i = 0; i < h.size(); ++i) s += (i ? "x" : "") + std::to_string(h[i]);
    return s.empty() ? "none" : s;
  };
  std::ostringstream os;
  os << "env=" << cfg_.env_name << " variant=" << variant_name(cfg_.sac.variant)
     << " seed=" << cfg_.master_seed << " latent_dim=" << cfg_.sac.latent_dim
     << " rbf_centers=" << cfg_.sac.rbf_centers << " actor=" << dims(cfg_.sac.actor_hidden)
     << " critic=" << dims(cfg_.sac.critic_hidden) << " encoder=" << dims(cfg_.sac.encoder_hidden)
     << " twin_critics=" << (cfg_.sac.twin_critics ? 1 : 0)
     << " gamma=" << fmt_exact(cfg_.sac.gamma) << " tau=" << fmt_exact(cfg_.sac.tau)
     << " alpha=" << fmt_exact(cfg_.sac.alpha) << " beta_kl=" << fmt_exact(cfg_.sac.beta_kl)
     << " lr=" << fmt_exact(cfg_.sac.lr) << " batch=" << cfg_.sac.batch_size
     << " train_tasks=" << cfg_.n_train_tasks << " test_tasks=" << cfg_.n_test_tasks
     << " traj_per_task=" << cfg_.traj_per_task << " episode_len=" << cfg_.episode_len
     << " context=" << cfg_.context_size << " updates_per_iter=" << cfg_.updates_per_iter
     << " task_minibatch=" << cfg_.task_minibatch << " adaptation_steps=" << cfg_.adaptation_steps
     << " buffer_capacity=" << cfg_.buffer_capacity << " eval_interval=" << cfg_.eval_interval
     << " sac200_grad_steps_per_obs=" << cfg_.sac200_grad_steps_per_obs;
  return os.str();
}

std::string PearlTrainer::run_line() const {
  return config_signature() + " budget=" + std::to_string(cfg_.total_env_step_budget);
}

// Inverse of run_line(): lets a run directory (metrics header) stand in for
// the config file it was produced from. out_dir and collect_threads are not
// part of the identity and are left at defaults.
MetaRunConfig parse_run_line(const std::string& line) {
  auto parse_dims = [](const std::string& s) {
    std::vector<int> dims;
    if (s == "none") return dims;
    size_t pos = 0;
    while (pos <= s.size()) {
      size_t next = s.find('x', pos);
      if (next == std::string::npos) next = s.size();
      dims.push_back(std::stoi(s.substr(pos, next - pos)));
      pos = next + 1;
    }
    return dims;
  };

  MetaRunConfig cfg;
  int seen = 0;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    size_t eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("run line: malformed token " + tok);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    ++seen;
    if (key == "env") cfg.env_name = val;
    else if (key == "variant") cfg.sac.variant = parse_variant(val);
    else if (key == "seed") cfg.master_seed = std::stoull(val);
    else if (key == "latent_dim") cfg.sac.latent_dim = std::stoi(val);
    else if (key == "rbf_centers") cfg.sac.rbf_centers = std::stoi(val);
    else if (key == "actor") cfg.sac.actor_hidden = parse_dims(val);
    else if (key == "critic") cfg.sac.critic_hidden = parse_dims(val);
    else if (key == "encoder") cfg.sac.encoder_hidden = parse_dims(val);
    else if (key == "twin_critics") cfg.sac.twin_critics = val != "0";
    else if (key == "gamma") cfg.sac.gamma = std::stod(val);
    else if (key == "tau") cfg.sac.tau = std::stod(val);
    else if (key == "alpha") cfg.sac.alpha = std::stod(val);
    else if (key == "beta_kl") cfg.sac.beta_kl = std::stod(val);
    else if (key == "lr") cfg.sac.lr = std::stod(val);
    else if (key == "batch") cfg.sac.batch_size = std::stoi(val);
    else if (key == "train_tasks") cfg.n_train_tasks = std::stoi(val);
    else if (key == "test_tasks") cfg.n_test_tasks = std::stoi(val);
    else if (key == "traj_per_task") cfg.traj_per_task = std::stoi(val);
    else if (key == "episode_len") cfg.episode_len = std::stoi(val);
    else if (key == "context") cfg.context_size = std::stoi(val);
    else if (key == "updates_per_iter") cfg.updates_per_iter = std::stoi(val);
    else if (key == "task_minibatch") cfg.task_minibatch = std::stoi(val);
    else if (key == "adaptation_steps") cfg.adaptation_steps = std::stoi(val);
    else if (key == "buffer_capacity") cfg.buffer_capacity = std::stoull(val);
    else if (key == "eval_interval") cfg.eval_interval = std::stoi(val);
    else if (key == "sac200_grad_steps_per_obs") cfg.sac200_grad_steps_per_obs = std::stoi(val);
    else if (key == "budget") cfg.total_env_step_budget = std::stol(val);
    else throw std::runtime_error("run line: unknown key " + key);
  }
  if (seen != 27) throw std::runtime_error("run line: expected 27 fields, found " +
                                           std::to_string(seen));
  return cfg;
}

void PearlTrainer::record_evaluation(const LossRecord& losses) {
  EvalSummary ev = evaluate_test_tasks();
  CollapseRecord probe = collapse_probe();
  MetricsRow row;
  row.iteration = iteration_;
  row.env_steps = env_steps_;
  row.mean_test_return = ev.mean_adapted;
  row.std_test_return = ev.std_adapted;
  row.mean_exploration_return = ev.mean_exploration;
  row.critic_loss = losses.critic;
  row.actor_loss = losses.actor;
  row.encoder_loss = losses.encoder;
  row.kl_total = losses.kl;
  row.per_dim_kl = probe.per_dim_kl;
  row.per_dim_var = probe.per_dim_var;
  history_.push_back(std::move(row));
  collapse_history_.push_back(std::move(probe));
  const MetricsRow& r = history_.back();
  std::fprintf(stderr,
               "iter %d  env_steps %ld  test %.3f +- %.3f  explore %.3f  critic %.4g  actor %.4g  "
               "encoder %.4g  kl %.4g\n",
               r.iteration, r.env_steps, r.mean_test_return, r.std_test_return,
               r.mean_exploration_return, r.critic_loss, r.actor_loss, r.encoder_loss, r.kl_total);
}

void PearlTrainer::run(bool resume) {
  std::filesystem::create_directories(cfg_.out_dir);
  if (resume && std::filesystem::exists(checkpoint_path())) {
    load_checkpoint(checkpoint_path());
    std::fprintf(stderr, "resumed %s at iteration %d (%ld env steps)\n",
                 checkpoint_path().c_str(), iteration_, env_steps_);
  }
  if (env_steps_ >= cfg_.total_env_step_budget) {
    // zero budget (or an already-finished run): leave valid artifacts behind
    write_metrics_csv(metrics_path(), history_, run_line());
    save_checkpoint(checkpoint_path());
    return;
  }
  while (env_steps_ < cfg_.total_env_step_budget) {
    collect_iteration();
    LossRecord losses = train_iteration();
    ++iteration_;
    if (iteration_ % cfg_.eval_interval == 0 || env_steps_ >= cfg_.total_env_step_budget) {
      record_evaluation(losses);
      write_metrics_csv(metrics_path(), history_, run_line());
      save_checkpoint(checkpoint_path());
    }
  }
}

void PearlTrainer::save_checkpoint(const std::string& path) const {
  BinaryWriter w(path);
  w.u64(kCheckpointMagic);
  w.u64(fnv1a64_str(config_signature()));
  w.i64(env_steps_);
  w.i32(iteration_);
  save_params(w, agent_->nets.all_params());
  save_adam(w, agent_->critic_opt);
  save_adam(w, agent_->actor_opt);
  save_adam(w, agent_->encoder_opt);
  w.u64(buffers_.size());
  for (const auto& b : buffers_) save_buffer(w, b);
  w.u64(history_.size());
  for (const auto& h : history_) {
    w.i32(h.iteration);
    w.i64(h.env_steps);
    w.f64(h.mean_test_return);
    w.f64(h.std_test_return);
    w.f64(h.mean_exploration_return);
    w.f64(h.critic_loss);
    w.f64(h.actor_loss);
    w.f64(h.encoder_loss);
    w.f64(h.kl_total);
    w.vec(h.per_dim_kl);
    w.vec(h.per_dim_var);
  }
  w.u64(collapse_history_.size());
  for (const auto& c : collapse_history_) {
    w.i32(c.iteration);
    w.i64(c.env_steps);
    w.vec(c.per_dim_kl);
    w.vec(c.per_dim_var);
  }
  w.commit();
}

void PearlTrainer::load_checkpoint(const std::string& path) {
  BinaryReader r(path);
  if (r.u64() != kCheckpointMagic)
    throw std::runtime_error("checkpoint: " + path + " is not a metarl checkpoint");
  if (r.u64() != fnv1a64_str(config_signature()))
    throw std::runtime_error(
        "checkpoint: " + path +
        " was written by a run with different settings; refusing to resume");
  env_steps_ = r.i64();
  iteration_ = r.i32();
  load_params(r, agent_->nets.all_params());
  load_adam(r, agent_->critic_opt);
  load_adam(r, agent_->actor_opt);
  load_adam(r, agent_->encoder_opt);
  size_t nb = r.u64();
  if (nb != buffers_.size()) throw std::runtime_error("checkpoint: buffer count mismatch");
  for (size_t i = 0; i < nb; ++i) {
    buffers_[i] = load_buffer(r);
    if (buffers_[i].task_id() != static_cast<int>(i))
      throw std::runtime_error("checkpoint: buffer task id mismatch");
  }
  history_.clear();
  size_t nh = r.u64();
  for (size_t i = 0; i < nh; ++i) {
    MetricsRow h;
    h.iteration = r.i32();
    h.env_steps = r.i64();
    h.mean_test_return = r.f64();
    h.std_test_return = r.f64();
    h.mean_exploration_return = r.f64();
    h.critic_loss = r.f64();
    h.actor_loss = r.f64();
    h.encoder_loss = r.f64();
    h.kl_total = r.f64();
    h.per_dim_kl = r.vec();
    h.per_dim_var = r.vec();
    history_.push_back(std::move(h));
  }
  collapse_history_.clear();
  size_t nc = r.u64();
  for (size_t i = 0; i < nc; ++i) {
    CollapseRecord c;
    c.iteration = r.i32();
    c.env_steps = r.i64();
    c.per_dim_kl = r.vec();
    c.per_dim_var = r.vec();
    collapse_history_.push_back(std::move(c));
  }
}

double random_policy_mean_return(Environment& env, const TaskSpec& task, int episodes,
                                 int episode_len, uint64_t seed) {
  if (episodes < 1) throw std::runtime_error("random_policy_mean_return: need episodes >= 1");
  Rng rng(mix_seed(seed, kRandomPolicySalt));
  apply_task(env, task);
  const std::vector<double> scale = env.action_scale();
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env.reset(rng.next_u64());
    for (int t = 0; t < episode_len; ++t) {
      std::vector<double> a(static_cast<size_t>(env.act_dim()));
      for (auto& x : a) x = rng.uniform(-1.0, 1.0);
      StepResult sr = env.step(scaled(std::move(a), scale));
      total += task.evaluate(sr.components);
    }
  }
  return total / episodes;
}

SoloSacResult run_solo_sac(Environment& env, const TaskSpec& task, const SacConfig& cfg,
                           long max_steps, int episode_len, double stop_at_return,
                           int eval_every_episodes, uint64_t seed) {
  SacConfig sc = cfg;
  sc.obs_dim = env.obs_dim();
  sc.act_dim = env.act_dim();
  sc.variant = Variant::vanilla_pearl;
  sc.latent_dim = 1;
  apply_task(env, task);
  SacAgent agent(sc, mix_seed(seed, kSoloSalt));
  Rng rng(mix_seed(seed, kSoloSalt, 1));
  const std::vector<double> z = {0.0};
  const std::vector<double> scale = env.action_scale();
  TaskBuffer buf(0, 100000);

  SoloSacResult out;
  out.best_eval_return = std::numeric_limits<double>::lowest();
  const long warmup = sc.batch_size;  // uniform actions until one batch exists
  long steps = 0;
  int episode = 0;
  while (steps < max_steps) {
    std::vector<double> obs = env.reset(rng.next_u64());
    for (int t = 0; t < episode_len && steps < max_steps; ++t) {
      std::vector<double> a;
      if (steps < warmup) {
        a.resize(static_cast<size_t>(env.act_dim()));
        for (auto& x : a) x = rng.uniform(-1.0, 1.0);
      } else {
        a = agent.nets.act(obs, z, noise_row(rng, env.act_dim()));
      }
      StepResult sr = env.step(scaled(a, scale));
      buf.push({std::move(obs), std::move(a), task.evaluate(sr.components), sr.obs});
      obs = std::move(sr.obs);
      ++steps;
      if (steps >= warmup) {
        Batch b = make_batch(0, buf.sample(static_cast<size_t>(sc.batch_size), rng));
        agent.critic_update(b, z, rng);
        agent.actor_update(b, z, rng);
        agent.finish_update();
      }
    }
    ++episode;
    if (episode % eval_every_episodes == 0) {
      double ret = episode_return(env, task, agent.nets, z, episode_len, rng.next_u64());
      out.eval_returns.push_back(ret);
      out.best_eval_return = std::max(out.best_eval_return, ret);
      if (ret >= stop_at_return) {
        out.reached = true;
        out.steps_used = steps;
        return out;
      }
    }
  }
  out.steps_used = steps;
  return out;
}

}  // namespace metarl
