#pragma once

#include <string>
#include <utility>
#include <vector>

#include "metarl/adam.hpp"
#include "metarl/encoder.hpp"
#include "metarl/gaussian_policy.hpp"
#include "metarl/nn.hpp"
#include "metarl/rbf.hpp"
#include "metarl/rng.hpp"
#include "metarl/tape.hpp"

namespace metarl {

/// How the task latent is lifted before entering actor and critics.
///   pearl_parity    - extra linear layer d -> k*d with relu (parameter-count
///                     parity with the RBF variants)
///   vanilla_pearl   - latent passed through unchanged
///   rbf_pearl       - RBF expansion with trainable widths
///   rbf_pearl_fixed - RBF expansion, frozen init
enum class Variant { pearl_parity, vanilla_pearl, rbf_pearl, rbf_pearl_fixed };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);

struct SacConfig {
  int obs_dim = 0;
  int act_dim = 0;
  int latent_dim = 3;
  int rbf_centers = 9;
  Variant variant = Variant::pearl_parity;
  std::vector<int> actor_hidden = {300, 300, 300};
  std::vector<int> critic_hidden = {300, 300, 300};
  std::vector<int> encoder_hidden = {200, 200, 200};
  double gamma = 0.99;
  double tau = 0.005;
  double alpha = 0.2;   // fixed entropy temperature
  double beta_kl = 0.1; // encoder loss KL weight
  double lr = 3e-4;
  int batch_size = 256;
  bool twin_critics = true;  // single-critic mode exists for literal-equation tests
};

/// Per-network latent uplift; each actor/critic owns its own instance.
class LatentLift {
 public:
  LatentLift() = default;
  LatentLift(std::string name, Variant variant, int latent_dim, int centers, Rng& rng);

  Var forward(Tape& t, Var z);
  Tensor forward_nograd(const Tensor& z) const;
  int out_dim() const;
  Variant variant() const { return variant_; }

  std::vector<Parameter*> trainable_params();
  /// Includes frozen RBF tensors (checkpointing and target copies).
  std::vector<Parameter*> all_params();
  void copy_values_from(const LatentLift& other);

  /// The RBF expansion behind this lift (rbf variants only; throws otherwise).
  const RbfLayer& rbf() const;

 private:
  Variant variant_ = Variant::vanilla_pearl;
  int d_ = 0;
  int k_ = 0;
  Mlp linear_;    // pearl_parity only
  RbfLayer rbf_;  // rbf variants only
};

/// A minibatch of same-task transitions in matrix form.
struct Batch {
  int task_id = -1;
  Tensor s, a, r, s_next;  // [B,obs] [B,act] [B,1] [B,obs]
  int size() const { return s.rows(); }
};

Batch make_batch(int task_id, const std::vector<Transition>& ts);
Tensor repeat_row(const std::vector<double>& row, int n);

/// Actor, twin critics + targets, per-network latent lifts, task encoder.
class SacNetworks {
 public:
  SacNetworks() = default;
  /// Construction draw order: actor lift, actor, q1 lift, q1, q2 lift, q2,
  /// encoder; targets start as exact copies of the online critics.
  SacNetworks(const SacConfig& cfg, Rng& rng);

  const SacConfig& cfg() const { return cfg_; }

  // --- rollout-time action selection (no tape) ---
  std::vector<double> act(const std::vector<double>& obs, const std::vector<double>& z,
                          const Tensor& noise) const;
  std::vector<double> act_mean(const std::vector<double>& obs, const std::vector<double>& z) const;

  // --- losses ---
  /// Gradient-free TD target r + gamma * (min target Q(s',a') - alpha log pi(a'));
  /// a' is freshly sampled from the current actor with the given noise [B,act].
  Tensor td_target(const Batch& b, const std::vector<double>& z, const Tensor& next_noise) const;
  /// Mean squared Bellman error against a fixed target, summed over critics.
  /// z_rows is attached for the encoder path, constant otherwise.
  Var critic_loss_graph(Tape& t, const Batch& b, Var z_rows, const Tensor& y);
  /// mean(alpha * log pi(a|s,z) - min Q(s, a, z)), a reparameterized.
  Var actor_loss_graph(Tape& t, const Batch& b, Var z_rows, const Tensor& act_noise);
  struct EncoderLoss {
    Var total, critic, kl;
  };
  /// Critic loss with the latent sampled through the posterior (gradients
  /// reach the encoder) plus beta * KL(posterior || prior). The TD target y
  /// must be precomputed from the identically-sampled latent (see
  /// sampled_latent_value), and stays constant under differentiation.
  EncoderLoss encoder_loss_graph(Tape& t, const Batch& b, const std::vector<Transition>& context,
                                 const Tensor& z_noise, const Tensor& y);
  /// The gradient-free twin of the latent draw inside encoder_loss_graph.
  std::vector<double> sampled_latent_value(const std::vector<Transition>& context,
                                           const Tensor& z_noise) const;

  void soft_update_targets(double tau);
  void sync_targets();

  // --- parameter groups ---
  std::vector<Parameter*> actor_params();
  std::vector<Parameter*> critic_params();
  std::vector<Parameter*> encoder_params();
  std::vector<Parameter*> target_params();
  std::vector<Parameter*> all_params();
  void zero_all_grads();

  GaussianPolicy& actor() { return actor_; }
  TaskEncoder& task_encoder() { return encoder_; }
  const TaskEncoder& task_encoder() const { return encoder_; }
  LatentLift& actor_lift() { return actor_lift_; }
  LatentLift& q1_lift() { return q1_lift_; }
  Mlp& q1() { return q1_; }
  Mlp& q2() { return q2_; }
  Mlp& target_q1() { return tq1_; }

 private:
  SacConfig cfg_;
  LatentLift actor_lift_, q1_lift_, q2_lift_, tq1_lift_, tq2_lift_;
  GaussianPolicy actor_;
  Mlp q1_, q2_, tq1_, tq2_;
  TaskEncoder encoder_;

  Tensor policy_input(const Tensor& obs, const std::vector<double>& z) const;
  Var critic_forward(Tape& t, Mlp& q, LatentLift& lift, Var s, Var a, Var z_rows);
};

/// Networks plus their three optimizers and the update steps. Each update
/// zeroes every gradient buffer first, builds one tape, backpropagates, and
/// steps exactly one optimizer; targets move only in finish_update().
class SacAgent {
 public:
  SacAgent(const SacConfig& cfg, uint64_t init_seed);

  // the optimizers hold pointers into nets; moving keeps parameter addresses
  // stable (vector buffers transfer), copying would not
  SacAgent(const SacAgent&) = delete;
  SacAgent& operator=(const SacAgent&) = delete;
  SacAgent(SacAgent&&) = default;
  SacAgent& operator=(SacAgent&&) = default;

  /// Noise draw order: td-target action noise [B*act].
  double critic_update(const Batch& b, const std::vector<double>& z, Rng& noise_rng);
  /// Noise draw order: reparameterized action noise [B*act].
  double actor_update(const Batch& b, const std::vector<double>& z, Rng& noise_rng);
  /// Noise draw order: latent noise [d], then td-target action noise [B*act].
  /// Returns (encoder loss, total KL).
  std::pair<double, double> encoder_update(const Batch& b, const std::vector<Transition>& context,
                                           Rng& noise_rng);
  void finish_update() { nets.soft_update_targets(nets.cfg().tau); }

  SacNetworks nets;
  Adam critic_opt, actor_opt, encoder_opt;
};

}  // namespace metarl
