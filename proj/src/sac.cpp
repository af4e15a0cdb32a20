#include "metarl/sac.hpp"

#include <stdexcept>

namespace metarl {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::pearl_parity: return "pearl";
    case Variant::vanilla_pearl: return "vanilla_pearl";
    case Variant::rbf_pearl: return "rbf_pearl";
    case Variant::rbf_pearl_fixed: return "rbf_pearl_fixed";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "pearl" || s == "pearl_parity") return Variant::pearl_parity;
  if (s == "vanilla_pearl") return Variant::vanilla_pearl;
  if (s == "rbf_pearl") return Variant::rbf_pearl;
  if (s == "rbf_pearl_fixed") return Variant::rbf_pearl_fixed;
  throw std::runtime_error("unknown algorithm variant '" + s +
                           "' (want pearl, vanilla_pearl, rbf_pearl, or rbf_pearl_fixed)");
}

// --- LatentLift --------------------------------------------------------------

LatentLift::LatentLift(std::string name, Variant variant, int latent_dim, int centers, Rng& rng)
    : variant_(variant), d_(latent_dim), k_(centers) {
  if (latent_dim < 1) throw std::runtime_error("latent lift: latent_dim must be positive");
  switch (variant_) {
    case Variant::pearl_parity:
      linear_ = Mlp(std::move(name), MlpSpec{d_, {}, d_ * k_}, rng);
      break;
    case Variant::vanilla_pearl: break;
    case Variant::rbf_pearl:
      rbf_ = RbfLayer(std::move(name), d_, k_, /*trainable=*/true);
      break;
    case Variant::rbf_pearl_fixed:
      rbf_ = RbfLayer(std::move(name), d_, k_, /*trainable=*/false);
      break;
  }
}

int LatentLift::out_dim() const {
  return variant_ == Variant::vanilla_pearl ? d_ : d_ * k_;
}

Var LatentLift::forward(Tape& t, Var z) {
  switch (variant_) {
    case Variant::pearl_parity: return t.relu(linear_.forward(t, z));
    case Variant::vanilla_pearl: return z;
    case Variant::rbf_pearl:
    case Variant::rbf_pearl_fixed: return rbf_.forward(t, z);
  }
  throw std::runtime_error("latent lift: unknown variant");
}

Tensor LatentLift::forward_nograd(const Tensor& z) const {
  switch (variant_) {
    case Variant::pearl_parity: {
      Tensor out = linear_.forward_nograd(z);
      for (double& x : out.v) x = x > 0.0 ? x : 0.0;  // mirrors the tape relu kernel
      return out;
    }
    case Variant::vanilla_pearl: return z;
    case Variant::rbf_pearl:
    case Variant::rbf_pearl_fixed: return rbf_.forward_nograd(z);
  }
  throw std::runtime_error("latent lift: unknown variant");
}

std::vector<Parameter*> LatentLift::trainable_params() {
  switch (variant_) {
    case Variant::pearl_parity: return linear_.params();
    case Variant::vanilla_pearl: return {};
    case Variant::rbf_pearl:
    case Variant::rbf_pearl_fixed: return rbf_.trainable_params();
  }
  return {};
}

std::vector<Parameter*> LatentLift::all_params() {
  switch (variant_) {
    case Variant::pearl_parity: return linear_.params();
    case Variant::vanilla_pearl: return {};
    case Variant::rbf_pearl:
    case Variant::rbf_pearl_fixed: return rbf_.all_params();
  }
  return {};
}

void LatentLift::copy_values_from(const LatentLift& other) {
  if (variant_ != other.variant_ || d_ != other.d_ || k_ != other.k_) {
    throw std::runtime_error("latent lift: copy between mismatched lifts");
  }
  if (variant_ == Variant::pearl_parity) {
    linear_.copy_values_from(other.linear_);
  } else if (variant_ == Variant::rbf_pearl || variant_ == Variant::rbf_pearl_fixed) {
    rbf_.centers().value = other.rbf_.centers().value;
    rbf_.log_scales().value = other.rbf_.log_scales().value;
  }
}

const RbfLayer& LatentLift::rbf() const {
  if (variant_ != Variant::rbf_pearl && variant_ != Variant::rbf_pearl_fixed) {
    throw std::logic_error("latent lift: no RBF expansion in this variant");
  }
  return rbf_;
}

// --- batches -----------------------------------------------------------------

Batch make_batch(int task_id, const std::vector<Transition>& ts) {
  if (ts.empty()) throw std::runtime_error("batch: no transitions");
  int obs = static_cast<int>(ts[0].s.size());
  int act = static_cast<int>(ts[0].a.size());
  int n = static_cast<int>(ts.size());
  Batch b;
  b.task_id = task_id;
  b.s = Tensor::zeros({n, obs});
  b.a = Tensor::zeros({n, act});
  b.r = Tensor::zeros({n, 1});
  b.s_next = Tensor::zeros({n, obs});
  for (int i = 0; i < n; ++i) {
    const Transition& tr = ts[static_cast<size_t>(i)];
    if (static_cast<int>(tr.s.size()) != obs || static_cast<int>(tr.s_next.size()) != obs ||
        static_cast<int>(tr.a.size()) != act) {
      throw std::runtime_error("batch: inconsistent transition shapes");
    }
    for (int j = 0; j < obs; ++j) {
      b.s.at(i, j) = tr.s[static_cast<size_t>(j)];
      b.s_next.at(i, j) = tr.s_next[static_cast<size_t>(j)];
    }
    for (int j = 0; j < act; ++j) b.a.at(i, j) = tr.a[static_cast<size_t>(j)];
    b.r.at(i, 0) = tr.r;
  }
  return b;
}

Tensor repeat_row(const std::vector<double>& row, int n) {
  if (row.empty()) throw std::runtime_error("repeat_row: empty row");
  Tensor t = Tensor::zeros({n, static_cast<int>(row.size())});
  for (int i = 0; i < n; ++i) {
    for (size_t j = 0; j < row.size(); ++j) t.at(i, static_cast<int>(j)) = row[j];
  }
  return t;
}

static Tensor hcat(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) throw std::runtime_error("hcat: row mismatch");
  Tensor out = Tensor::zeros({a.rows(), a.cols() + b.cols()});
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (int j = 0; j < b.cols(); ++j) out.at(i, a.cols() + j) = b.at(i, j);
  }
  return out;
}

static Tensor noise_matrix(Rng& rng, int rows, int cols) {
  Tensor t = Tensor::zeros({rows, cols});
  for (double& x : t.v) x = rng.normal();
  return t;
}

// --- SacNetworks -------------------------------------------------------------

SacNetworks::SacNetworks(const SacConfig& cfg, Rng& rng) : cfg_(cfg) {
  if (cfg.obs_dim < 1 || cfg.act_dim < 1) throw std::runtime_error("sac: missing env dimensions");
  actor_lift_ = LatentLift("actor.lift", cfg.variant, cfg.latent_dim, cfg.rbf_centers, rng);
  int lifted = actor_lift_.out_dim();
  actor_ = GaussianPolicy("actor", cfg.obs_dim + lifted, cfg.actor_hidden, cfg.act_dim, rng);
  q1_lift_ = LatentLift("q1.lift", cfg.variant, cfg.latent_dim, cfg.rbf_centers, rng);
  q1_ = Mlp("q1", MlpSpec{cfg.obs_dim + cfg.act_dim + lifted, cfg.critic_hidden, 1}, rng);
  q2_lift_ = LatentLift("q2.lift", cfg.variant, cfg.latent_dim, cfg.rbf_centers, rng);
  q2_ = Mlp("q2", MlpSpec{cfg.obs_dim + cfg.act_dim + lifted, cfg.critic_hidden, 1}, rng);
  encoder_ = TaskEncoder("enc", cfg.obs_dim, cfg.act_dim, cfg.encoder_hidden, cfg.latent_dim, rng);

  Rng scratch(0);  // target shapes only; values are overwritten by sync
  tq1_lift_ = LatentLift("tq1.lift", cfg.variant, cfg.latent_dim, cfg.rbf_centers, scratch);
  tq1_ = Mlp("tq1", MlpSpec{cfg.obs_dim + cfg.act_dim + lifted, cfg.critic_hidden, 1}, scratch);
  tq2_lift_ = LatentLift("tq2.lift", cfg.variant, cfg.latent_dim, cfg.rbf_centers, scratch);
  tq2_ = Mlp("tq2", MlpSpec{cfg.obs_dim + cfg.act_dim + lifted, cfg.critic_hidden, 1}, scratch);
  for (Parameter* p : target_params()) p->trainable = false;
  sync_targets();
}

void SacNetworks::sync_targets() {
  tq1_.copy_values_from(q1_);
  tq2_.copy_values_from(q2_);
  tq1_lift_.copy_values_from(q1_lift_);
  tq2_lift_.copy_values_from(q2_lift_);
}

Tensor SacNetworks::policy_input(const Tensor& obs, const std::vector<double>& z) const {
  if (static_cast<int>(z.size()) != cfg_.latent_dim) {
    throw std::runtime_error("sac: latent has wrong dimension");
  }
  return hcat(obs, actor_lift_.forward_nograd(repeat_row(z, obs.rows())));
}

std::vector<double> SacNetworks::act(const std::vector<double>& obs, const std::vector<double>& z,
                                     const Tensor& noise) const {
  Tensor o = Tensor::row(obs);
  auto s = actor_.sample_nograd(policy_input(o, z), noise);
  return s.action.v;
}

std::vector<double> SacNetworks::act_mean(const std::vector<double>& obs,
                                          const std::vector<double>& z) const {
  Tensor o = Tensor::row(obs);
  return actor_.mean_action_nograd(policy_input(o, z)).v;
}

Tensor SacNetworks::td_target(const Batch& b, const std::vector<double>& z,
                              const Tensor& next_noise) const {
  int n = b.size();
  Tensor zrep = repeat_row(z, n);
  Tensor next_in = hcat(b.s_next, actor_lift_.forward_nograd(zrep));
  auto next = actor_.sample_nograd(next_in, next_noise);

  Tensor qin1 = hcat(hcat(b.s_next, next.action), tq1_lift_.forward_nograd(zrep));
  Tensor q = tq1_.forward_nograd(qin1);
  if (cfg_.twin_critics) {
    Tensor qin2 = hcat(hcat(b.s_next, next.action), tq2_lift_.forward_nograd(zrep));
    Tensor q2 = tq2_.forward_nograd(qin2);
    for (int i = 0; i < n; ++i) {
      double x = q.at(i, 0), y = q2.at(i, 0);
      q.at(i, 0) = x <= y ? x : y;  // mirrors the tape minimum kernel
    }
  }
  Tensor y = Tensor::zeros({n, 1});
  for (int i = 0; i < n; ++i) {
    y.at(i, 0) = b.r.at(i, 0) + cfg_.gamma * (q.at(i, 0) - cfg_.alpha * next.log_prob.at(i, 0));
  }
  return y;
}

Var SacNetworks::critic_forward(Tape& t, Mlp& q, LatentLift& lift, Var s, Var a, Var z_rows) {
  return q.forward(t, t.concat_cols(t.concat_cols(s, a), lift.forward(t, z_rows)));
}

Var SacNetworks::critic_loss_graph(Tape& t, const Batch& b, Var z_rows, const Tensor& y) {
  Var s = t.constant(b.s);
  Var a = t.constant(b.a);
  Var yv = t.constant(y);
  Var loss = t.mean_all(t.square(t.sub(critic_forward(t, q1_, q1_lift_, s, a, z_rows), yv)));
  if (cfg_.twin_critics) {
    Var loss2 = t.mean_all(t.square(t.sub(critic_forward(t, q2_, q2_lift_, s, a, z_rows), yv)));
    loss = t.add(loss, loss2);
  }
  return loss;
}

Var SacNetworks::actor_loss_graph(Tape& t, const Batch& b, Var z_rows, const Tensor& act_noise) {
  Var s = t.constant(b.s);
  Var input = t.concat_cols(s, actor_lift_.forward(t, z_rows));
  auto sample = actor_.sample(t, input, act_noise);
  Var q = critic_forward(t, q1_, q1_lift_, s, sample.action, z_rows);
  if (cfg_.twin_critics) {
    q = t.minimum(q, critic_forward(t, q2_, q2_lift_, s, sample.action, z_rows));
  }
  return t.mean_all(t.sub(t.mul_scalar(sample.log_prob, cfg_.alpha), q));
}

SacNetworks::EncoderLoss SacNetworks::encoder_loss_graph(Tape& t, const Batch& b,
                                                         const std::vector<Transition>& context,
                                                         const Tensor& z_noise, const Tensor& y) {
  auto post = encoder_.posterior_tape(t, context);
  Var z = encoder_.sample_latent_tape(t, post, z_noise);
  Var z_rows = t.repeat_rows(z, b.size());
  Var critic = critic_loss_graph(t, b, z_rows, y);
  Var kl = encoder_.kl_to_prior_tape(t, post).second;
  return EncoderLoss{t.add(critic, t.mul_scalar(kl, cfg_.beta_kl)), critic, kl};
}

std::vector<double> SacNetworks::sampled_latent_value(const std::vector<Transition>& context,
                                                      const Tensor& z_noise) const {
  PosteriorGaussian post = encoder_.posterior(context);
  return sample_latent(post, z_noise.v);
}

void SacNetworks::soft_update_targets(double tau) {
  if (tau <= 0.0 || tau > 1.0) throw std::runtime_error("sac: tau must be in (0, 1]");
  auto blend = [tau](std::vector<Parameter*> online, std::vector<Parameter*> target) {
    if (online.size() != target.size()) throw std::runtime_error("sac: target param mismatch");
    for (size_t i = 0; i < online.size(); ++i) {
      Tensor& tv = target[i]->value;
      const Tensor& ov = online[i]->value;
      for (size_t j = 0; j < tv.v.size(); ++j) {
        tv.v[j] = (1.0 - tau) * tv.v[j] + tau * ov.v[j];
      }
    }
  };
  blend(q1_.params(), tq1_.params());
  blend(q2_.params(), tq2_.params());
  blend(q1_lift_.all_params(), tq1_lift_.all_params());
  blend(q2_lift_.all_params(), tq2_lift_.all_params());
}

std::vector<Parameter*> SacNetworks::actor_params() {
  std::vector<Parameter*> ps = actor_.params();
  for (Parameter* p : actor_lift_.trainable_params()) ps.push_back(p);
  return ps;
}

std::vector<Parameter*> SacNetworks::critic_params() {
  std::vector<Parameter*> ps = q1_.params();
  for (Parameter* p : q2_.params()) ps.push_back(p);
  for (Parameter* p : q1_lift_.trainable_params()) ps.push_back(p);
  for (Parameter* p : q2_lift_.trainable_params()) ps.push_back(p);
  return ps;
}

std::vector<Parameter*> SacNetworks::encoder_params() { return encoder_.params(); }

std::vector<Parameter*> SacNetworks::target_params() {
  std::vector<Parameter*> ps = tq1_.params();
  for (Parameter* p : tq2_.params()) ps.push_back(p);
  for (Parameter* p : tq1_lift_.all_params()) ps.push_back(p);
  for (Parameter* p : tq2_lift_.all_params()) ps.push_back(p);
  return ps;
}

std::vector<Parameter*> SacNetworks::all_params() {
  std::vector<Parameter*> ps = actor_.params();
  for (Parameter* p : actor_lift_.all_params()) ps.push_back(p);
  for (Parameter* p : q1_.params()) ps.push_back(p);
  for (Parameter* p : q2_.params()) ps.push_back(p);
  for (Parameter* p : q1_lift_.all_params()) ps.push_back(p);
  for (Parameter* p : q2_lift_.all_params()) ps.push_back(p);
  for (Parameter* p : encoder_.params()) ps.push_back(p);
  for (Parameter* p : target_params()) ps.push_back(p);
  return ps;
}

void SacNetworks::zero_all_grads() {
  for (Parameter* p : all_params()) p->zero_grad();
}

// --- SacAgent ----------------------------------------------------------------

SacAgent::SacAgent(const SacConfig& cfg, uint64_t init_seed) {
  Rng rng(mix_seed(0x696e6974ULL, init_seed));
  nets = SacNetworks(cfg, rng);
  AdamConfig opt;
  opt.lr = cfg.lr;
  critic_opt = Adam(nets.critic_params(), opt);
  actor_opt = Adam(nets.actor_params(), opt);
  encoder_opt = Adam(nets.encoder_params(), opt);
}

double SacAgent::critic_update(const Batch& b, const std::vector<double>& z, Rng& noise_rng) {
  Tensor next_noise = noise_matrix(noise_rng, b.size(), nets.cfg().act_dim);
  Tensor y = nets.td_target(b, z, next_noise);
  nets.zero_all_grads();
  Tape t;
  Var z_rows = t.constant(repeat_row(z, b.size()));
  Var loss = nets.critic_loss_graph(t, b, z_rows, y);
  t.backward(loss);
  critic_opt.step();
  return t.scalar(loss);
}

double SacAgent::actor_update(const Batch& b, const std::vector<double>& z, Rng& noise_rng) {
  Tensor act_noise = noise_matrix(noise_rng, b.size(), nets.cfg().act_dim);
  nets.zero_all_grads();
  Tape t;
  Var z_rows = t.constant(repeat_row(z, b.size()));
  Var loss = nets.actor_loss_graph(t, b, z_rows, act_noise);
  t.backward(loss);
  actor_opt.step();
  return t.scalar(loss);
}

std::pair<double, double> SacAgent::encoder_update(const Batch& b,
                                                   const std::vector<Transition>& context,
                                                   Rng& noise_rng) {
  Tensor z_noise = Tensor::zeros({1, nets.cfg().latent_dim});
  for (double& x : z_noise.v) x = noise_rng.normal();
  Tensor next_noise = noise_matrix(noise_rng, b.size(), nets.cfg().act_dim);
  // the TD target uses the same latent draw, detached
  std::vector<double> z_val = nets.sampled_latent_value(context, z_noise);
  Tensor y = nets.td_target(b, z_val, next_noise);
  nets.zero_all_grads();
  Tape t;
  auto parts = nets.encoder_loss_graph(t, b, context, z_noise, y);
  t.backward(parts.total);
  encoder_opt.step();
  return {t.scalar(parts.total), t.scalar(parts.kl)};
}

}  // namespace metarl
