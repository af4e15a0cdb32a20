#include "metarl/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "metarl/scalar_ops.hpp"

namespace metarl {

PosteriorGaussian product_of_gaussians(const std::vector<GaussianFactor>& factors) {
  if (factors.empty()) {
    throw std::runtime_error("product_of_gaussians: empty factor list (use the prior instead)");
  }
  size_t d = factors[0].mean.size();
  for (const auto& f : factors) {
    if (f.mean.size() != d || f.var.size() != d) {
      throw std::runtime_error("product_of_gaussians: inconsistent factor dimensions");
    }
    for (double v : f.var) {
      if (!(v > 0.0)) throw std::runtime_error("product_of_gaussians: factor variance must be > 0");
    }
  }
  PosteriorGaussian post;
  post.mean.assign(d, 0.0);
  post.var.assign(d, 0.0);
  for (size_t i = 0; i < d; ++i) {
    double prec_sum = 0.0, weighted_mean_sum = 0.0;
    for (const auto& f : factors) {
      double prec = 1.0 / f.var[i];
      prec_sum += prec;
      weighted_mean_sum += f.mean[i] * prec;
    }
    double pv = 1.0 / prec_sum;
    post.var[i] = pv;
    post.mean[i] = pv * weighted_mean_sum;
  }
  return post;
}

std::vector<double> sample_latent(const PosteriorGaussian& post,
                                  const std::vector<double>& noise) {
  if (noise.size() != post.mean.size()) {
    throw std::runtime_error("sample_latent: noise dimension mismatch");
  }
  std::vector<double> z(post.mean.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = post.mean[i] + std::sqrt(post.var[i]) * noise[i];
  return z;
}

std::pair<std::vector<double>, double> kl_to_prior(const PosteriorGaussian& post) {
  std::vector<double> per_dim(post.mean.size());
  double total = 0.0;
  for (size_t i = 0; i < per_dim.size(); ++i) {
    double m = post.mean[i], v = post.var[i];
    per_dim[i] = 0.5 * ((m * m + v) - (std::log(v) + 1.0));
    total += per_dim[i];
  }
  return {per_dim, total};
}

// ---------------------------------------------------------------------------

TaskEncoder::TaskEncoder(std::string name, int state_dim, int act_dim, std::vector<int> hidden,
                         int latent_dim, Rng& rng)
    : state_dim_(state_dim),
      act_dim_(act_dim),
      latent_dim_(latent_dim),
      trunk_(std::move(name),
             MlpSpec{2 * state_dim + act_dim + 1, std::move(hidden), 2 * latent_dim}, rng) {
  if (state_dim <= 0 || act_dim <= 0 || latent_dim <= 0) {
    throw std::runtime_error("encoder: dimensions must be positive");
  }
}

void TaskEncoder::check_transition(const Transition& c) const {
  if (static_cast<int>(c.s.size()) != state_dim_ ||
      static_cast<int>(c.s_next.size()) != state_dim_ ||
      static_cast<int>(c.a.size()) != act_dim_) {
    throw std::runtime_error("encoder '" + trunk_.name() + "': transition dims (s=" +
                             std::to_string(c.s.size()) + ", a=" + std::to_string(c.a.size()) +
                             ", s'=" + std::to_string(c.s_next.size()) + ") do not match (" +
                             std::to_string(state_dim_) + ", " + std::to_string(act_dim_) + ", " +
                             std::to_string(state_dim_) + ")");
  }
}

Tensor TaskEncoder::context_matrix(const std::vector<Transition>& context) const {
  if (context.empty()) throw std::runtime_error("encoder: empty context");
  Tensor x = Tensor::zeros({static_cast<int>(context.size()), input_dim()});
  for (size_t n = 0; n < context.size(); ++n) {
    const Transition& c = context[n];
    check_transition(c);
    int col = 0;
    for (double v : c.s) x.at(static_cast<int>(n), col++) = v;
    for (double v : c.a) x.at(static_cast<int>(n), col++) = v;
    x.at(static_cast<int>(n), col++) = c.r;
    for (double v : c.s_next) x.at(static_cast<int>(n), col++) = v;
  }
  return x;
}

GaussianFactor TaskEncoder::encode_transition(const Transition& c) const {
  return encode_context({c})[0];
}

std::vector<GaussianFactor> TaskEncoder::encode_context(
    const std::vector<Transition>& context) const {
  Tensor out = trunk_.forward_nograd(context_matrix(context));
  std::vector<GaussianFactor> factors(context.size());
  for (int n = 0; n < out.rows(); ++n) {
    GaussianFactor& f = factors[static_cast<size_t>(n)];
    f.mean.resize(static_cast<size_t>(latent_dim_));
    f.var.resize(static_cast<size_t>(latent_dim_));
    for (int i = 0; i < latent_dim_; ++i) {
      f.mean[static_cast<size_t>(i)] = out.at(n, i);
      f.var[static_cast<size_t>(i)] = stable_softplus(out.at(n, latent_dim_ + i)) + kVarFloor;
    }
  }
  return factors;
}

PosteriorGaussian TaskEncoder::posterior(const std::vector<Transition>& context) const {
  return product_of_gaussians(encode_context(context));
}

std::vector<double> TaskEncoder::posterior_mean_estimate(
    const std::vector<Transition>& context) const {
  auto factors = encode_context(context);
  std::vector<double> z_hat(static_cast<size_t>(latent_dim_), 0.0);
  for (const auto& f : factors) {
    for (int i = 0; i < latent_dim_; ++i) z_hat[static_cast<size_t>(i)] += f.mean[static_cast<size_t>(i)];
  }
  for (auto& v : z_hat) v /= static_cast<double>(factors.size());
  return z_hat;
}

TaskEncoder::TapePosterior TaskEncoder::posterior_tape(Tape& t,
                                                       const std::vector<Transition>& context) {
  Var out = trunk_.forward(t, t.constant(context_matrix(context)));
  Var means = t.slice_cols(out, 0, latent_dim_);                      // [N, d]
  Var raw_var = t.slice_cols(out, latent_dim_, latent_dim_);          // [N, d]
  Var vars = t.add_scalar(t.softplus(raw_var), kVarFloor);            // [N, d]
  Var prec = t.reciprocal(vars);                                      // [N, d]
  Var prec_sum = t.sum_rows(prec);                                    // [1, d]
  Var weighted_mean_sum = t.sum_rows(t.mul(means, prec));             // [1, d]
  Var post_var = t.reciprocal(prec_sum);
  Var post_mean = t.mul(post_var, weighted_mean_sum);
  return TapePosterior{post_mean, post_var};
}

Var TaskEncoder::sample_latent_tape(Tape& t, const TapePosterior& post, const Tensor& noise) {
  if (noise.rows() != 1 || noise.cols() != latent_dim_) {
    throw std::runtime_error("sample_latent_tape: noise must be [1," +
                             std::to_string(latent_dim_) + "], got " + shape_str(noise.shape));
  }
  return t.add(post.mean, t.mul(t.sqrt(post.var), t.constant(noise)));
}

std::pair<Var, Var> TaskEncoder::kl_to_prior_tape(Tape& t, const TapePosterior& post) {
  Var a = t.add(t.square(post.mean), post.var);
  Var b = t.add_scalar(t.log(post.var), 1.0);
  Var per_dim = t.mul_scalar(t.sub(a, b), 0.5);
  return {per_dim, t.sum_all(per_dim)};
}

}  // namespace metarl
