#pragma once

// Value-level checks for the reward formulas, task samplers, and environment
// protocols: closed-form points, Monte-Carlo frequency bands, recomputation
// oracles, and the frozen rollouts in golden_traces.hpp. Shared between the
// unit tests and the acceptance harness.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "golden_traces.hpp"
#include "metarl/env/gaze.hpp"
#include "metarl/env/racer.hpp"
#include "metarl/env/socialnav.hpp"
#include "metarl/rng.hpp"
#include "metarl/tasks.hpp"

namespace metarl::examples {

struct ExampleCheck {
  std::string name;
  bool pass = false;
  std::string detail;  // filled in on failure
};

namespace detail {

inline constexpr double kTol = 1e-9;

inline double vec_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline void check_value(std::vector<ExampleCheck>& out, const std::string& name, double got,
                        double want, double tol = kTol) {
  ExampleCheck c{name, std::fabs(got - want) <= tol, ""};
  if (!c.pass) {
    std::ostringstream os;
    os.precision(17);
    os << "got " << got << ", want " << want << " (tol " << tol << ")";
    c.detail = os.str();
  }
  out.push_back(std::move(c));
}

inline void check_true(std::vector<ExampleCheck>& out, const std::string& name, bool ok,
                       const std::string& detail = "") {
  out.push_back(ExampleCheck{name, ok, ok ? "" : detail});
}

// Golden rows store full-precision decimals; allow only round-trip slack.
inline bool near_golden(double got, double want) {
  return std::fabs(got - want) <= 1e-12 * std::max(1.0, std::fabs(want));
}

}  // namespace detail

// --- task sampler ---------------------------------------------------------

inline void task_sampler_examples(std::vector<ExampleCheck>& out) {
  using detail::check_true;
  using detail::check_value;

  {
    Rng rng(1);
    auto w = sample_convex_weights(1, rng);
    check_true(out, "convex weights: m=1 degenerates to (1.0)",
               w.size() == 1 && std::fabs(w[0] - 1.0) <= 1e-12);
  }
  {
    Rng rng(2);
    bool ok = true;
    std::string why;
    for (int m : {2, 3, 5}) {
      for (int rep = 0; rep < 1000 && ok; ++rep) {
        auto w = sample_convex_weights(m, rng);
        double s = detail::vec_sum(w);
        if (std::fabs(s - 1.0) > 1e-12) {
          ok = false;
          why = "sum " + std::to_string(s);
        }
        for (double x : w) {
          if (x < 0.0) {
            ok = false;
            why = "negative entry";
          }
        }
      }
    }
    check_true(out, "convex weights: every sample sums to 1 with entries >= 0", ok, why);
  }
  {
    // symmetry: each coordinate of a uniform simplex sample has mean 1/m
    Rng rng(3);
    const int m = 3, n = 100000;
    std::vector<double> sum(m, 0.0), sumsq(m, 0.0);
    for (int i = 0; i < n; ++i) {
      auto w = sample_convex_weights(m, rng);
      for (int j = 0; j < m; ++j) {
        sum[static_cast<size_t>(j)] += w[static_cast<size_t>(j)];
        sumsq[static_cast<size_t>(j)] += w[static_cast<size_t>(j)] * w[static_cast<size_t>(j)];
      }
    }
    bool ok = true;
    std::string why;
    for (int j = 0; j < m; ++j) {
      double mean = sum[static_cast<size_t>(j)] / n;
      double var = sumsq[static_cast<size_t>(j)] / n - mean * mean;
      double se = std::sqrt(var / n);
      if (std::fabs(mean - 1.0 / m) > 3.0 * se) {
        ok = false;
        why = "coordinate " + std::to_string(j) + " mean " + std::to_string(mean) + " vs " +
              std::to_string(1.0 / m) + " (3se " + std::to_string(3.0 * se) + ")";
      }
    }
    check_true(out, "convex weights: empirical coordinate means hit 1/m within 3 SE", ok, why);
  }
  {
    Rng rng(4);
    const int n = 10000;
    int sigmoids = 0;
    bool depth_ok = true, width_ok = true;
    for (int i = 0; i < n; ++i) {
      auto spec = sample_reward_net(3, rng);
      if (spec.sigmoid) ++sigmoids;
      size_t d = spec.widths.size();
      if (d < 1 || d > 3) depth_ok = false;
      for (int w : spec.widths) {
        if (w < 4 || w > 6) width_ok = false;
      }
    }
    double freq = static_cast<double>(sigmoids) / n;
    check_true(out, "reward net: sigmoid frequency 0.75 +/- 0.02 over 10^4 samples",
               std::fabs(freq - 0.75) <= 0.02, "frequency " + std::to_string(freq));
    check_true(out, "reward net: depth always in {1,2,3}", depth_ok);
    check_true(out, "reward net: hidden widths always in {4,5,6}", width_ok);
  }
  {
    TaskSpec a = sample_task(TaskFamily::reward_net, 3, 77);
    TaskSpec b = sample_task(TaskFamily::reward_net, 3, 77);
    bool same = a.manifest() == b.manifest() && a.net.weights.size() == b.net.weights.size();
    for (size_t l = 0; same && l < a.net.weights.size(); ++l) {
      same = a.net.weights[l].v == b.net.weights[l].v && a.net.biases[l].v == b.net.biases[l].v;
    }
    check_true(out, "reward net: fixed seed reproduces the identical spec", same);
  }
  {
    TaskSpec t;
    t.family = TaskFamily::convex;
    t.weights = {1.0, 0.0, 0.0};
    check_value(out, "task evaluate: vertex weights (1,0,0) pick the first component",
                t.evaluate({5.0, -2.0, 7.0}), 5.0);
    t.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    check_value(out, "task evaluate: uniform weights on constant components return the constant",
                t.evaluate({3.0, 3.0, 3.0}), 3.0);
  }
  {
    // recompute the sampled net's output from its recorded matrices
    TaskSpec t = sample_task(TaskFamily::reward_net, 3, 5);
    Rng rng(6);
    bool ok = true;
    std::string why;
    for (int rep = 0; rep < 20 && ok; ++rep) {
      std::vector<double> x = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                               rng.uniform(-3.0, 3.0)};
      std::vector<double> h = x;
      for (size_t l = 0; l < t.net.weights.size(); ++l) {
        const Tensor& w = t.net.weights[l];
        const Tensor& b = t.net.biases[l];
        std::vector<double> nx(static_cast<size_t>(w.cols()));
        for (int c = 0; c < w.cols(); ++c) {
          double s = b.at(0, c);
          for (int r = 0; r < w.rows(); ++r) s += h[static_cast<size_t>(r)] * w.at(r, c);
          nx[static_cast<size_t>(c)] = l + 1 < t.net.weights.size() && t.net.sigmoid
                                           ? 1.0 / (1.0 + std::exp(-s))
                                           : s;
        }
        h = std::move(nx);
      }
      double got = t.evaluate(x);
      if (std::fabs(got - h[0]) > detail::kTol) {
        ok = false;
        why = "evaluate " + std::to_string(got) + " vs recomputed " + std::to_string(h[0]);
      }
    }
    check_true(out, "task evaluate: net output matches independent forward of recorded weights",
               ok, why);
  }
}

// --- gaze -------------------------------------------------------------------

inline void gaze_examples(std::vector<ExampleCheck>& out) {
  using detail::check_true;
  using detail::check_value;

  {
    GazeEnv a, b;
    auto oa = a.reset(123);
    auto ob = b.reset(123);
    check_true(out, "gaze reset: fixed seed gives the identical observation twice", oa == ob);
    check_true(out, "gaze reset: head starts at the scene center (1.0, 0.5)",
               a.head_x() == 1.0 && a.head_y() == 0.5);
    bool bounded = true;
    for (size_t i = 0; i + 2 < oa.size(); ++i) {
      if (oa[i] < 0.0 || oa[i] > 1.0) bounded = false;
    }
    for (int t = 0; t < 5; ++t) {
      auto res = a.step({0.5, -0.5});
      for (size_t i = 0; i + 2 < res.obs.size(); ++i) {
        if (res.obs[i] < 0.0 || res.obs[i] > 1.0) bounded = false;
      }
    }
    check_true(out, "gaze observation: all heatmap entries stay in [0,1]", bounded);
  }
  {
    GazeConfig cfg;
    cfg.person_jitter = 0.0;  // static people
    GazeEnv env(cfg);
    env.reset(5);
    env.step({0.0, 0.0});
    check_true(out, "gaze step: zero action with static people leaves the head in place",
               env.head_x() == 1.0 && env.head_y() == 0.5);
  }
  {
    // find a seed whose initial configuration has nobody in view; the
    // visibility reward must then be the empty sum
    bool found = false;
    for (uint64_t seed = 0; seed < 64 && !found; ++seed) {
      GazeConfig cfg;
      cfg.person_jitter = 0.0;
      GazeEnv env(cfg);
      env.reset(seed);
      auto res = env.step({0.0, 0.0});
      if (res.components[0] == 0.0) found = true;
    }
    check_true(out, "gaze visibility reward: empty field of view sums to 0", found);
  }
  check_value(out, "gaze visibility: continuously watched person contributes 1",
              gaze_reward_vis_contribution(0.0), 1.0);
  check_value(out, "gaze visibility: person reappearing after a long absence contributes 2",
              gaze_reward_vis_contribution(1000.0), 2.0);
  check_value(out, "gaze visibility: never-seen person contributes 2", gaze_reward_vis_never_seen(),
              2.0);
  check_value(out, "gaze audio: silence scores 0", gaze_reward_aud(0, 0), 0.0);
  check_value(out, "gaze audio: speaker out of view scores -0.5", gaze_reward_aud(1, 0), -0.5);
  check_value(out, "gaze audio: two speakers in view score 4", gaze_reward_aud(2, 2), 4.0);
  check_value(out, "gaze movement: no motion costs 0", gaze_reward_mov(0.0, 0.0), 0.0);
  check_value(out, "gaze movement: full pan costs -16", gaze_reward_mov(1.0, 0.0), -16.0);
  check_value(out, "gaze movement: full pan and tilt cost -16*sqrt(2)", gaze_reward_mov(1.0, 1.0),
              -16.0 * std::sqrt(2.0));
  {
    GazeEnv env;
    env.reset(golden::kGazeSeed);
    bool ok = true;
    std::string why;
    for (int t = 0; t < 10 && ok; ++t) {
      auto act = golden::gaze_action(t);
      auto res = env.step({act[0], act[1]});
      const auto& row = golden::kGaze[static_cast<size_t>(t)];
      double got[6] = {env.head_x(), env.head_y(),      res.components[0],
                       res.components[1], res.components[2], detail::vec_sum(res.obs)};
      double want[6] = {row.head_x, row.head_y, row.r_vis, row.r_aud, row.r_mov, row.obs_sum};
      for (int i = 0; i < 6 && ok; ++i) {
        if (!detail::near_golden(got[i], want[i])) {
          ok = false;
          std::ostringstream os;
          os.precision(17);
          os << "step " << t << " field " << i << ": got " << got[i] << ", want " << want[i];
          why = os.str();
        }
      }
    }
    check_true(out, "gaze rollout: 10 steps reproduce the recorded trace", ok, why);
  }
}

// --- social navigation ------------------------------------------------------

inline void socialnav_examples(std::vector<ExampleCheck>& out) {
  using detail::check_true;
  using detail::check_value;

  {
    SocialNavEnv env;
    env.reset(0);
    check_true(out, "nav reset: robot always starts at (14, 5)",
               env.robot_x() == 14.0 && env.robot_y() == 5.0);
    bool goal_ok = true;
    for (uint64_t seed = 0; seed < 100; ++seed) {
      SocialNavEnv e;
      e.reset(seed);
      if (e.goal_x() < 0.0 || e.goal_x() > 2.0 || e.goal_y() < 0.0 || e.goal_y() > 10.0) {
        goal_ok = false;
      }
    }
    check_true(out, "nav reset: goal stays in x in [0,2], y in [0,10] across seeds", goal_ok);
    SocialNavEnv a, b;
    check_true(out, "nav reset: fixed seed gives the identical state twice",
               a.reset(11) == b.reset(11));
  }
  {
    SocialNavEnv env;
    env.reset(2);
    env.step({0.0, 0.0});
    check_true(out, "nav step: zero action leaves the robot stationary",
               env.robot_x() == 14.0 && env.robot_y() == 5.0 &&
                   std::fabs(std::fabs(env.robot_heading()) - M_PI) <= 1e-12);
  }
  {
    SocialNavEnv env;
    double diag = env.room_diag();
    check_value(out, "nav goal reward: at the goal scores 1", nav_reward_goal(0.0, diag), 1.0);
    check_value(out, "nav goal reward: a full diagonal away scores 0", nav_reward_goal(diag, diag),
                0.0);
    check_value(out, "nav goal reward: half a diagonal scores 0.5",
                nav_reward_goal(diag / 2.0, diag), 0.5);
  }
  check_value(out, "nav collision: clear of the threshold scores 0", nav_reward_collision(0.5, 0.4),
              0.0);
  check_value(out, "nav collision: inside half the threshold scores -1",
              nav_reward_collision(0.2, 0.4), -1.0);
  check_value(out, "nav collision: exactly at the threshold scores 0 (strict inequality)",
              nav_reward_collision(0.4, 0.4), 0.0);
  check_value(out, "nav social: closest human exactly at the threshold scores 0",
              nav_reward_social(1.2, 1.2), 0.0);
  check_value(out, "nav social: half the threshold scores -0.5", nav_reward_social(0.6, 1.2), -0.5);
  check_value(out, "nav social: twice the threshold scores 1", nav_reward_social(2.4, 1.2), 1.0);
  {
    const double th = M_PI / 3.0;
    check_value(out, "nav approach: robot dead ahead scores the full product 1",
                nav_reward_approach({0.0}, th), 1.0);
    check_value(out, "nav approach: robot directly behind scores -1",
                nav_reward_approach({M_PI}, th), -1.0);
    check_value(out, "nav approach: cone boundary scores 0", nav_reward_approach({th}, th), 0.0);
    check_value(out, "nav velocity: everyone behind the cone scores 0",
                nav_reward_velocity(1.0, {th, 2.0}, th), 0.0);
    check_value(out, "nav velocity: stationary robot dead ahead scores -1",
                nav_reward_velocity(0.0, {0.0}, th), -1.0);
    check_value(out, "nav velocity: v=2 dead ahead scores -e^2", nav_reward_velocity(2.0, {0.0}, th),
                -std::exp(2.0));
  }
  {
    SocialNavEnv env;
    env.reset(golden::kNavSeed);
    bool ok = true;
    std::string why;
    for (int t = 0; t < 10 && ok; ++t) {
      auto act = golden::nav_action(t);
      auto res = env.step({act[0], act[1]});
      const auto& row = golden::kNav[static_cast<size_t>(t)];
      double got[9] = {env.robot_x(),     env.robot_y(),     env.robot_heading(),
                       res.components[0], res.components[1], res.components[2],
                       res.components[3], res.components[4], detail::vec_sum(res.obs)};
      double want[9] = {row.x,   row.y,   row.heading, row.r_g,     row.r_c,
                        row.r_s, row.r_a, row.r_v,     row.obs_sum};
      for (int i = 0; i < 9 && ok; ++i) {
        if (!detail::near_golden(got[i], want[i])) {
          ok = false;
          std::ostringstream os;
          os.precision(17);
          os << "step " << t << " field " << i << ": got " << got[i] << ", want " << want[i];
          why = os.str();
        }
      }
    }
    check_true(out, "nav rollout: 10 steps reproduce the recorded trace", ok, why);
  }
}

// --- racer -------------------------------------------------------------------

inline void racer_examples(std::vector<ExampleCheck>& out) {
  using detail::check_true;
  using detail::check_value;

  {
    RacerEnv a, b;
    check_true(out, "racer reset: fixed seed gives the identical state twice",
               a.reset(9) == b.reset(9) && a.x() == b.x() && a.orientation() == b.orientation());
    bool in_range = true;
    for (uint64_t seed = 0; seed < 100; ++seed) {
      RacerEnv e;
      e.reset(seed);
      if (e.x() < 0.0 || e.x() >= 1.0 || e.y() < 0.0 || e.y() >= 1.0) in_range = false;
    }
    check_true(out, "racer reset: position always lands in [0,1)^2", in_range);
    check_true(out, "racer encoding: exactly 120 entries", a.encode().size() == 120);
  }
  {
    RacerEnv env;
    TaskSpec task = sample_task(TaskFamily::racer, 3, 1);
    env.set_task(task.racer);
    env.reset(4);
    double th0 = env.orientation(), x0 = env.x(), y0 = env.y();
    env.step({0.0});
    bool straight = env.orientation() == th0 &&
                    std::fabs(torus_dist(env.x(), env.y(), x0, y0) - env.config().speed) <= 1e-12;
    check_true(out, "racer step: zero action drives straight without turning", straight);
  }
  check_value(out, "racer torus: x = 1.001 wraps to 0.001", wrap_unit(1.001), 0.001);
  check_value(out, "racer reward: distance at a Gaussian mean peaks at 1",
              racer_reward_component(0.3, {{0.3, 0.01}}), 1.0);
  check_value(out, "racer reward: mu=0.3 sigma=0.01 at d=0.4 gives exp(-1)",
              racer_reward_component(0.4, {{0.3, 0.01}}), std::exp(-1.0));
  {
    std::vector<RacerGaussian> two = {{0.2, 0.005}, {0.5, 0.008}};
    double got = racer_reward_component(0.35, two);
    double want = std::max(racer_reward_component(0.35, {two[0]}),
                           racer_reward_component(0.35, {two[1]}));
    check_value(out, "racer reward: two Gaussians take the larger single evaluation", got, want, 0.0);
  }
  check_value(out, "racer total: all components 1 average to 1",
              racer_total_reward({1.0, 1.0, 1.0}), 1.0);
  check_value(out, "racer total: components (1,0,0) average to 1/3",
              racer_total_reward({1.0, 0.0, 0.0}), 1.0 / 3.0);
  {
    RacerEnv env;
    TaskSpec task = sample_task(TaskFamily::racer, 3, 8);
    env.set_task(task.racer);
    env.reset(15);
    auto res = env.step({0.3});
    bool ok = true;
    std::string why;
    for (int k = 0; k < 3; ++k) {
      double d = torus_dist(env.x(), env.y(), env.config().markers[static_cast<size_t>(k)][0],
                            env.config().markers[static_cast<size_t>(k)][1]);
      double want = racer_reward_component(d, task.racer.markers[static_cast<size_t>(k)]);
      if (std::fabs(res.components[static_cast<size_t>(k)] - want) > detail::kTol) {
        ok = false;
        why = "component " + std::to_string(k);
      }
    }
    double total = task.evaluate(res.components);
    double mean = (res.components[0] + res.components[1] + res.components[2]) / 3.0;
    if (std::fabs(total - mean) > detail::kTol) {
      ok = false;
      why = "total vs mean";
    }
    check_true(out, "racer total: random state decomposes into the mean of its components", ok,
               why);
  }
  {
    Rng rng(12);
    const int n = 10000;
    int twos = 0, draws = 0;
    bool mu_ok = true, sigma_ok = true;
    for (int i = 0; i < n; ++i) {
      RacerTask t = sample_racer_task(rng);
      for (const auto& marker : t.markers) {
        ++draws;
        if (marker.size() == 2) ++twos;
        for (const auto& g : marker) {
          if (g.mu < 0.0 || g.mu > 0.7) mu_ok = false;
          if (g.sigma < 0.001 || g.sigma > 0.01) sigma_ok = false;
        }
      }
    }
    double freq = static_cast<double>(twos) / draws;
    check_true(out, "racer tasks: all Gaussian means in [0, 0.7]", mu_ok);
    check_true(out, "racer tasks: all Gaussian widths in [0.001, 0.01]", sigma_ok);
    check_true(out, "racer tasks: two-Gaussian frequency 0.5 +/- 0.02 over 10^4 tasks",
               std::fabs(freq - 0.5) <= 0.02, "frequency " + std::to_string(freq));
  }
  {
    RacerEnv env;
    TaskSpec task = sample_task(TaskFamily::racer, 3, golden::kRacerTaskSeed);
    env.set_task(task.racer);
    env.reset(golden::kRacerSeed);
    bool ok = true;
    std::string why;
    size_t row_idx = 0;
    for (int t = 0; t < 200 && ok; ++t) {
      auto res = env.step({golden::racer_action(t)});
      if ((t + 1) % 20 != 0) continue;
      const auto& row = golden::kRacer[row_idx++];
      double got[7] = {env.x(),           env.y(),           env.orientation(), res.components[0],
                       res.components[1], res.components[2], detail::vec_sum(res.obs)};
      double want[7] = {row.x, row.y, row.orientation, row.c1, row.c2, row.c3, row.enc_sum};
      for (int i = 0; i < 7 && ok; ++i) {
        if (!detail::near_golden(got[i], want[i])) {
          ok = false;
          std::ostringstream os;
          os.precision(17);
          os << "step " << t << " field " << i << ": got " << got[i] << ", want " << want[i];
          why = os.str();
        }
      }
    }
    check_true(out, "racer rollout: 200 steps reproduce the recorded trace", ok, why);
  }
}

inline std::vector<ExampleCheck> run_reward_examples() {
  std::vector<ExampleCheck> out;
  task_sampler_examples(out);
  gaze_examples(out);
  socialnav_examples(out);
  racer_examples(out);
  return out;
}

}  // namespace metarl::examples
