#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "metarl/env/gaze.hpp"
#include "metarl/env/racer.hpp"
#include "metarl/env/socialnav.hpp"
#include "metarl/tasks.hpp"
#include "reward_examples.hpp"

using namespace metarl;

TEST_CASE("reward formula and sampler examples all pass") {
  auto checks = examples::run_reward_examples();
  CHECK(checks.size() > 40);
  for (const auto& c : checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("gaze head clamping keeps the field of view inside the scene") {
  GazeEnv env;
  env.reset(1);
  for (int t = 0; t < 40; ++t) {
    env.step({1.0, 1.0});
    CHECK(env.head_x() >= GazeEnv::kFovW / 2.0);
    CHECK(env.head_x() <= GazeEnv::kSceneW - GazeEnv::kFovW / 2.0);
    CHECK(env.head_y() >= GazeEnv::kFovH / 2.0);
    CHECK(env.head_y() <= GazeEnv::kSceneH - GazeEnv::kFovH / 2.0);
  }
  for (int t = 0; t < 40; ++t) {
    env.step({-1.0, -1.0});
  }
  CHECK(env.head_x() == GazeEnv::kFovW / 2.0);
  CHECK(env.head_y() == GazeEnv::kFovH / 2.0);
}

TEST_CASE("gaze component signs and audio support") {
  GazeEnv env;
  env.reset(3);
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    auto res = env.step({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    CHECK(res.components[0] >= 0.0);
    CHECK(res.components[2] <= 0.0);
    double aud = res.components[1];
    bool valid = aud == 0.0 || aud == -0.5 ||
                 (aud > 0.0 && std::fabs(aud / 2.0 - std::round(aud / 2.0)) == 0.0);
    CHECK(valid);
  }
}

TEST_CASE("gaze rejects bad construction and stray actions") {
  GazeConfig cfg;
  cfg.people = 0;
  CHECK_THROWS(GazeEnv{cfg});
  GazeEnv env;
  CHECK_THROWS(env.step({0.0, 0.0}));  // before reset
  env.reset(0);
  CHECK_THROWS(env.step({0.0}));  // wrong arity
  auto res = env.step({5.0, 0.0});  // clamped, not fatal
  CHECK(res.components[2] == doctest::Approx(-16.0));
}

TEST_CASE("socialnav humans rarely interpenetrate") {
  // statistical containment: across 10 000 steps, pairs of humans come within
  // 0.2 m on at most 1% of steps
  int steps = 0, close_steps = 0;
  Rng rng(5);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    SocialNavEnv env;
    env.reset(seed);
    for (int t = 0; t < 200; ++t) {
      env.step({rng.uniform(-3.0, 3.0), rng.uniform(-1.5, 1.5)});
      const auto& hs = env.humans();
      bool close = false;
      for (size_t i = 0; i < hs.size(); ++i) {
        for (size_t j = i + 1; j < hs.size(); ++j) {
          double dx = hs[i].x - hs[j].x, dy = hs[i].y - hs[j].y;
          if (dx * dx + dy * dy < 0.2 * 0.2) close = true;
        }
      }
      ++steps;
      if (close) ++close_steps;
    }
  }
  CHECK(steps == 10000);
  CHECK(close_steps <= steps / 100);
}

TEST_CASE("socialnav component ranges over random rollouts") {
  Rng rng(17);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    SocialNavEnv env;
    env.reset(seed);
    for (int t = 0; t < 100; ++t) {
      auto res = env.step({rng.uniform(-15.0, 15.0), rng.uniform(-2.0, 2.0)});
      CHECK(res.components[0] <= 1.0);
      CHECK(res.components[0] >= 0.0);  // robot and goal both inside the room
      CHECK((res.components[1] == 0.0 || res.components[1] == -1.0));
      CHECK(res.components[3] >= -1.0);
      CHECK(res.components[3] <= 1.0);
      CHECK(res.components[4] <= 0.0);
    }
  }
}

TEST_CASE("socialnav components recompute from the public state") {
  SocialNavEnv env;
  env.reset(21);
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    double omega = rng.uniform(-10.0, 10.0), v = rng.uniform(-2.0, 2.0);
    auto res = env.step({omega, v});
    const auto& cfg = env.config();
    double dgx = env.robot_x() - env.goal_x(), dgy = env.robot_y() - env.goal_y();
    CHECK(res.components[0] ==
          doctest::Approx(nav_reward_goal(std::sqrt(dgx * dgx + dgy * dgy), env.room_diag()))
              .epsilon(1e-12));
    double dmin = 1e300;
    std::vector<double> thetas;
    for (const auto& h : env.humans()) {
      double dx = env.robot_x() - h.x, dy = env.robot_y() - h.y;
      dmin = std::min(dmin, std::sqrt(dx * dx + dy * dy));
      double speed = std::sqrt(h.vx * h.vx + h.vy * h.vy);
      double mx = speed > 0.05 ? h.vx / speed : std::cos(h.orientation);
      double my = speed > 0.05 ? h.vy / speed : std::sin(h.orientation);
      double bn = std::sqrt(dx * dx + dy * dy);
      double c = bn < 1e-9 ? 1.0 : std::min(std::max((mx * dx + my * dy) / bn, -1.0), 1.0);
      thetas.push_back(bn < 1e-9 ? 0.0 : std::acos(c));
    }
    CHECK(res.components[1] == nav_reward_collision(dmin, cfg.d_c));
    CHECK(res.components[2] == doctest::Approx(nav_reward_social(dmin, cfg.d_s)).epsilon(1e-12));
    CHECK(res.components[3] ==
          doctest::Approx(nav_reward_approach(thetas, cfg.theta_th)).epsilon(1e-12));
    CHECK(res.components[4] ==
          doctest::Approx(nav_reward_velocity(v, thetas, cfg.theta_th)).epsilon(1e-12));
  }
}

TEST_CASE("racer encoding peaks at the nearest grid point and stays in (0,1]") {
  RacerEnv env;
  Rng rng(33);
  for (int rep = 0; rep < 50; ++rep) {
    env.reset(static_cast<uint64_t>(rep));
    auto enc = env.encode();
    REQUIRE(enc.size() == 120);
    for (double e : enc) {
      CHECK(e > 0.0);
      CHECK(e <= 1.0);
    }
    // the strongest position activation sits on the wrapped-nearest center
    int best = 0;
    for (int i = 1; i < 100; ++i) {
      if (enc[static_cast<size_t>(i)] > enc[static_cast<size_t>(best)]) best = i;
    }
    int bx = best / 10, by = best % 10;
    double dbest = torus_dist(env.x(), env.y(), bx / 10.0, by / 10.0);
    for (int gx = 0; gx < 10; ++gx) {
      for (int gy = 0; gy < 10; ++gy) {
        CHECK(dbest <= torus_dist(env.x(), env.y(), gx / 10.0, gy / 10.0) + 1e-12);
      }
    }
  }
}

TEST_CASE("torus distance is symmetric and bounded") {
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    double ax = rng.uniform(), ay = rng.uniform(), bx = rng.uniform(), by = rng.uniform();
    double d1 = torus_dist(ax, ay, bx, by), d2 = torus_dist(bx, by, ax, ay);
    CHECK(d1 == d2);
    CHECK(d1 <= std::sqrt(2.0) / 2.0 + 1e-12);
    CHECK(d1 >= 0.0);
  }
}

TEST_CASE("racer guards: task required, arity checked, empty marker rejected") {
  RacerEnv env;
  env.reset(0);
  CHECK_THROWS(env.step({0.0}));  // no task yet
  TaskSpec t = sample_task(TaskFamily::racer, 3, 0);
  env.set_task(t.racer);
  CHECK_THROWS(env.step({0.0, 0.0}));
  CHECK_THROWS(racer_reward_component(0.1, {}));
  CHECK_THROWS(racer_total_reward({1.0, 1.0}));
}

TEST_CASE("convex family reward stays between component extremes") {
  Rng task_rng(0);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    TaskSpec t = sample_task(TaskFamily::convex, 5, seed);
    Rng rng(seed + 100);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> comps;
      for (int i = 0; i < 5; ++i) comps.push_back(rng.uniform(-4.0, 4.0));
      double r = t.evaluate(comps);
      double lo = *std::min_element(comps.begin(), comps.end());
      double hi = *std::max_element(comps.begin(), comps.end());
      CHECK(r >= lo - 1e-12);
      CHECK(r <= hi + 1e-12);
    }
  }
}

TEST_CASE("train and test task seed ranges stay disjoint") {
  auto train = train_task_seeds(100);
  auto test = test_task_seeds(20);
  std::set<uint64_t> all(train.begin(), train.end());
  for (uint64_t s : test) CHECK(all.insert(s).second);
  // explicit duplicates are rejected
  std::vector<uint64_t> bad = {1, 2, 1};
  CHECK_THROWS(make_task_set(TaskFamily::convex, 3, bad));
  auto tasks = make_task_set(TaskFamily::convex, 3, train);
  CHECK(tasks.size() == 100);
}

TEST_CASE("task evaluation rejects component count mismatches") {
  TaskSpec t = sample_task(TaskFamily::convex, 3, 0);
  CHECK_THROWS(t.evaluate({1.0, 2.0}));
  TaskSpec n = sample_task(TaskFamily::reward_net, 3, 0);
  CHECK_THROWS(n.evaluate({1.0, 2.0, 3.0, 4.0}));
  Rng rng(0);
  CHECK_THROWS(sample_convex_weights(0, rng));
}

TEST_CASE("task manifests identify the family and reproduce deterministically") {
  TaskSpec c = sample_task(TaskFamily::convex, 3, 4);
  CHECK(c.manifest().find("family=convex") == 0);
  CHECK(c.manifest() == sample_task(TaskFamily::convex, 3, 4).manifest());
  TaskSpec r = sample_task(TaskFamily::racer, 3, 4);
  CHECK(r.manifest().find("marker0=") != std::string::npos);
  CHECK(r.num_components() == 3);
}
