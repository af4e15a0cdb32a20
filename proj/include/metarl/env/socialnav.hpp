#pragma once

#include <vector>

#include "metarl/env.hpp"
#include "metarl/rng.hpp"

namespace metarl {

// Pure reward components (all angles in radians, theta in [0, pi]).
double nav_reward_goal(double dist, double diag);
double nav_reward_collision(double min_dist, double d_c);
double nav_reward_social(double min_dist, double d_s);
/// 1 - theta/theta_th inside the cone, else -(theta - theta_th)/(pi - theta_th).
double nav_visible(double theta, double theta_th);
/// 1 - theta/(pi/2) inside the cone, else 1.
double nav_direction(double theta, double theta_th);
/// min over humans of visible * direction.
double nav_reward_approach(const std::vector<double>& thetas, double theta_th);
/// min over humans of (-e^v * (1 - theta/theta_th) inside the cone, else 0).
double nav_reward_velocity(double speed, const std::vector<double>& thetas, double theta_th);

struct NavConfig {
  double dt = 0.1;
  double d_c = 0.4;
  double d_s = 1.2;
  double theta_th = M_PI / 3.0;
  double desired_speed = 1.3;
  double relax_time = 0.5;
  double rep_A = 2.0;  // agent-agent and agent-wall repulsion strength
  double rep_B = 0.3;  // repulsion range, metres
  int humans = 5;
  double omega_max = 15.0;
  double v_max = 2.0;
};

struct NavHuman {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double orientation = 0.0;
  double wp_x = 0.0, wp_y = 0.0;  // current waypoint
};

/// Unicycle robot in a 15x10 m room among social-force pedestrians.
/// Observation layout (31 floats, fixed):
///   [0..5]  robot x, y, heading, executed linear velocity, goal x, goal y
///   then per human (5 entries each, humans in fixed index order):
///   relative x, relative y, velocity x, velocity y, orientation
/// Reward components: {R_goal, R_collision, R_social, R_approach, R_velocity}.
class SocialNavEnv : public Environment {
 public:
  static constexpr double kRoomW = 15.0, kRoomH = 10.0;

  explicit SocialNavEnv(NavConfig cfg = {});

  std::string name() const override { return "socialnav"; }
  int obs_dim() const override { return 6 + 5 * cfg_.humans; }
  int act_dim() const override { return 2; }  // [angular, linear]
  int num_components() const override { return 5; }
  std::vector<double> action_scale() const override { return {cfg_.omega_max, cfg_.v_max}; }
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(const std::vector<double>& action) override;

  double robot_x() const { return rx_; }
  double robot_y() const { return ry_; }
  double robot_heading() const { return rth_; }
  double goal_x() const { return gx_; }
  double goal_y() const { return gy_; }
  const std::vector<NavHuman>& humans() const { return humans_; }
  const NavConfig& config() const { return cfg_; }
  double room_diag() const;

 private:
  NavConfig cfg_;
  Rng rng_{0};
  double rx_ = 14.0, ry_ = 5.0, rth_ = M_PI, rv_ = 0.0;
  double gx_ = 0.0, gy_ = 0.0;
  std::vector<NavHuman> humans_;
  int warn_budget_ = 5;

  std::vector<double> observe() const;
  std::vector<double> human_thetas() const;
  void step_humans();
};

}  // namespace metarl
