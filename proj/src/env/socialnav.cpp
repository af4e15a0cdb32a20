#include "metarl/env/socialnav.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace metarl {

double nav_reward_goal(double dist, double diag) { return 1.0 - dist / diag; }

double nav_reward_collision(double min_dist, double d_c) { return min_dist < d_c ? -1.0 : 0.0; }

double nav_reward_social(double min_dist, double d_s) { return min_dist / d_s - 1.0; }

double nav_visible(double theta, double theta_th) {
  if (theta < theta_th) return 1.0 - theta / theta_th;
  return -(theta - theta_th) / (M_PI - theta_th);
}

double nav_direction(double theta, double theta_th) {
  if (theta < theta_th) return 1.0 - theta / (M_PI / 2.0);
  return 1.0;
}

double nav_reward_approach(const std::vector<double>& thetas, double theta_th) {
  if (thetas.empty()) throw std::runtime_error("nav approach reward: no humans");
  double best = 1e300;
  for (double th : thetas) best = std::min(best, nav_visible(th, theta_th) * nav_direction(th, theta_th));
  return best;
}

double nav_reward_velocity(double speed, const std::vector<double>& thetas, double theta_th) {
  if (thetas.empty()) throw std::runtime_error("nav velocity reward: no humans");
  double best = 1e300;
  for (double th : thetas) {
    double r = th < theta_th ? -std::exp(speed) * (1.0 - th / theta_th) : 0.0;
    best = std::min(best, r);
  }
  return best;
}

SocialNavEnv::SocialNavEnv(NavConfig cfg) : cfg_(cfg) {
  if (cfg_.humans < 1) throw std::runtime_error("socialnav: need at least one human");
}

double SocialNavEnv::room_diag() const { return std::sqrt(kRoomW * kRoomW + kRoomH * kRoomH); }

std::vector<double> SocialNavEnv::reset(uint64_t seed) {
  rng_ = Rng(mix_seed(0x6e617669ULL, seed));
  rx_ = 14.0;
  ry_ = 5.0;
  rth_ = M_PI;
  rv_ = 0.0;
  gx_ = rng_.uniform(0.0, 2.0);
  gy_ = rng_.uniform(0.0, 10.0);
  humans_.assign(static_cast<size_t>(cfg_.humans), NavHuman{});
  for (size_t i = 0; i < humans_.size(); ++i) {
    // uniform placement with >= 1 m mutual separation
    for (int attempt = 0; attempt < 1000; ++attempt) {
      double x = rng_.uniform(0.0, kRoomW);
      double y = rng_.uniform(0.0, kRoomH);
      bool ok = true;
      for (size_t j = 0; j < i; ++j) {
        double dx = x - humans_[j].x, dy = y - humans_[j].y;
        if (dx * dx + dy * dy < 1.0) {
          ok = false;
          break;
        }
      }
      if (ok) {
        humans_[i].x = x;
        humans_[i].y = y;
        break;
      }
      if (attempt == 999) throw std::runtime_error("socialnav: failed to place humans");
    }
    humans_[i].wp_x = rng_.uniform(0.0, kRoomW);
    humans_[i].wp_y = rng_.uniform(0.0, kRoomH);
    humans_[i].vx = 0.0;
    humans_[i].vy = 0.0;
    humans_[i].orientation =
        std::atan2(humans_[i].wp_y - humans_[i].y, humans_[i].wp_x - humans_[i].x);
  }
  return observe();
}

void SocialNavEnv::step_humans() {
  // forces from a frozen snapshot of positions, then a synchronous update
  std::vector<std::array<double, 2>> forces(humans_.size());
  for (size_t i = 0; i < humans_.size(); ++i) {
    NavHuman& h = humans_[i];
    double dx = h.wp_x - h.x, dy = h.wp_y - h.y;
    double d = std::sqrt(dx * dx + dy * dy);
    double ux = d > 1e-9 ? dx / d : 0.0, uy = d > 1e-9 ? dy / d : 0.0;
    double fx = (ux * cfg_.desired_speed - h.vx) / cfg_.relax_time;
    double fy = (uy * cfg_.desired_speed - h.vy) / cfg_.relax_time;
    auto repel = [&](double ox, double oy) {
      double rx = h.x - ox, ry = h.y - oy;
      double dist = std::sqrt(rx * rx + ry * ry);
      if (dist < 1e-9) return;
      double mag = cfg_.rep_A * std::exp(-dist / cfg_.rep_B);
      fx += mag * rx / dist;
      fy += mag * ry / dist;
    };
    for (size_t j = 0; j < humans_.size(); ++j) {
      if (j != i) repel(humans_[j].x, humans_[j].y);
    }
    repel(rx_, ry_);
    // wall repulsion along the inward normals
    fx += cfg_.rep_A * std::exp(-h.x / cfg_.rep_B);
    fx -= cfg_.rep_A * std::exp(-(kRoomW - h.x) / cfg_.rep_B);
    fy += cfg_.rep_A * std::exp(-h.y / cfg_.rep_B);
    fy -= cfg_.rep_A * std::exp(-(kRoomH - h.y) / cfg_.rep_B);
    forces[i] = {fx, fy};
  }
  for (size_t i = 0; i < humans_.size(); ++i) {
    NavHuman& h = humans_[i];
    h.vx += forces[i][0] * cfg_.dt;
    h.vy += forces[i][1] * cfg_.dt;
    double speed = std::sqrt(h.vx * h.vx + h.vy * h.vy);
    if (speed > cfg_.v_max) {
      h.vx *= cfg_.v_max / speed;
      h.vy *= cfg_.v_max / speed;
    }
    h.x = std::min(std::max(h.x + h.vx * cfg_.dt, 0.0), kRoomW);
    h.y = std::min(std::max(h.y + h.vy * cfg_.dt, 0.0), kRoomH);
    if (speed > 0.05) h.orientation = std::atan2(h.vy, h.vx);
    double dwx = h.wp_x - h.x, dwy = h.wp_y - h.y;
    if (dwx * dwx + dwy * dwy < 0.3 * 0.3) {
      h.wp_x = rng_.uniform(0.0, kRoomW);
      h.wp_y = rng_.uniform(0.0, kRoomH);
    }
  }
}

std::vector<double> SocialNavEnv::human_thetas() const {
  std::vector<double> thetas;
  thetas.reserve(humans_.size());
  for (const auto& h : humans_) {
    double speed = std::sqrt(h.vx * h.vx + h.vy * h.vy);
    double mx, my;  // human motion direction
    if (speed > 0.05) {
      mx = h.vx / speed;
      my = h.vy / speed;
    } else {
      mx = std::cos(h.orientation);
      my = std::sin(h.orientation);
    }
    double bx = rx_ - h.x, by = ry_ - h.y;  // bearing human -> robot
    double bn = std::sqrt(bx * bx + by * by);
    if (bn < 1e-9) {
      thetas.push_back(0.0);
      continue;
    }
    double c = (mx * bx + my * by) / bn;
    c = std::min(std::max(c, -1.0), 1.0);
    thetas.push_back(std::acos(c));
  }
  return thetas;
}

StepResult SocialNavEnv::step(const std::vector<double>& action) {
  if (humans_.empty()) throw std::runtime_error("socialnav: step before reset");
  if (action.size() != 2) throw std::runtime_error("socialnav: action must have 2 dimensions");
  double omega = clamp_action(action[0], -cfg_.omega_max, cfg_.omega_max, "socialnav angular velocity",
                              warn_budget_);
  double v = clamp_action(action[1], -cfg_.v_max, cfg_.v_max, "socialnav linear velocity",
                          warn_budget_);
  rth_ += omega * cfg_.dt;
  rth_ = std::atan2(std::sin(rth_), std::cos(rth_));
  rx_ = std::min(std::max(rx_ + v * std::cos(rth_) * cfg_.dt, 0.0), kRoomW);
  ry_ = std::min(std::max(ry_ + v * std::sin(rth_) * cfg_.dt, 0.0), kRoomH);
  rv_ = v;

  step_humans();

  double dgx = rx_ - gx_, dgy = ry_ - gy_;
  double r_g = nav_reward_goal(std::sqrt(dgx * dgx + dgy * dgy), room_diag());
  double dmin = 1e300;
  for (const auto& h : humans_) {
    double dx = rx_ - h.x, dy = ry_ - h.y;
    dmin = std::min(dmin, std::sqrt(dx * dx + dy * dy));
  }
  double r_c = nav_reward_collision(dmin, cfg_.d_c);
  double r_s = nav_reward_social(dmin, cfg_.d_s);
  auto thetas = human_thetas();
  double r_a = nav_reward_approach(thetas, cfg_.theta_th);
  double r_v = nav_reward_velocity(v, thetas, cfg_.theta_th);

  return StepResult{observe(), {r_g, r_c, r_s, r_a, r_v}};
}

std::vector<double> SocialNavEnv::observe() const {
  std::vector<double> obs;
  obs.reserve(static_cast<size_t>(obs_dim()));
  obs.push_back(rx_);
  obs.push_back(ry_);
  obs.push_back(rth_);
  obs.push_back(rv_);
  obs.push_back(gx_);
  obs.push_back(gy_);
  for (const auto& h : humans_) {
    obs.push_back(h.x - rx_);
    obs.push_back(h.y - ry_);
    obs.push_back(h.vx);
    obs.push_back(h.vy);
    obs.push_back(h.orientation);
  }
  return obs;
}

}  // namespace metarl
