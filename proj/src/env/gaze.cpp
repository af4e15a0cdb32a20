#include "metarl/env/gaze.hpp"

#include <cmath>
#include <stdexcept>

namespace metarl {

double gaze_reward_vis_contribution(double steps_since_seen) {
  return 2.0 - std::exp(-steps_since_seen);
}

double gaze_reward_vis_never_seen() { return 2.0; }

double gaze_reward_aud(int speakers_total, int speakers_in_fov) {
  if (speakers_total == 0) return 0.0;
  if (speakers_in_fov == 0) return -0.5;
  return 2.0 * static_cast<double>(speakers_in_fov);
}

double gaze_reward_mov(double pan, double tilt) {
  return -16.0 * std::sqrt(pan * pan + tilt * tilt);
}

GazeEnv::GazeEnv(GazeConfig cfg) : cfg_(cfg) {
  if (cfg_.people < 1) throw std::runtime_error("gaze: need at least one person");
}

bool GazeEnv::in_fov(double x, double y) const {
  return std::fabs(x - head_x_) <= kFovW / 2.0 && std::fabs(y - head_y_) <= kFovH / 2.0;
}

void GazeEnv::draw_speaker() {
  if (rng_.uniform() < cfg_.silence_prob) {
    speaker_ = -1;
  } else {
    speaker_ = static_cast<int>(rng_.uniform_int(static_cast<uint64_t>(cfg_.people)));
  }
}

std::vector<double> GazeEnv::reset(uint64_t seed) {
  rng_ = Rng(mix_seed(0x67617a65ULL, seed));
  head_x_ = 1.0;
  head_y_ = 0.5;
  step_count_ = 0;
  people_.assign(static_cast<size_t>(cfg_.people), Person{});
  for (auto& p : people_) {
    p.x = rng_.uniform(0.0, kSceneW);
    p.y = rng_.uniform(0.0, kSceneH);
    p.offsets[0] = {0.0, 0.0};  // nose anchors the face
    for (int j = 1; j < kLandmarks; ++j) {
      p.offsets[static_cast<size_t>(j)] = {rng_.uniform(-0.08, 0.08), rng_.uniform(-0.08, 0.08)};
    }
    p.last_seen = -1;
  }
  draw_speaker();
  return observe();
}

StepResult GazeEnv::step(const std::vector<double>& action) {
  if (people_.empty()) throw std::runtime_error("gaze: step before reset");
  if (action.size() != 2) throw std::runtime_error("gaze: action must have 2 dimensions");
  double pan = clamp_action(action[0], -1.0, 1.0, "gaze pan", warn_budget_);
  double tilt = clamp_action(action[1], -1.0, 1.0, "gaze tilt", warn_budget_);

  head_x_ += kPanStep * pan;
  head_y_ += kTiltStep * tilt;
  // keep the whole FOV inside the scene
  head_x_ = std::min(std::max(head_x_, kFovW / 2.0), kSceneW - kFovW / 2.0);
  head_y_ = std::min(std::max(head_y_, kFovH / 2.0), kSceneH - kFovH / 2.0);

  for (auto& p : people_) {
    // seeded random walk, reflected at the walls; draws happen even when the
    // jitter scale is zero so "static people" runs stay stream-compatible
    double dx = rng_.normal() * cfg_.person_jitter;
    double dy = rng_.normal() * cfg_.person_jitter;
    p.x += dx;
    p.y += dy;
    if (p.x < 0.0) p.x = -p.x;
    if (p.x > kSceneW) p.x = 2.0 * kSceneW - p.x;
    if (p.y < 0.0) p.y = -p.y;
    if (p.y > kSceneH) p.y = 2.0 * kSceneH - p.y;
  }
  if (rng_.uniform() < cfg_.speaker_switch_prob) draw_speaker();

  ++step_count_;
  double r_vis = 0.0;
  for (auto& p : people_) {
    if (in_fov(p.x, p.y)) {  // the nose landmark sits at the person position
      if (p.last_seen < 0) {
        r_vis += gaze_reward_vis_never_seen();
      } else {
        r_vis += gaze_reward_vis_contribution(static_cast<double>(step_count_ - p.last_seen - 1));
      }
      p.last_seen = step_count_;
    }
  }
  int in_view = 0;
  if (speaker_ >= 0 && in_fov(people_[static_cast<size_t>(speaker_)].x,
                              people_[static_cast<size_t>(speaker_)].y)) {
    in_view = 1;
  }
  double r_aud = gaze_reward_aud(speaker_ >= 0 ? 1 : 0, in_view);
  double r_mov = gaze_reward_mov(pan, tilt);

  return StepResult{observe(), {r_vis, r_aud, r_mov}};
}

std::vector<double> GazeEnv::observe() const {
  std::vector<double> obs(static_cast<size_t>(obs_dim()), 0.0);
  const double cell_w = kFovW / 7.0, cell_h = kFovH / 7.0;
  const double fov_left = head_x_ - kFovW / 2.0, fov_bottom = head_y_ - kFovH / 2.0;
  for (const auto& p : people_) {
    for (int j = 0; j < kLandmarks; ++j) {
      double wx = p.x + p.offsets[static_cast<size_t>(j)][0];
      double wy = p.y + p.offsets[static_cast<size_t>(j)][1];
      if (!in_fov(wx, wy)) continue;
      double u = (wx - fov_left) / cell_w;   // [0, 7) cell coordinates
      double v = (wy - fov_bottom) / cell_h;
      for (int r = 0; r < 7; ++r) {
        for (int c = 0; c < 7; ++c) {
          double du = u - (c + 0.5), dv = v - (r + 0.5);
          obs[static_cast<size_t>(j * 49 + r * 7 + c)] +=
              std::exp(-(du * du + dv * dv) / (2.0 * 0.5 * 0.5));
        }
      }
    }
  }
  for (int i = 0; i < kLandmarks * 49; ++i) {
    if (obs[static_cast<size_t>(i)] > 1.0) obs[static_cast<size_t>(i)] = 1.0;
  }
  int base = kLandmarks * 49;
  if (speaker_ >= 0) {
    const auto& sp = people_[static_cast<size_t>(speaker_)];
    const double acell_w = kSceneW / 14.0, acell_h = kSceneH / 8.0;
    double u = sp.x / acell_w, v = sp.y / acell_h;
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 14; ++c) {
        double du = u - (c + 0.5), dv = v - (r + 0.5);
        double val = std::exp(-(du * du + dv * dv) / (2.0 * 0.5 * 0.5));
        obs[static_cast<size_t>(base + r * 14 + c)] = val > 1.0 ? 1.0 : val;
      }
    }
  }
  obs[static_cast<size_t>(base + 112)] = head_x_;
  obs[static_cast<size_t>(base + 113)] = head_y_;
  return obs;
}

}  // namespace metarl
