#pragma once

#include <array>
#include <vector>

#include "metarl/env.hpp"
#include "metarl/rng.hpp"

namespace metarl {

/// Per-frame visibility contribution: 2 - exp(-steps_since_seen); a person
/// never seen before contributes exactly 2.
double gaze_reward_vis_contribution(double steps_since_seen);
double gaze_reward_vis_never_seen();
/// 0 when nobody speaks; -0.5 when speakers exist but none is in view;
/// 2 * (speakers in view) otherwise.
double gaze_reward_aud(int speakers_total, int speakers_in_fov);
/// -16 * sqrt(pan^2 + tilt^2).
double gaze_reward_mov(double pan, double tilt);

struct GazeConfig {
  int people = 3;
  double person_jitter = 0.01;        // per-step random-walk sigma, scene units
  double speaker_switch_prob = 0.02;  // chance per step of re-drawing the speaker
  double silence_prob = 0.2;          // chance of silence on each (re-)draw
};

/// Pan/tilt camera over a 2x1 scene with a 0.4x0.3 field of view.
/// Observation layout (996 floats, fixed):
///   [0, 882)    18 landmark heatmaps, 7x7 each, FOV-local; heatmap j at
///               [j*49, (j+1)*49), flattened row-major with row = vertical
///               cell index from the bottom, col = horizontal from the left
///   [882, 994)  audio heatmap, 8 rows x 14 cols over the whole scene,
///               row-major, same row/col convention
///   [994, 996)  head position (x, y) in scene units
/// Heatmap blobs are Gaussians of width half a cell, accumulated per person
/// and clipped to [0, 1]; a landmark outside the FOV contributes nothing.
class GazeEnv : public Environment {
 public:
  static constexpr int kLandmarks = 18;
  static constexpr double kSceneW = 2.0, kSceneH = 1.0;
  static constexpr double kFovW = 0.4, kFovH = 0.3;
  static constexpr double kPanStep = 0.16, kTiltStep = 0.11;

  explicit GazeEnv(GazeConfig cfg = {});

  std::string name() const override { return "gaze"; }
  int obs_dim() const override { return kLandmarks * 49 + 14 * 8 + 2; }
  int act_dim() const override { return 2; }
  int num_components() const override { return 3; }  // {r_vis, r_aud, r_mov}
  std::vector<double> action_scale() const override { return {1.0, 1.0}; }
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(const std::vector<double>& action) override;

  double head_x() const { return head_x_; }
  double head_y() const { return head_y_; }
  int speaker() const { return speaker_; }  // -1 = silence

 private:
  struct Person {
    double x = 0.0, y = 0.0;
    std::array<std::array<double, 2>, kLandmarks> offsets{};  // offsets[0] = nose = (0,0)
    long last_seen = -1;                                      // -1 = never
  };

  GazeConfig cfg_;
  Rng rng_{0};
  std::vector<Person> people_;
  double head_x_ = 1.0, head_y_ = 0.5;
  int speaker_ = -1;
  long step_count_ = 0;
  int warn_budget_ = 5;

  bool in_fov(double x, double y) const;
  std::vector<double> observe() const;
  void draw_speaker();
};

}  // namespace metarl
