#pragma once

// Frozen reference rollouts for the three environments under the fixed
// action schedules below. Each row records agent state, reward components,
// and an observation checksum after one step. Regenerate only when the
// environment dynamics are intentionally changed.

#include <array>
#include <cmath>
#include <cstdint>

namespace metarl::golden {

inline constexpr uint64_t kGazeSeed = 23;
inline std::array<double, 2> gaze_action(int t) {
  return {std::sin(0.7 * t + 0.3), std::cos(1.1 * t)};
}
struct GazeRow {
  double head_x, head_y, r_vis, r_aud, r_mov, obs_sum;
};
inline constexpr std::array<GazeRow, 10> kGaze{{
    {1.0472832330658144, 0.60999999999999999, 4, 2, -16.684035521766344, 58.652970039642007},
    {1.1819185906350778, 0.65989557335681348, 2, 2, -15.29505318949071, 43.51196057154462},
    {1.3405849603074727, 0.59516045045872545, 0, -0.5, -18.450245561859965, 4.2468282696955706},
    {1.4486590691956569, 0.48653767576875029, 0, -0.5, -19.14235883820076, 3.4615810787797416},
    {1.4553119751849835, 0.45273106007112418, 0, -0.5, -4.9621271427822373, 3.4500269037245506},
    {1.3574147126341485, 0.53068473524316273, 0, -0.5, -14.98016119712808, 3.4310553301030189},
    {1.2010098938077329, 0.63521032035860092, 1.9816843611112658, -0.5, -21.812331835436947, 37.134373726198262},
    {1.0596571488925084, 0.6520814451827659, 2.9932620530009144, 2, -14.346707343119755, 59.617683776743654},
    {0.99983688251967051, 0.56286121363598374, 2, 2, -14.289851060064832, 56.236956822287333},
    {1.049683500681811, 0.46505018684719401, 1, 2, -15.075013941428713, 20.345804151387018},
}};

inline constexpr uint64_t kNavSeed = 7;
inline std::array<double, 2> nav_action(int t) {
  return {3.0 * std::sin(0.9 * t), 1.5 * std::cos(0.4 * t)};
}
struct NavRow {
  double x, y, heading, r_g, r_c, r_s, r_a, r_v, obs_sum;
};
inline constexpr std::array<NavRow, 10> kNav{{
    {13.85, 5, 3.1415926535897931, 0.24283542169165406, -1, -0.67181258094258545, -0.64962721979066085, -3.5312784856705015, 16.769962820026667},
    {13.715638184119756, 4.9678308701777754, -2.9065945807015487, 0.24973054003472672, -1, -0.6748269565592766, -0.62861398950660663, -3.1623559452910288, 10.034984703987259},
    {13.625319584352283, 4.9152565807374637, -2.6144402914380902, 0.25397724610420269, -1, -0.67730865549994845, -0.62890048620480066, -2.2776071139058098, 9.469563474303154},
    {13.582226656355871, 4.8821307561159237, -2.4862263273679415, 0.25589566968421817, 0, -0.66180563744873333, -0.63327877633479202, -1.3849352519462232, 8.4089483454860883},
    {13.58602194867567, 4.8843169693983626, -2.6189824603563974, 0.25571787046421712, 0, -0.60933981749867139, -0.64024904352988188, -0.76816513732937064, 6.740498274916134},
    {13.64680939795525, 4.8985083497176545, -2.9122414956559264, 0.2526082271237472, 0, -0.52009790182260107, -0.72189522370668557, -0.42729197347644127, 4.7010707978462989},
    {13.757418115638416, 4.8982342399228305, 3.1391144652568643, 0.24662285880453683, 0, -0.39802570362014777, -0.82098222174402691, -0.26210912199678527, 9.0254207775191642},
    {13.898751001451016, 4.8985968983332624, -3.1390266717774176, 0.23898010167174499, 0, -0.23340758096929615, -0.89406396541826338, -0.19116367021370273, 1.1288660503147732},
    {14.044179494899629, 4.9342884047359954, -2.9009263126226719, 0.23153423367903281, 0, -0.028234764631199782, -0.92920301894654189, -0.17350020715231285, -0.13967083700954408},
    {14.160127700197981, 5.002479063748642, -2.6099593693691459, 0.22604673348364435, 0, 0.18276904867019872, -0.93638205818560971, -0.19887920292369188, -1.0991895940371115},
}};

inline constexpr uint64_t kRacerSeed = 3;
inline constexpr uint64_t kRacerTaskSeed = 0;
inline double racer_action(int t) { return std::sin(0.1 * t); }
// One row per 20 steps of a 200-step episode (after steps 20, 40, ..., 200).
struct RacerRow {
  double x, y, orientation, c1, c2, c3, enc_sum;
};
inline constexpr std::array<RacerRow, 10> kRacer{{
    {0.16848124312756574, 0.50760960670268085, 0.10335011872712752, 0.99573805720745545, 0.98559501169936681, 0.13213438214320278, 2.8264755293982513},
    {0.19067234255363841, 0.86567907413146195, 1.0651616190552251, 0.95140014174256227, 0.081160953168034233, 0.99716995308088374, 2.8163682014694071},
    {0.15326136582290295, 0.7992204644775176, 2.439332361477915, 0.35848672371903451, 0.029793757883442882, 0.91131578118086265, 2.8258937707705427},
    {0.93915978666319189, 0.79312815067175224, 5.5632626245246772, 0.024529057167735503, 0.50587873660581117, 0.14503377217643396, 2.8221920288192401},
    {0.99819150311330018, 0.089346545858120408, 1.5890644889804018, 0.39057100561036046, 0.68047546559048722, 0.00012673716375928223, 2.8813678037110693},
    {0.025290845990187178, 0.044507050398129591, 2.8265641189052881, 0.4234766370934101, 0.37458826295441727, 0.0019190426145514431, 2.8204662249728796},
    {0.73435858750703054, 0.11615415768068044, 4.7170692128715164, 0.037879530670416224, 0.80531107105127941, 0.48240498723975261, 2.8413517608862802},
    {0.83115521515843738, 0.3102803446237839, 1.9061141542860218, 0.52638933266875487, 0.0041705819658062453, 4.264467548089538e-05, 2.849970071391084},
    {0.90601631165854901, 0.3135009034378729, 3.4088791000679199, 0.99999484100097891, 0.11005215596324197, 1.4082381348521136e-06, 2.8709190276504177},
    {0.57384391185645101, 0.44634089987265035, 3.9153624729962182, 0.099674199584787376, 0.85814585608663285, 0.79772776264361056, 2.782952164944783},
}};

}  // namespace metarl::golden
