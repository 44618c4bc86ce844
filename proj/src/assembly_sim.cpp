#include "robustik/assembly_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/Geometry>
#include <fmt/format.h>

namespace robustik {
namespace {

constexpr double kParallelTolerance = 1e-9;

Matrix3 rotation_x_pi() {
  Matrix3 r = Matrix3::Identity();
  r(1, 1) = -1.0;
  r(2, 2) = -1.0;
  return r;
}

std::string pair_id(const IKPair& pair, std::size_t index) {
  return pair.label.empty() ? fmt::format("pair{}", index) : pair.label;
}

}  // namespace

void TaskSpec::validate() const {
  for (double v : {l_p, l_h, h_p, w_p, w_h}) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("task lengths must be finite");
    }
  }
  if (h_p < 0.0 || w_p <= 0.0) {
    throw std::invalid_argument(fmt::format("peg size h_p = {}, w_p = {} is invalid", h_p, w_p));
  }
  if (!(w_h > w_p)) {
    throw std::invalid_argument(
        fmt::format("hole width {} must exceed peg width {}", w_h, w_p));
  }
}

TaskSpec TaskSpec::with_clearance(double clearance) const {
  TaskSpec out = *this;
  out.w_h = w_p + 2.0 * clearance;
  out.validate();
  return out;
}

TaskSpec align_hole_to_peg(const TaskSpec& task) {
  TaskSpec out = task;
  const Vector3 z = task.g_bp.rotation().col(2);
  const double distance = z.dot(task.g_bh.position() - task.g_bp.position());
  out.g_bh = Pose(task.g_bp.rotation() * rotation_x_pi(), task.g_bp.position() + distance * z);
  return out;
}

Pose tip_relative_pose(const Pose& g_rel, const TaskSpec& task) {
  return task.peg_in_gripper().inverse() * g_rel * task.hole_in_gripper();
}

double assembly_error_measure(const Pose& desired, const Pose& achieved, const TaskSpec& task) {
  const Matrix3& rd = desired.rotation();
  const Matrix3& ra = achieved.rotation();
  const Vector3 offset =
      desired.position() - achieved.position() + task.l_h * (rd.col(2) - ra.col(2));
  // |x_d x x_a| is sin of the angle between the x axes, without acos round-off.
  return offset.norm() + task.h_p * rd.col(0).cross(ra.col(0)).norm();
}

TrialOutcome insertion_success_test(const Pose& tip_rel, const TaskSpec& task) {
  TrialOutcome out;
  out.vertex_margins.fill(-std::numeric_limits<double>::infinity());
  // Peg frame expressed in the hole frame.
  const Pose peg = tip_rel.inverse();
  const Vector3 axis = peg.rotation().col(2);
  if (std::abs(axis.z()) < kParallelTolerance) {
    out.diagnostic = "peg axis is parallel to the hole plane";
    return out;
  }
  const double slide = -peg.position().z() / axis.z();
  const double half_peg = 0.5 * task.w_p;
  const double half_hole = 0.5 * task.w_h;
  constexpr std::array<std::array<double, 2>, 4> kCorners = {
      {{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}};
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kCorners.size(); ++i) {
    const Vector3 corner(kCorners[i][0] * half_peg, kCorners[i][1] * half_peg, 0.0);
    const Vector3 v = peg.transform_point(corner) + slide * axis;
    out.vertex_margins[i] = half_hole - std::max(std::abs(v.x()), std::abs(v.y()));
    worst = std::min(worst, out.vertex_margins[i]);
  }
  out.success = worst >= 0.0;
  return out;
}

TrialOutcome simulate_trial(const DualArmModel& dual, const IKPair& pair, const TaskSpec& task,
                            const JointAngles& delta_left, const JointAngles& delta_right) {
  const Pose desired = task.desired_relative();
  Pose achieved =
      relative_pose(dual, pair.theta_left + delta_left, pair.theta_right + delta_right);
  if (pair.literal) {
    const Pose nominal = relative_pose(dual, pair.theta_left, pair.theta_right);
    achieved = achieved * nominal.inverse() * desired;
  }
  TrialOutcome out = insertion_success_test(tip_relative_pose(achieved, task), task);
  out.achieved_rel = achieved;
  out.error_measure = assembly_error_measure(desired, achieved, task);
  return out;
}

MonteCarloResult monte_carlo_success_rate(const DualArmModel& dual, const IKPair& pair,
                                          const TaskSpec& task, const JointNoiseModel& noise,
                                          std::size_t trials, std::uint64_t seed,
                                          std::size_t threads) {
  if (trials == 0) {
    throw std::invalid_argument("Monte Carlo needs at least one trial");
  }
  task.validate();
  noise.validate();
  const std::size_t n = dual.left().dof();
  const std::size_t m = dual.right().dof();
  if (noise.dim != n + m) {
    throw std::invalid_argument(
        fmt::format("noise dimension {} does not match {} joints", noise.dim, n + m));
  }

  const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::size_t> successes(blocks, 0);
  std::atomic<std::size_t> next_block{0};

  auto worker = [&] {
    Eigen::VectorXd delta;
    for (std::size_t b = next_block++; b < blocks; b = next_block++) {
      NoiseSampler sampler(noise, derive_seed(seed, b));
      const std::size_t count = std::min(kTrialBlock, trials - b * kTrialBlock);
      std::size_t ok = 0;
      for (std::size_t t = 0; t < count; ++t) {
        sampler.fill(delta);
        const auto outcome = simulate_trial(dual, pair, task, delta.head(n), delta.tail(m));
        ok += outcome.success ? 1 : 0;
      }
      successes[b] = ok;
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, blocks);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }

  MonteCarloResult result;
  result.trials = trials;
  for (std::size_t s : successes) {
    result.successes += s;
  }
  return result;
}

const SweepCell& SweepResult::cell(std::size_t sigma_index, std::size_t clearance_index,
                                   std::size_t pair_index) const {
  const std::size_t idx =
      (sigma_index * clearances.size() + clearance_index) * pair_ids.size() + pair_index;
  return cells.at(idx);
}

std::string SweepResult::to_csv() const {
  std::string out = "sigma,clearance,pair_id,trials,success_pct\n";
  for (const auto& c : cells) {
    out += fmt::format("{},{},{},{},{:.2f}\n", c.sigma, c.clearance, pair_ids[c.pair_index],
                       c.result.trials, c.result.rate());
  }
  return out;
}

SweepResult sweep(const DualArmModel& dual, const std::vector<IKPair>& pairs,
                  const TaskSpec& task, const JointNoiseModel& noise,
                  const std::vector<double>& sigmas, const std::vector<double>& clearances,
                  std::size_t trials, std::uint64_t seed, std::size_t threads) {
  if (pairs.empty() || sigmas.empty() || clearances.empty()) {
    throw std::invalid_argument("sweep needs at least one pair, sigma and clearance");
  }
  SweepResult result;
  result.sigmas = sigmas;
  result.clearances = clearances;
  result.trials = trials;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    result.pair_ids.push_back(pair_id(pairs[p], p));
  }
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    JointNoiseModel cell_noise = noise;
    cell_noise.sigma = sigmas[i];
    for (std::size_t j = 0; j < clearances.size(); ++j) {
      const TaskSpec cell_task = task.with_clearance(clearances[j]);
      const std::uint64_t cell_seed = derive_seed(seed, i * clearances.size() + j);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        result.cells.push_back({sigmas[i], clearances[j], p,
                                monte_carlo_success_rate(dual, pairs[p], cell_task, cell_noise,
                                                         trials, cell_seed, threads)});
      }
    }
  }
  return result;
}

}  // namespace robustik
