#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "robustik/error_propagation.hpp"
#include "robustik/kinematics.hpp"
#include "robustik/robust_ik.hpp"
#include "robustik/se3.hpp"

namespace robustik {

/// Square peg held by the left gripper, square hole held by the right one.
/// The peg and hole frames sit at l_p and l_h along the gripper z axes.
struct TaskSpec {
  Pose g_bp;  // desired peg frame in base
  Pose g_bh;  // desired hole frame in base
  double l_p = 0.05;
  double l_h = 0.05;
  double h_p = 0.05;  // peg height
  double w_p = 0.03;  // peg width
  double w_h = 0.04;  // hole width

  [[nodiscard]] double clearance() const { return 0.5 * (w_h - w_p); }
  /// Throws std::invalid_argument unless all lengths are finite, widths are
  /// positive and w_h > w_p.
  void validate() const;

  [[nodiscard]] Pose peg_in_gripper() const { return Pose::translation({0.0, 0.0, l_p}); }
  [[nodiscard]] Pose hole_in_gripper() const { return Pose::translation({0.0, 0.0, l_h}); }

  [[nodiscard]] Pose desired_left() const { return g_bp * peg_in_gripper().inverse(); }
  [[nodiscard]] Pose desired_right() const { return g_bh * hole_in_gripper().inverse(); }
  /// Desired gripper-to-gripper pose g_rel.
  [[nodiscard]] Pose desired_relative() const { return desired_left().inverse() * desired_right(); }
  /// Desired peg-to-hole pose.
  [[nodiscard]] Pose desired_tip_relative() const { return g_bp.inverse() * g_bh; }

  /// Same task with w_h = w_p + 2 clearance.
  [[nodiscard]] TaskSpec with_clearance(double clearance) const;
};

/// Replaces the hole pose by the exactly aligned one: hole z opposite to peg
/// z, hole x along peg x, hole centre on the peg axis at the current
/// approach distance.
[[nodiscard]] TaskSpec align_hole_to_peg(const TaskSpec& task);

/// Peg-to-hole pose from a gripper-to-gripper pose: g_peg^-1 g_rel g_hole.
[[nodiscard]] Pose tip_relative_pose(const Pose& g_rel, const TaskSpec& task);

/// Task-space error between two gripper-to-gripper poses:
/// |p_d - p_a + l_h (z_d - z_a)| + h_p sin(dtheta_z), where dtheta_z is the
/// angle between the x axes. The corner term is added as a scalar, which
/// upper-bounds any in-plane direction it could take.
[[nodiscard]] double assembly_error_measure(const Pose& desired, const Pose& achieved,
                                            const TaskSpec& task);

struct TrialOutcome {
  bool success = false;
  Pose achieved_rel;  // gripper-to-gripper pose the trial produced
  double error_measure = 0.0;
  /// w_h / 2 minus the larger in-plane coordinate of each projected peg
  /// vertex; negative means the vertex lies outside the hole.
  std::array<double, 4> vertex_margins{};
  std::string diagnostic;
};

/// Slides the peg along its own z axis onto the hole plane, projects the four
/// face vertices and compares them with the hole square. `tip_rel` is the
/// peg-to-hole pose. Success iff every margin >= 0.
[[nodiscard]] TrialOutcome insertion_success_test(const Pose& tip_rel, const TaskSpec& task);

/// One noisy execution of `pair`. Literal pairs come from another kinematic
/// model and do not reach the target on this one; for them the hole is
/// re-mounted so their noise-free execution lands on the desired pose, and
/// the trial measures the effect of the noise only.
[[nodiscard]] TrialOutcome simulate_trial(const DualArmModel& dual, const IKPair& pair,
                                          const TaskSpec& task, const JointAngles& delta_left,
                                          const JointAngles& delta_right);

struct MonteCarloResult {
  std::size_t trials = 0;
  std::size_t successes = 0;
  [[nodiscard]] double rate() const {
    return trials == 0 ? 0.0 : 100.0 * static_cast<double>(successes) / static_cast<double>(trials);
  }
};

/// Trials run in blocks of this size with block seeds derive_seed(seed, block),
/// so the outcome does not depend on the thread count.
inline constexpr std::size_t kTrialBlock = 1000;

[[nodiscard]] MonteCarloResult monte_carlo_success_rate(const DualArmModel& dual,
                                                        const IKPair& pair, const TaskSpec& task,
                                                        const JointNoiseModel& noise,
                                                        std::size_t trials, std::uint64_t seed,
                                                        std::size_t threads = 1);

struct SweepCell {
  double sigma = 0.0;
  double clearance = 0.0;
  std::size_t pair_index = 0;
  MonteCarloResult result;
};

struct SweepResult {
  std::vector<double> sigmas;
  std::vector<double> clearances;
  std::vector<std::string> pair_ids;
  std::size_t trials = 0;
  /// Ordered by sigma, then clearance, then pair.
  std::vector<SweepCell> cells;

  [[nodiscard]] const SweepCell& cell(std::size_t sigma_index, std::size_t clearance_index,
                                      std::size_t pair_index) const;
  [[nodiscard]] std::string to_csv() const;
};

/// Full factorial sweep. Cell (i, j) uses seed derive_seed(seed, i * clearances + j)
/// for every pair, so pairs in a cell see the same noise draws.
[[nodiscard]] SweepResult sweep(const DualArmModel& dual, const std::vector<IKPair>& pairs,
                                const TaskSpec& task, const JointNoiseModel& noise,
                                const std::vector<double>& sigmas,
                                const std::vector<double>& clearances, std::size_t trials,
                                std::uint64_t seed, std::size_t threads = 1);

}  // namespace robustik
