#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustik/error_propagation.hpp"
#include "robustik/kinematics.hpp"
#include "robustik/se3.hpp"

namespace robustik {

/// Raised when a selection has nothing to choose from.
class NoSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Position and orientation mismatch between two poses.
struct PoseResidual {
  double position = 0.0;     // m
  double orientation = 0.0;  // rad
  [[nodiscard]] double composite() const { return position + orientation; }
};

[[nodiscard]] PoseResidual pose_residual(const Pose& target, const Pose& achieved);

/// Pose tolerance an IK pair must meet against its relative-pose target.
inline constexpr double kPairPoseTolerance = 1e-6;

struct IKPair {
  JointAngles theta_left;
  JointAngles theta_right;
  /// Composite (m + rad) mismatch of relative_pose against the target.
  double residual = 0.0;
  /// Joint values supplied verbatim by the caller (e.g. published values
  /// from another model). They skip the residual check when scored.
  bool literal = false;
  std::optional<WorstCaseError> score;
  std::string label;
};

/// Numerical IK enumeration settings.
struct IkStrategy {
  std::size_t seeds = 64;             // scrambled Halton seeds per solve batch
  std::size_t redundancy_steps = 16;  // grid over the redundancy joint (arms with > 6 joints)
  double damping = 1e-3;              // DLS damping lambda
  double tolerance = 1e-9;            // convergence threshold on the composite residual
  std::size_t max_iterations = 500;
  double max_step = 0.5;              // rad, infinity norm of one DLS update
  double dedup_tolerance = 1e-3;      // rad, infinity norm
  std::size_t left_samples = 16;      // left configurations tried in relative-only mode
  std::uint64_t seed = 0;
};

struct IkSolution {
  JointAngles theta;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Damped-least-squares IK from `seed`. The joint `locked_joint`, if given,
/// keeps its seed value. Iterates stay inside the joint limits.
[[nodiscard]] IkSolution solve_arm_ik(const ArmModel& arm, const Pose& target,
                                      const JointAngles& seed, const IkStrategy& strategy,
                                      std::optional<std::size_t> locked_joint = std::nullopt);

struct ArmEnumerationStats {
  std::size_t attempted = 0;
  std::size_t converged = 0;
  std::size_t dropped_nonconverged = 0;
  std::size_t dropped_limits = 0;
  std::size_t distinct = 0;
};

/// Distinct IK solutions of one arm for `target`, in discovery order.
[[nodiscard]] std::vector<JointAngles> enumerate_arm_ik(const ArmModel& arm, const Pose& target,
                                                        const IkStrategy& strategy,
                                                        std::uint64_t stream,
                                                        ArmEnumerationStats* stats = nullptr);

struct EnumerationDiagnostics {
  ArmEnumerationStats left;
  ArmEnumerationStats right;
  std::size_t pairs = 0;
  std::string message;
};

struct Enumeration {
  std::vector<IKPair> pairs;
  EnumerationDiagnostics diagnostics;
};

/// All IK pairs placing the left gripper at `g_left` and the right gripper at
/// `g_right`. Unreachable targets give an empty list and a diagnostic.
[[nodiscard]] Enumeration enumerate_ik_pairs(const DualArmModel& dual, const Pose& g_left,
                                             const Pose& g_right, const IkStrategy& strategy);

/// Relative-only mode: the left gripper pose is free. Left configurations are
/// sampled inside the joint limits and the right arm is solved for
/// g_L(sample) * g_rel.
[[nodiscard]] Enumeration enumerate_ik_pairs_relative(const DualArmModel& dual,
                                                      const Pose& g_rel,
                                                      const IkStrategy& strategy);

/// P*, O*, M* at a configuration, without any target check.
[[nodiscard]] WorstCaseError score_configuration(const DualArmModel& dual,
                                                 const JointAngles& theta_left,
                                                 const JointAngles& theta_right,
                                                 const JointNoiseModel& noise, double gamma);

/// Scores an IK pair. Non-literal pairs must carry residual <= kPairPoseTolerance,
/// otherwise std::invalid_argument.
[[nodiscard]] WorstCaseError score_pair(const DualArmModel& dual, const IKPair& pair,
                                        const JointNoiseModel& noise, double gamma);

/// Fills in `score` for every pair.
void score_pairs(const DualArmModel& dual, std::vector<IKPair>& pairs,
                 const JointNoiseModel& noise, double gamma);

/// Index of the minimum-M* pair among scored pairs. Ties go to the smaller
/// P*, then to the smaller infinity-norm distance from mid-range, then to the
/// earlier pair. Throws NoSolutionError for an empty list.
[[nodiscard]] std::size_t select_robust_index(const DualArmModel& dual,
                                              const std::vector<IKPair>& scored);

/// Index of the maximum-M* pair (the comparison pair Theta-minus).
[[nodiscard]] std::size_t worst_pair_index(const std::vector<IKPair>& scored);

/// Scores `pairs` and returns the robust pair with its score.
[[nodiscard]] IKPair select_robust_pair(const DualArmModel& dual, std::vector<IKPair> pairs,
                                        const JointNoiseModel& noise, double gamma);

struct FeasibilityReport {
  double epsilon = 0.0;
  IKPair best;
  bool feasible = false;
  double margin = 0.0;  // epsilon - m_star
};

/// feasible iff m_star <= epsilon. `best` must be scored.
[[nodiscard]] FeasibilityReport feasibility_check(const IKPair& best, double epsilon);

}  // namespace robustik
