#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "robustik/se3.hpp"

namespace robustik {

using JointAngles = Eigen::VectorXd;
using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Matrix3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Matrix4X = Eigen::Matrix<double, 4, Eigen::Dynamic>;

struct JointLimit {
  double lower = 0.0;
  double upper = 0.0;
};

/// Serial arm described by joint twists (base to tip) and the end-effector
/// pose at the zero configuration.
class ArmModel {
 public:
  /// `limits` is either empty (unlimited) or one entry per joint.
  /// `redundancy_joint` designates the joint swept during IK enumeration.
  ArmModel(std::vector<Twist> twists, Pose g0, std::vector<JointLimit> limits = {},
           std::optional<std::size_t> redundancy_joint = std::nullopt);

  [[nodiscard]] std::size_t dof() const { return twists_.size(); }
  [[nodiscard]] const std::vector<Twist>& twists() const { return twists_; }
  [[nodiscard]] const Pose& g0() const { return g0_; }
  [[nodiscard]] const std::vector<JointLimit>& limits() const { return limits_; }
  [[nodiscard]] bool has_limits() const { return !limits_.empty(); }
  [[nodiscard]] std::optional<std::size_t> redundancy_joint() const { return redundancy_joint_; }

  [[nodiscard]] bool within_limits(const JointAngles& theta, double slack = 0.0) const;
  /// Midpoint of each joint range (zero for unlimited joints).
  [[nodiscard]] JointAngles mid_range() const;

 private:
  std::vector<Twist> twists_;
  Pose g0_;
  std::vector<JointLimit> limits_;
  std::optional<std::size_t> redundancy_joint_;
};

/// Two arms sharing a base frame. Viewed as one pseudo arm whose joints run
/// nL, ..., 1L, 1R, ..., mR and whose end-effector pose is g_L^-1 g_R.
class DualArmModel {
 public:
  DualArmModel(ArmModel left, ArmModel right)
      : left_(std::move(left)), right_(std::move(right)) {}

  [[nodiscard]] const ArmModel& left() const { return left_; }
  [[nodiscard]] const ArmModel& right() const { return right_; }
  [[nodiscard]] std::size_t total_dof() const { return left_.dof() + right_.dof(); }

 private:
  ArmModel left_;
  ArmModel right_;
};

enum class JointLayout { left, right, pseudo };

/// Joint values tagged with the ordering they follow.
class JointVector {
 public:
  JointVector(JointAngles values, JointLayout layout)
      : values_(std::move(values)), layout_(layout) {}

  /// Reverses theta_left and appends theta_right.
  [[nodiscard]] static JointVector pseudo(const JointAngles& theta_left,
                                          const JointAngles& theta_right);

  [[nodiscard]] const JointAngles& values() const { return values_; }
  [[nodiscard]] JointLayout layout() const { return layout_; }
  [[nodiscard]] Eigen::Index size() const { return values_.size(); }

  /// Inverse of pseudo(): returns (theta_left, theta_right) for a model with
  /// `left_dof` left joints. Requires the pseudo layout.
  [[nodiscard]] std::pair<JointAngles, JointAngles> split(std::size_t left_dof) const;

 private:
  JointAngles values_;
  JointLayout layout_;
};

enum class JacobianKind { spatial_relative, analytical_relative };

/// 6 x (n+m) relative Jacobian; rows 0-2 linear, rows 3-5 angular, columns in
/// pseudo-arm order.
struct JacobianMatrix {
  Matrix6X m;
  JacobianKind kind = JacobianKind::spatial_relative;

  [[nodiscard]] Matrix3X linear() const { return m.topRows<3>(); }
  [[nodiscard]] Matrix3X angular() const { return m.bottomRows<3>(); }
};

/// (prod_i exp(hat(xi_i) theta_i)) g0, product ordered base to tip.
[[nodiscard]] Pose forward_kinematics(const ArmModel& arm, const JointAngles& theta);

/// g_rel = g_L^-1 g_R.
[[nodiscard]] Pose relative_pose(const DualArmModel& dual, const JointAngles& theta_left,
                                 const JointAngles& theta_right);

/// The same relative pose evaluated as the pseudo-arm product
/// g_L0^-1 (prod_{i=n..1} exp(-hat(xi_iL) theta_iL)) (prod_{j=1..m} exp(hat(xi_jR) theta_jR)) g_R0.
[[nodiscard]] Pose pseudo_chain_pose(const DualArmModel& dual, const JointVector& theta);

/// Columns (d g_rel / d theta_j  g_rel^-1)^vee via the closed-form adjoint
/// expressions. Running products are accumulated along the pseudo chain, so
/// the cost is linear in the number of joints.
[[nodiscard]] JacobianMatrix relative_spatial_jacobian(const DualArmModel& dual,
                                                       const JointAngles& theta_left,
                                                       const JointAngles& theta_right);

/// [I, -hat(p_rel); 0, I] J_s: rows 0-2 become the velocity of the origin of
/// g_rel. Throws std::invalid_argument unless `spatial` is spatial_relative.
[[nodiscard]] JacobianMatrix analytical_from_spatial(const JacobianMatrix& spatial,
                                                     const Pose& g_rel);

struct QuaternionJacobian {
  /// J_r: 3 x (n+m), built from the rotation chains R_kL and R_kR.
  Matrix3X rotation;
  /// q_rel assembled as a quaternion product over the joints.
  UnitQuaternion q_rel;

  /// d q_rel / d Theta = 1/2 H(q_rel)^T J_r, 4 x (n+m).
  [[nodiscard]] Matrix4X quaternion_rate() const;
};

[[nodiscard]] QuaternionJacobian quaternion_jacobian(const DualArmModel& dual,
                                                     const JointAngles& theta_left,
                                                     const JointAngles& theta_right);

/// Single-arm Jacobian in base coordinates: rows 0-2 the linear velocity of
/// the end-effector origin, rows 3-5 the angular velocity.
[[nodiscard]] Matrix6X arm_analytical_jacobian(const ArmModel& arm, const JointAngles& theta);

}  // namespace robustik
