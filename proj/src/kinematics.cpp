#include "robustik/kinematics.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace robustik {
namespace {

void require_length(const JointAngles& theta, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(theta.size()) != expected) {
    throw std::invalid_argument(
        fmt::format("{}: expected {} joint values, got {}", what, expected, theta.size()));
  }
  if (!theta.allFinite()) {
    throw std::invalid_argument(fmt::format("{}: joint values must be finite", what));
  }
}

void require_dual(const DualArmModel& dual, const JointAngles& theta_left,
                  const JointAngles& theta_right) {
  require_length(theta_left, dual.left().dof(), "left joint vector");
  require_length(theta_right, dual.right().dof(), "right joint vector");
}

Matrix6 jacobian_transfer(const Vector3& p) {
  Matrix6 t = Matrix6::Identity();
  t.topRightCorner<3, 3>() = -hat(p);
  return t;
}

}  // namespace

ArmModel::ArmModel(std::vector<Twist> twists, Pose g0, std::vector<JointLimit> limits,
                   std::optional<std::size_t> redundancy_joint)
    : twists_(std::move(twists)),
      g0_(g0),
      limits_(std::move(limits)),
      redundancy_joint_(redundancy_joint) {
  if (twists_.empty()) {
    throw std::invalid_argument("arm needs at least one joint");
  }
  if (!limits_.empty() && limits_.size() != twists_.size()) {
    throw std::invalid_argument(fmt::format("arm has {} joints but {} limits", twists_.size(),
                                            limits_.size()));
  }
  for (std::size_t i = 0; i < limits_.size(); ++i) {
    if (!(limits_[i].lower <= limits_[i].upper)) {
      throw std::invalid_argument(fmt::format("joint {}: lower limit exceeds upper limit", i));
    }
  }
  if (redundancy_joint_ && *redundancy_joint_ >= twists_.size()) {
    throw std::invalid_argument(
        fmt::format("redundancy joint {} out of range for {} joints", *redundancy_joint_,
                    twists_.size()));
  }
}

bool ArmModel::within_limits(const JointAngles& theta, double slack) const {
  if (limits_.empty()) {
    return true;
  }
  for (std::size_t i = 0; i < limits_.size(); ++i) {
    const double t = theta[static_cast<Eigen::Index>(i)];
    if (t < limits_[i].lower - slack || t > limits_[i].upper + slack) {
      return false;
    }
  }
  return true;
}

JointAngles ArmModel::mid_range() const {
  JointAngles mid = JointAngles::Zero(static_cast<Eigen::Index>(dof()));
  for (std::size_t i = 0; i < limits_.size(); ++i) {
    mid[static_cast<Eigen::Index>(i)] = 0.5 * (limits_[i].lower + limits_[i].upper);
  }
  return mid;
}

JointVector JointVector::pseudo(const JointAngles& theta_left, const JointAngles& theta_right) {
  JointAngles values(theta_left.size() + theta_right.size());
  values.head(theta_left.size()) = theta_left.reverse();
  values.tail(theta_right.size()) = theta_right;
  return {values, JointLayout::pseudo};
}

std::pair<JointAngles, JointAngles> JointVector::split(std::size_t left_dof) const {
  if (layout_ != JointLayout::pseudo) {
    throw std::invalid_argument("split() requires a pseudo-layout joint vector");
  }
  const auto n = static_cast<Eigen::Index>(left_dof);
  if (n > values_.size()) {
    throw std::invalid_argument("pseudo joint vector shorter than the left arm");
  }
  return {values_.head(n).reverse(), values_.tail(values_.size() - n)};
}

Pose forward_kinematics(const ArmModel& arm, const JointAngles& theta) {
  require_length(theta, arm.dof(), "forward_kinematics");
  Pose g;
  for (std::size_t i = 0; i < arm.dof(); ++i) {
    g = g * exp_twist(arm.twists()[i], theta[static_cast<Eigen::Index>(i)]);
  }
  return g * arm.g0();
}

Pose relative_pose(const DualArmModel& dual, const JointAngles& theta_left,
                   const JointAngles& theta_right) {
  require_dual(dual, theta_left, theta_right);
  return forward_kinematics(dual.left(), theta_left).inverse() *
         forward_kinematics(dual.right(), theta_right);
}

Pose pseudo_chain_pose(const DualArmModel& dual, const JointVector& theta) {
  if (theta.layout() != JointLayout::pseudo ||
      static_cast<std::size_t>(theta.size()) != dual.total_dof()) {
    throw std::invalid_argument(fmt::format("pseudo joint vector must have {} values",
                                            dual.total_dof()));
  }
  const auto n = dual.left().dof();
  const auto& values = theta.values();
  Pose g = dual.left().g0().inverse();
  for (std::size_t j = 0; j < n; ++j) {
    g = g * exp_twist(dual.left().twists()[n - 1 - j], -values[static_cast<Eigen::Index>(j)]);
  }
  for (std::size_t j = 0; j < dual.right().dof(); ++j) {
    g = g * exp_twist(dual.right().twists()[j], values[static_cast<Eigen::Index>(n + j)]);
  }
  return g * dual.right().g0();
}

JacobianMatrix relative_spatial_jacobian(const DualArmModel& dual, const JointAngles& theta_left,
                                         const JointAngles& theta_right) {
  require_dual(dual, theta_left, theta_right);
  const auto n = dual.left().dof();
  const auto m = dual.right().dof();
  JacobianMatrix jac{Matrix6X(6, static_cast<Eigen::Index>(n + m)),
                     JacobianKind::spatial_relative};

  // prefix = g_L0^-1 prod_{i=n}^{k+1} exp(-xi_iL theta_iL) for left column k,
  // then g_L^-1 prod_{j<k} exp(xi_jR theta_jR) for right column k.
  Pose prefix = dual.left().g0().inverse();
  Eigen::Index col = 0;
  for (std::size_t k = n; k-- > 0; ++col) {
    const Twist& xi = dual.left().twists()[k];
    jac.m.col(col) = -(adjoint(prefix) * xi.coordinates());
    prefix = prefix * exp_twist(xi, -theta_left[static_cast<Eigen::Index>(k)]);
  }
  for (std::size_t k = 0; k < m; ++k, ++col) {
    const Twist& xi = dual.right().twists()[k];
    jac.m.col(col) = adjoint(prefix) * xi.coordinates();
    prefix = prefix * exp_twist(xi, theta_right[static_cast<Eigen::Index>(k)]);
  }
  return jac;
}

JacobianMatrix analytical_from_spatial(const JacobianMatrix& spatial, const Pose& g_rel) {
  if (spatial.kind != JacobianKind::spatial_relative) {
    throw std::invalid_argument("analytical_from_spatial expects a spatial relative Jacobian");
  }
  return {jacobian_transfer(g_rel.position()) * spatial.m, JacobianKind::analytical_relative};
}

Matrix4X QuaternionJacobian::quaternion_rate() const {
  return 0.5 * q_rel.tangent_projection().transpose() * rotation;
}

QuaternionJacobian quaternion_jacobian(const DualArmModel& dual, const JointAngles& theta_left,
                                       const JointAngles& theta_right) {
  require_dual(dual, theta_left, theta_right);
  const auto n = dual.left().dof();
  const auto m = dual.right().dof();

  auto joint_quaternion = [](const Twist& xi, double theta) {
    return xi.is_revolute() ? UnitQuaternion::from_axis_angle(xi.omega(), theta)
                            : UnitQuaternion();
  };

  Matrix3X jr(3, static_cast<Eigen::Index>(n + m));
  // chain holds q_0L^-1 (x) prod_{i=n}^{k+1} q_iL^-1 (x) prod_{j<k} q_jR; its
  // rotation is R_kL (left joints) or R_kR (right joints).
  UnitQuaternion chain = dual.left().g0().to_quaternion().conjugate();
  Eigen::Index col = 0;
  for (std::size_t k = n; k-- > 0; ++col) {
    const Twist& xi = dual.left().twists()[k];
    jr.col(col) = -chain.rotate(xi.omega());
    chain = chain * joint_quaternion(xi, theta_left[static_cast<Eigen::Index>(k)]).conjugate();
  }
  for (std::size_t k = 0; k < m; ++k, ++col) {
    const Twist& xi = dual.right().twists()[k];
    jr.col(col) = chain.rotate(xi.omega());
    chain = chain * joint_quaternion(xi, theta_right[static_cast<Eigen::Index>(k)]);
  }
  return {jr, chain * dual.right().g0().to_quaternion()};
}

Matrix6X arm_analytical_jacobian(const ArmModel& arm, const JointAngles& theta) {
  require_length(theta, arm.dof(), "arm_analytical_jacobian");
  Matrix6X js(6, static_cast<Eigen::Index>(arm.dof()));
  Pose prefix;
  for (std::size_t i = 0; i < arm.dof(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    js.col(col) = adjoint(prefix) * arm.twists()[i].coordinates();
    prefix = prefix * exp_twist(arm.twists()[i], theta[col]);
  }
  const Pose g = prefix * arm.g0();
  return jacobian_transfer(g.position()) * js;
}

}  // namespace robustik
