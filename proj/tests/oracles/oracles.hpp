#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "robustik/kinematics.hpp"

// Reference implementations used only by the tests. They avoid the closed-form
// code paths of the library so that agreement is meaningful.
namespace robustik::oracle {

/// exp(hat(xi) theta) by the generic matrix exponential.
[[nodiscard]] Eigen::Matrix4d twist_exponential(const Eigen::Matrix<double, 6, 1>& xi, double theta);

/// Product of per-joint matrix exponentials times g0, as a plain 4x4 matrix.
[[nodiscard]] Eigen::Matrix4d chain_pose(const ArmModel& arm, const Eigen::VectorXd& theta);

[[nodiscard]] Eigen::Matrix4d relative_chain_pose(const DualArmModel& dual,
                                                  const Eigen::VectorXd& theta_left,
                                                  const Eigen::VectorXd& theta_right);

/// Central differences of g_rel, columns (dg/dtheta g^-1)^vee in pseudo-chain
/// order nL..1L, 1R..mR. `step` must lie in [1e-8, 1e-3].
[[nodiscard]] Eigen::MatrixXd finite_difference_relative_jacobian(
    const DualArmModel& dual, const Eigen::VectorXd& theta_left,
    const Eigen::VectorXd& theta_right, double step);

/// Central differences of the position of g_rel, pseudo-chain order.
[[nodiscard]] Eigen::MatrixXd finite_difference_relative_position(
    const DualArmModel& dual, const Eigen::VectorXd& theta_left,
    const Eigen::VectorXd& theta_right, double step);

/// Central differences of q_rel (eta, eps), every sample sign-aligned with
/// the quaternion at the base point; pseudo-chain order.
[[nodiscard]] Eigen::MatrixXd finite_difference_quaternion(const DualArmModel& dual,
                                                           const Eigen::VectorXd& theta_left,
                                                           const Eigen::VectorXd& theta_right,
                                                           double step);

/// Uniform configuration inside the joint limits (or [-pi, pi] without limits).
[[nodiscard]] Eigen::VectorXd random_configuration(const ArmModel& arm, std::mt19937_64& rng);

/// Uniform point on the sphere of radius `radius` in R^dim.
[[nodiscard]] Eigen::VectorXd random_on_sphere(std::size_t dim, double radius,
                                               std::mt19937_64& rng);

/// Planar arm in the base XY plane: revolute z joints with link lengths
/// `links`, the base at `origin`, tool frame at the end of the last link.
[[nodiscard]] ArmModel planar_arm(const std::vector<double>& links, const Eigen::Vector3d& origin);

/// Both closed-form solutions (elbow sign +1, -1) of a planar 3R arm placing
/// the tool at (x, y) with heading phi, given in the arm's own base frame.
[[nodiscard]] std::vector<Eigen::VectorXd> planar_3r_ik(const std::vector<double>& links,
                                                        double x, double y, double phi);

}  // namespace robustik::oracle
