#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "robustik/kinematics.hpp"
#include "robustik/se3.hpp"

namespace robustik {

/// Isotropic Gaussian joint noise, delta Theta ~ N(0, sigma^2 I), with the
/// confidence ball delta Theta^T delta Theta <= c, c = (k sigma)^2.
struct JointNoiseModel {
  double sigma = 0.0;   // rad
  double k = 2.0;       // number of standard deviations
  std::size_t dim = 0;  // n + m

  /// Throws std::invalid_argument for negative or non-finite sigma, k <= 0 or dim == 0.
  void validate() const;
};

[[nodiscard]] double joint_error_bound(const JointNoiseModel& model);

/// sqrt(c * lambda_max(J_p J_p^T)): the longest semi-axis of the position
/// error ellipsoid, in the units of J_p times rad.
[[nodiscard]] double max_position_error(const Eigen::Ref<const Eigen::MatrixXd>& jp, double c);

struct OrientationWorstCase {
  double o_star = 0.0;
  UnitQuaternion q_worst;
};

/// Worst orientation deviation on the boundary of the quaternion error set:
/// v* = 1/2 sqrt(c lambda_max) V_max, q* = normalize(q_rel + H^T v*),
/// O* = arccos(q_rel . q*).
[[nodiscard]] OrientationWorstCase max_orientation_error(
    const Eigen::Ref<const Eigen::MatrixXd>& jr, const UnitQuaternion& q_rel, double c);

[[nodiscard]] double weighted_metric(double p_star, double o_star, double gamma);

struct WorstCaseError {
  double p_star = 0.0;  // m
  double o_star = 0.0;  // rad
  double m_star = 0.0;  // p_star + gamma * o_star
  double gamma = 0.0;   // m / rad
};

/// Scores an analytical relative Jacobian: P*, O* and M* = P* + gamma O*.
[[nodiscard]] WorstCaseError worst_case_error(const JacobianMatrix& analytical,
                                              const UnitQuaternion& q_rel, double c,
                                              double gamma);

enum class ErrorSpace { position, orientation };

/// { x : x^T characteristic x <= bound }.
struct ErrorEllipsoid {
  Eigen::MatrixXd characteristic;
  double bound = 0.0;
  ErrorSpace space = ErrorSpace::position;
  /// Set when the Gram matrix J J^T had eigenvalues below the 1e-14 floor and
  /// the characteristic matrix is a pseudo-inverse.
  bool degenerate = false;

  [[nodiscard]] double quadratic_form(const Eigen::VectorXd& x) const {
    return x.dot(characteristic * x);
  }
  /// Relative slack `rel_tol` absorbs rounding for points on the boundary.
  [[nodiscard]] bool contains(const Eigen::VectorXd& x, double rel_tol = 1e-9) const {
    return quadratic_form(x) <= bound * (1.0 + rel_tol);
  }
};

struct TaskEllipsoids {
  ErrorEllipsoid position;     // 3x3, bound c
  ErrorEllipsoid orientation;  // 4x4 on delta q, bound c / 4
};

/// Position set (J_p J_p^T)^-1 <= c and orientation set
/// H^T (J_r J_r^T)^-1 H <= c / 4 from an analytical relative Jacobian.
[[nodiscard]] TaskEllipsoids build_ellipsoids(const JacobianMatrix& analytical,
                                              const UnitQuaternion& q_rel, double c);

/// Pseudo-inverse of a symmetric PSD matrix with eigenvalue floor 1e-14.
/// Returns the inverse and whether any eigenvalue was floored.
[[nodiscard]] std::pair<Eigen::MatrixXd, bool> psd_pseudo_inverse(const Eigen::MatrixXd& gram);

/// Explicit-state Gaussian joint-noise generator. Samples are not truncated
/// to the k-sigma ball.
class NoiseSampler {
 public:
  NoiseSampler(const JointNoiseModel& model, std::uint64_t seed);

  [[nodiscard]] Eigen::VectorXd next();
  void fill(Eigen::VectorXd& out);

 private:
  JointNoiseModel model_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

[[nodiscard]] std::vector<Eigen::VectorXd> sample_joint_noise(const JointNoiseModel& model,
                                                              std::size_t count,
                                                              std::uint64_t seed);

/// SplitMix64 mix of (seed, index); used to derive independent child seeds.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace robustik
