#pragma once

#include <Eigen/Core>

namespace robustik {

using Vector3 = Eigen::Vector3d;
using Vector4 = Eigen::Vector4d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix34 = Eigen::Matrix<double, 3, 4>;

/// Skew-symmetric matrix such that hat(a) * b == a.cross(b).
[[nodiscard]] Matrix3 hat(const Vector3& v);
[[nodiscard]] Vector3 vee(const Matrix3& m);

/// se(3) hat for twist coordinates (v, omega).
[[nodiscard]] Matrix4 hat(const Vector6& xi);
[[nodiscard]] Vector6 vee(const Matrix4& m);

/// Unit quaternion (eta, eps) with Hamilton product.
///
/// Every constructor normalizes and picks the canonical sign of the double
/// cover: eta >= 0, and when eta == 0 the first nonzero component of eps is
/// positive.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  /// Normalizes (eta, eps). Throws std::invalid_argument for a zero 4-vector.
  UnitQuaternion(double eta, const Vector3& eps);

  /// Accepts (eta, eps_x, eps_y, eps_z) only if its norm is 1 within `tolerance`.
  [[nodiscard]] static UnitQuaternion from_unit_coeffs(const Vector4& coeffs,
                                                       double tolerance = 1e-9);
  /// Normalizes any nonzero 4-vector.
  [[nodiscard]] static UnitQuaternion normalized(const Vector4& coeffs);
  /// (cos theta/2, omega sin theta/2). `axis` must be unit within 1e-9.
  [[nodiscard]] static UnitQuaternion from_axis_angle(const Vector3& axis, double theta);
  [[nodiscard]] static UnitQuaternion from_rotation(const Matrix3& rotation);

  [[nodiscard]] double eta() const { return eta_; }
  [[nodiscard]] const Vector3& eps() const { return eps_; }
  [[nodiscard]] Vector4 coeffs() const;

  [[nodiscard]] UnitQuaternion conjugate() const;
  [[nodiscard]] Matrix3 to_rotation() const;
  [[nodiscard]] Vector3 rotate(const Vector3& p) const;

  /// H(q) = [-eps, eta I + hat(eps)]; satisfies H q = 0 and H H^T = I.
  [[nodiscard]] Matrix34 tangent_projection() const;

 private:
  double eta_ = 1.0;
  Vector3 eps_ = Vector3::Zero();
};

/// Left compound operator q+, so that a (x) b == left_compound(a) * b.
[[nodiscard]] Matrix4 left_compound(const Vector4& q);
/// Right compound operator q(+), so that a (x) b == right_compound(b) * a.
[[nodiscard]] Matrix4 right_compound(const Vector4& q);

/// a (x) b evaluated through the left compound operator. Inputs must be unit
/// within 1e-9, otherwise std::invalid_argument.
[[nodiscard]] UnitQuaternion quat_multiply(const Vector4& a, const Vector4& b);
[[nodiscard]] UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

[[nodiscard]] UnitQuaternion quat_from_axis_angle(const Vector3& axis, double theta);
[[nodiscard]] Vector3 quat_rotate_vector(const UnitQuaternion& q, const Vector3& p);

/// Angle between two unit quaternions on S^3, insensitive to the sign of
/// either argument: arccos |a . b|.
[[nodiscard]] double quaternion_distance(const UnitQuaternion& a, const UnitQuaternion& b);

/// Joint screw in twist coordinates (v, omega).
class Twist {
 public:
  /// Revolute joint about the unit `axis` through `point`: (-omega x q, omega).
  [[nodiscard]] static Twist revolute(const Vector3& axis, const Vector3& point);
  /// Prismatic joint sliding along the unit `direction`: (v, 0).
  [[nodiscard]] static Twist prismatic(const Vector3& direction);
  /// Validates raw coordinates: either |omega| = 1 with v orthogonal to omega,
  /// or omega = 0 with |v| = 1 (all within 1e-9). Throws std::invalid_argument.
  [[nodiscard]] static Twist from_coordinates(const Vector6& xi);

  [[nodiscard]] const Vector3& v() const { return v_; }
  [[nodiscard]] const Vector3& omega() const { return omega_; }
  [[nodiscard]] bool is_revolute() const { return revolute_; }
  [[nodiscard]] Vector6 coordinates() const;

 private:
  Twist(const Vector3& v, const Vector3& omega, bool revolute)
      : v_(v), omega_(omega), revolute_(revolute) {}

  Vector3 v_;
  Vector3 omega_;
  bool revolute_;
};

/// Rigid transform g = [R p; 0 1].
class Pose {
 public:
  Pose() = default;
  /// Throws std::invalid_argument unless R^T R = I and det R = 1 within 1e-9.
  Pose(const Matrix3& rotation, const Vector3& position);

  [[nodiscard]] static Pose identity() { return Pose(); }
  [[nodiscard]] static Pose translation(const Vector3& p);
  /// Homogeneous 4x4 matrix. The rotation block must be orthonormal within
  /// `tolerance`; it is then re-projected onto SO(3) so downstream
  /// compositions stay exact. The bottom row must be (0 0 0 1).
  [[nodiscard]] static Pose from_matrix(const Matrix4& m, double tolerance = 1e-6);
  [[nodiscard]] static Pose from_quaternion(const UnitQuaternion& q, const Vector3& p);

  [[nodiscard]] const Matrix3& rotation() const { return rotation_; }
  [[nodiscard]] const Vector3& position() const { return position_; }
  [[nodiscard]] Matrix4 matrix() const;
  [[nodiscard]] UnitQuaternion to_quaternion() const;

  [[nodiscard]] Pose inverse() const;
  [[nodiscard]] Pose operator*(const Pose& other) const;
  [[nodiscard]] Vector3 transform_point(const Vector3& p) const {
    return rotation_ * p + position_;
  }

 private:
  struct Unchecked {};
  Pose(Unchecked, const Matrix3& rotation, const Vector3& position)
      : rotation_(rotation), position_(position) {}

  friend Pose exp_twist(const Twist& xi, double theta);

  Matrix3 rotation_ = Matrix3::Identity();
  Vector3 position_ = Vector3::Zero();
};

[[nodiscard]] inline Pose compose(const Pose& a, const Pose& b) { return a * b; }
[[nodiscard]] inline Pose inverse(const Pose& g) { return g.inverse(); }

/// Nearest rotation matrix in the Frobenius sense.
[[nodiscard]] Matrix3 project_to_rotation(const Matrix3& m);

/// Ad_g = [[R, hat(p) R], [0, R]] acting on twist coordinates (v, omega).
[[nodiscard]] Matrix6 adjoint(const Pose& g);

/// exp(hat(xi) theta) in closed form. Rotations below 1e-10 rad are treated as
/// pure translation by v * theta.
[[nodiscard]] Pose exp_twist(const Twist& xi, double theta);

/// Rotation vector (axis * angle, angle in [0, pi]) of R.
[[nodiscard]] Vector3 log_rotation(const Matrix3& rotation);

}  // namespace robustik
