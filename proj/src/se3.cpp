#include "robustik/se3.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace robustik {
namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kSmallAngle = 1e-10;

void canonicalize(double& eta, Vector3& eps) {
  bool flip = eta < 0.0;
  if (eta == 0.0) {
    for (int i = 0; i < 3; ++i) {
      if (eps[i] != 0.0) {
        flip = eps[i] < 0.0;
        break;
      }
    }
  }
  if (flip) {
    eta = -eta;
    eps = -eps;
  }
}

void require_unit(const Vector4& q, const char* what) {
  const double n = q.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(fmt::format("{}: quaternion norm {} is not 1", what, n));
  }
}

}  // namespace

Matrix3 hat(const Vector3& v) {
  Matrix3 m;
  // clang-format off
  m <<  0.0,  -v.z(),  v.y(),
        v.z(),  0.0,  -v.x(),
       -v.y(),  v.x(),  0.0;
  // clang-format on
  return m;
}

Vector3 vee(const Matrix3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

Matrix4 hat(const Vector6& xi) {
  Matrix4 m = Matrix4::Zero();
  m.topLeftCorner<3, 3>() = hat(Vector3(xi.tail<3>()));
  m.topRightCorner<3, 1>() = xi.head<3>();
  return m;
}

Vector6 vee(const Matrix4& m) {
  Vector6 xi;
  xi.head<3>() = m.topRightCorner<3, 1>();
  xi.tail<3>() = vee(Matrix3(m.topLeftCorner<3, 3>()));
  return xi;
}

// ---------------------------------------------------------------------------
// UnitQuaternion

UnitQuaternion::UnitQuaternion(double eta, const Vector3& eps) : eta_(eta), eps_(eps) {
  const double n = std::sqrt(eta * eta + eps.squaredNorm());
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("quaternion must be finite and nonzero");
  }
  eta_ /= n;
  eps_ /= n;
  canonicalize(eta_, eps_);
}

UnitQuaternion UnitQuaternion::from_unit_coeffs(const Vector4& coeffs, double tolerance) {
  const double n = coeffs.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > tolerance) {
    throw std::invalid_argument(fmt::format("quaternion norm {} is not 1", n));
  }
  return {coeffs[0], coeffs.tail<3>()};
}

UnitQuaternion UnitQuaternion::normalized(const Vector4& coeffs) {
  return {coeffs[0], coeffs.tail<3>()};
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vector3& axis, double theta) {
  const double n = axis.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(fmt::format("rotation axis norm {} is not 1", n));
  }
  return {std::cos(0.5 * theta), axis * std::sin(0.5 * theta)};
}

UnitQuaternion UnitQuaternion::from_rotation(const Matrix3& rotation) {
  const Eigen::Quaterniond q(rotation);
  return {q.w(), Vector3(q.x(), q.y(), q.z())};
}

Vector4 UnitQuaternion::coeffs() const { return {eta_, eps_.x(), eps_.y(), eps_.z()}; }

UnitQuaternion UnitQuaternion::conjugate() const { return {eta_, -eps_}; }

Matrix3 UnitQuaternion::to_rotation() const {
  return (eta_ * eta_ - eps_.squaredNorm()) * Matrix3::Identity() +
         2.0 * eps_ * eps_.transpose() + 2.0 * eta_ * hat(eps_);
}

Vector3 UnitQuaternion::rotate(const Vector3& p) const {
  // eta^2 p + (eps.p) eps + 2 eta eps x p + eps x (eps x p)
  const Vector3 t = 2.0 * eps_.cross(p);
  return p + eta_ * t + eps_.cross(t);
}

Matrix34 UnitQuaternion::tangent_projection() const {
  Matrix34 h;
  h.col(0) = -eps_;
  h.rightCols<3>() = eta_ * Matrix3::Identity() + hat(eps_);
  return h;
}

Matrix4 left_compound(const Vector4& q) {
  const double eta = q[0];
  const Vector3 eps = q.tail<3>();
  Matrix4 m;
  m(0, 0) = eta;
  m.block<1, 3>(0, 1) = -eps.transpose();
  m.block<3, 1>(1, 0) = eps;
  m.block<3, 3>(1, 1) = eta * Matrix3::Identity() + hat(eps);
  return m;
}

Matrix4 right_compound(const Vector4& q) {
  const double eta = q[0];
  const Vector3 eps = q.tail<3>();
  Matrix4 m;
  m(0, 0) = eta;
  m.block<1, 3>(0, 1) = -eps.transpose();
  m.block<3, 1>(1, 0) = eps;
  m.block<3, 3>(1, 1) = eta * Matrix3::Identity() - hat(eps);
  return m;
}

UnitQuaternion quat_multiply(const Vector4& a, const Vector4& b) {
  require_unit(a, "quat_multiply lhs");
  require_unit(b, "quat_multiply rhs");
  return UnitQuaternion::normalized(left_compound(a) * b);
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  const Vector3 eps = a.eta() * b.eps() + b.eta() * a.eps() + a.eps().cross(b.eps());
  return {a.eta() * b.eta() - a.eps().dot(b.eps()), eps};
}

UnitQuaternion quat_from_axis_angle(const Vector3& axis, double theta) {
  return UnitQuaternion::from_axis_angle(axis, theta);
}

Vector3 quat_rotate_vector(const UnitQuaternion& q, const Vector3& p) { return q.rotate(p); }

double quaternion_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  return std::acos(std::clamp(std::abs(a.coeffs().dot(b.coeffs())), 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// Twist

Twist Twist::revolute(const Vector3& axis, const Vector3& point) {
  const double n = axis.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(fmt::format("revolute axis norm {} is not 1", n));
  }
  const Vector3 omega = axis / n;
  return {-omega.cross(point), omega, true};
}

Twist Twist::prismatic(const Vector3& direction) {
  const double n = direction.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(fmt::format("prismatic direction norm {} is not 1", n));
  }
  return {direction / n, Vector3::Zero(), false};
}

Twist Twist::from_coordinates(const Vector6& xi) {
  if (!xi.allFinite()) {
    throw std::invalid_argument("twist coordinates must be finite");
  }
  const Vector3 v = xi.head<3>();
  const Vector3 w = xi.tail<3>();
  const double wn = w.norm();
  if (wn <= kUnitTolerance) {
    return prismatic(v);
  }
  if (std::abs(wn - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(fmt::format("revolute omega norm {} is not 1", wn));
  }
  const Vector3 omega = w / wn;
  const double pitch = v.dot(omega);
  if (std::abs(pitch) > kUnitTolerance * std::max(1.0, v.norm())) {
    throw std::invalid_argument(
        fmt::format("revolute twist has v . omega = {} (helical joints unsupported)", pitch));
  }
  return {v - pitch * omega, omega, true};
}

Vector6 Twist::coordinates() const {
  Vector6 xi;
  xi << v_, omega_;
  return xi;
}

// ---------------------------------------------------------------------------
// Pose

Pose::Pose(const Matrix3& rotation, const Vector3& position)
    : rotation_(rotation), position_(position) {
  if (!rotation.allFinite() || !position.allFinite()) {
    throw std::invalid_argument("pose entries must be finite");
  }
  const double orth = (rotation.transpose() * rotation - Matrix3::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (orth > 1e-9 || std::abs(det - 1.0) > 1e-9) {
    throw std::invalid_argument(
        fmt::format("rotation is not in SO(3): |R^T R - I| = {}, det = {}", orth, det));
  }
}

Pose Pose::translation(const Vector3& p) { return {Unchecked{}, Matrix3::Identity(), p}; }

Pose Pose::from_matrix(const Matrix4& m, double tolerance) {
  if (!m.allFinite()) {
    throw std::invalid_argument("pose matrix must be finite");
  }
  if ((m.bottomRows<1>() - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tolerance) {
    throw std::invalid_argument("pose matrix bottom row must be (0 0 0 1)");
  }
  const Matrix3 r = m.topLeftCorner<3, 3>();
  const double orth = (r.transpose() * r - Matrix3::Identity()).cwiseAbs().maxCoeff();
  const double det = r.determinant();
  if (orth > tolerance || std::abs(det - 1.0) > tolerance) {
    throw std::invalid_argument(
        fmt::format("rotation block is not in SO(3): |R^T R - I| = {}, det = {}", orth, det));
  }
  return {Unchecked{}, project_to_rotation(r), m.topRightCorner<3, 1>()};
}

Pose Pose::from_quaternion(const UnitQuaternion& q, const Vector3& p) {
  return {Unchecked{}, q.to_rotation(), p};
}

Matrix4 Pose::matrix() const {
  Matrix4 m = Matrix4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = position_;
  return m;
}

UnitQuaternion Pose::to_quaternion() const { return UnitQuaternion::from_rotation(rotation_); }

Pose Pose::inverse() const {
  const Matrix3 rt = rotation_.transpose();
  return {Unchecked{}, rt, -(rt * position_)};
}

Pose Pose::operator*(const Pose& other) const {
  return {Unchecked{}, rotation_ * other.rotation_, rotation_ * other.position_ + position_};
}

Matrix3 project_to_rotation(const Matrix3& m) {
  const Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3 d = Matrix3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

Matrix6 adjoint(const Pose& g) {
  const Matrix3& r = g.rotation();
  Matrix6 ad = Matrix6::Zero();
  ad.topLeftCorner<3, 3>() = r;
  ad.topRightCorner<3, 3>() = hat(g.position()) * r;
  ad.bottomRightCorner<3, 3>() = r;
  return ad;
}

Pose exp_twist(const Twist& xi, double theta) {
  const Vector3& v = xi.v();
  if (!xi.is_revolute() || std::abs(theta) < kSmallAngle) {
    return {Pose::Unchecked{}, Matrix3::Identity(), v * theta};
  }
  const Vector3& w = xi.omega();
  const Matrix3 w_hat = hat(w);
  const Matrix3 r =
      Matrix3::Identity() + std::sin(theta) * w_hat + (1.0 - std::cos(theta)) * w_hat * w_hat;
  const Vector3 p = (Matrix3::Identity() - r) * w.cross(v) + w * w.dot(v) * theta;
  return {Pose::Unchecked{}, r, p};
}

Vector3 log_rotation(const Matrix3& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.axis() * aa.angle();
}

}  // namespace robustik
