#include "robustik/error_propagation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace robustik {
namespace {

constexpr double kEigenFloor = 1e-14;

void require_bound(double c) {
  if (!std::isfinite(c) || c < 0.0) {
    throw std::invalid_argument(fmt::format("error bound c = {} must be finite and >= 0", c));
  }
}

}  // namespace

void JointNoiseModel::validate() const {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw std::invalid_argument(fmt::format("sigma = {} must be finite and >= 0", sigma));
  }
  if (!std::isfinite(k) || k <= 0.0) {
    throw std::invalid_argument(fmt::format("k = {} must be positive", k));
  }
  if (dim == 0) {
    throw std::invalid_argument("noise dimension must be positive");
  }
}

double joint_error_bound(const JointNoiseModel& model) {
  const double r = model.k * model.sigma;
  return r * r;
}

double max_position_error(const Eigen::Ref<const Eigen::MatrixXd>& jp, double c) {
  if (!jp.allFinite()) {
    throw std::invalid_argument("position Jacobian has non-finite entries");
  }
  require_bound(c);
  const Eigen::MatrixXd gram = jp * jp.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lambda_max = std::max(0.0, eig.eigenvalues().maxCoeff());
  return std::sqrt(c * lambda_max);
}

OrientationWorstCase max_orientation_error(const Eigen::Ref<const Eigen::MatrixXd>& jr,
                                           const UnitQuaternion& q_rel, double c) {
  if (jr.rows() != 3 || !jr.allFinite()) {
    throw std::invalid_argument("rotation Jacobian must be a finite 3 x N matrix");
  }
  require_bound(c);
  const Eigen::Matrix3d gram = jr * jr.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram);
  // eigenvalues are sorted ascending
  const double lambda_max = std::max(0.0, eig.eigenvalues()[2]);
  if (lambda_max == 0.0 || c == 0.0) {
    return {0.0, q_rel};
  }
  const Vector3 v_star = 0.5 * std::sqrt(c * lambda_max) * eig.eigenvectors().col(2);
  const Vector4 q = q_rel.coeffs();
  const Vector4 perturbed = q + q_rel.tangent_projection().transpose() * v_star;
  const Vector4 q_star = perturbed.normalized();
  const double o_star = std::acos(std::clamp(q.dot(q_star), -1.0, 1.0));
  return {o_star, UnitQuaternion::normalized(q_star)};
}

double weighted_metric(double p_star, double o_star, double gamma) {
  return p_star + gamma * o_star;
}

WorstCaseError worst_case_error(const JacobianMatrix& analytical, const UnitQuaternion& q_rel,
                                double c, double gamma) {
  if (analytical.kind != JacobianKind::analytical_relative) {
    throw std::invalid_argument("worst_case_error expects an analytical relative Jacobian");
  }
  const double p_star = max_position_error(analytical.linear(), c);
  const double o_star = max_orientation_error(analytical.angular(), q_rel, c).o_star;
  return {p_star, o_star, weighted_metric(p_star, o_star, gamma), gamma};
}

std::pair<Eigen::MatrixXd, bool> psd_pseudo_inverse(const Eigen::MatrixXd& gram) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  Eigen::VectorXd inv = eig.eigenvalues();
  bool floored = false;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (inv[i] < kEigenFloor) {
      inv[i] = 0.0;
      floored = true;
    } else {
      inv[i] = 1.0 / inv[i];
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd pinv = v * inv.asDiagonal() * v.transpose();
  return {0.5 * (pinv + pinv.transpose()), floored};
}

TaskEllipsoids build_ellipsoids(const JacobianMatrix& analytical, const UnitQuaternion& q_rel,
                                double c) {
  if (analytical.kind != JacobianKind::analytical_relative) {
    throw std::invalid_argument("build_ellipsoids expects an analytical relative Jacobian");
  }
  require_bound(c);
  const Matrix3X jp = analytical.linear();
  const Matrix3X jr = analytical.angular();

  auto [pos_inv, pos_degenerate] = psd_pseudo_inverse(jp * jp.transpose());
  auto [rot_inv, rot_degenerate] = psd_pseudo_inverse(jr * jr.transpose());
  const Matrix34 h = q_rel.tangent_projection();
  Eigen::MatrixXd orientation = h.transpose() * rot_inv * h;
  orientation = 0.5 * (orientation + orientation.transpose()).eval();

  return {{pos_inv, c, ErrorSpace::position, pos_degenerate},
          {orientation, c / 4.0, ErrorSpace::orientation, rot_degenerate}};
}

NoiseSampler::NoiseSampler(const JointNoiseModel& model, std::uint64_t seed)
    : model_(model), engine_(seed) {
  model_.validate();
}

Eigen::VectorXd NoiseSampler::next() {
  Eigen::VectorXd out(static_cast<Eigen::Index>(model_.dim));
  fill(out);
  return out;
}

void NoiseSampler::fill(Eigen::VectorXd& out) {
  out.resize(static_cast<Eigen::Index>(model_.dim));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = model_.sigma * normal_(engine_);
  }
}

std::vector<Eigen::VectorXd> sample_joint_noise(const JointNoiseModel& model, std::size_t count,
                                                std::uint64_t seed) {
  if (count == 0) {
    throw std::invalid_argument("sample count must be at least 1");
  }
  NoiseSampler sampler(model, seed);
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    samples.push_back(sampler.next());
  }
  return samples;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace robustik
