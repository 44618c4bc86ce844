#include "robustik/robust_ik.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "halton.hpp"

namespace robustik {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Brings joint i back into its range: revolute joints first try a 2 pi shift,
// then clamp. Unlimited revolute joints wrap into (-pi, pi].
void keep_in_range(const ArmModel& arm, JointAngles& theta) {
  for (std::size_t i = 0; i < arm.dof(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    double& t = theta[idx];
    const bool revolute = arm.twists()[i].is_revolute();
    if (!arm.has_limits()) {
      if (revolute) {
        t = std::remainder(t, kTwoPi);
      }
      continue;
    }
    const JointLimit& lim = arm.limits()[i];
    if (t >= lim.lower && t <= lim.upper) {
      continue;
    }
    if (revolute) {
      const double wrapped = lim.lower + std::fmod(std::fmod(t - lim.lower, kTwoPi) + kTwoPi, kTwoPi);
      if (wrapped <= lim.upper) {
        t = wrapped;
        continue;
      }
    }
    t = std::clamp(t, lim.lower, lim.upper);
  }
}

JointAngles seed_from_unit(const ArmModel& arm, const std::vector<double>& u) {
  JointAngles seed(static_cast<Eigen::Index>(arm.dof()));
  for (std::size_t i = 0; i < arm.dof(); ++i) {
    double lo = -std::numbers::pi;
    double hi = std::numbers::pi;
    if (arm.has_limits()) {
      lo = arm.limits()[i].lower;
      hi = arm.limits()[i].upper;
    }
    seed[static_cast<Eigen::Index>(i)] = lo + u[i] * (hi - lo);
  }
  return seed;
}

Vector6 placement_error(const Pose& target, const Pose& achieved) {
  Vector6 e;
  e.head<3>() = target.position() - achieved.position();
  e.tail<3>() = log_rotation(target.rotation() * achieved.rotation().transpose());
  return e;
}

void validate_strategy(const IkStrategy& s) {
  if (s.seeds == 0) {
    throw std::invalid_argument("IK strategy needs at least one seed");
  }
  if (!(s.tolerance > 0.0) || s.tolerance > 0.1 * kPairPoseTolerance) {
    throw std::invalid_argument(
        fmt::format("IK tolerance {} must be in (0, {}]", s.tolerance, 0.1 * kPairPoseTolerance));
  }
  if (!(s.damping >= 0.0) || !(s.max_step > 0.0) || !(s.dedup_tolerance > 0.0)) {
    throw std::invalid_argument("IK damping, step and dedup tolerance must be positive");
  }
}

std::vector<IKPair> combine(const DualArmModel& dual, const Pose& g_rel,
                            const std::vector<JointAngles>& left,
                            const std::vector<JointAngles>& right) {
  std::vector<IKPair> pairs;
  pairs.reserve(left.size() * right.size());
  for (const auto& tl : left) {
    for (const auto& tr : right) {
      IKPair p;
      p.theta_left = tl;
      p.theta_right = tr;
      p.residual = pose_residual(g_rel, relative_pose(dual, tl, tr)).composite();
      if (p.residual > kPairPoseTolerance) {
        throw std::logic_error(
            fmt::format("enumerated pair violates the pose tolerance (residual {})", p.residual));
      }
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

std::string unreachable_message(const EnumerationDiagnostics& d) {
  if (d.left.distinct == 0 && d.right.distinct == 0) {
    return "no IK solutions for either arm target";
  }
  if (d.left.distinct == 0) {
    return "no IK solutions for the left arm target";
  }
  if (d.right.distinct == 0) {
    return "no IK solutions for the right arm target";
  }
  return {};
}

}  // namespace

PoseResidual pose_residual(const Pose& target, const Pose& achieved) {
  const Vector6 e = placement_error(target, achieved);
  return {e.head<3>().norm(), e.tail<3>().norm()};
}

IkSolution solve_arm_ik(const ArmModel& arm, const Pose& target, const JointAngles& seed,
                        const IkStrategy& strategy, std::optional<std::size_t> locked_joint) {
  if (static_cast<std::size_t>(seed.size()) != arm.dof()) {
    throw std::invalid_argument("IK seed length does not match the arm");
  }
  IkSolution sol{seed, 0.0, 0, false};
  keep_in_range(arm, sol.theta);
  const double lambda2 = strategy.damping * strategy.damping;

  for (std::size_t it = 0;; ++it) {
    const Vector6 err = placement_error(target, forward_kinematics(arm, sol.theta));
    sol.residual = err.head<3>().norm() + err.tail<3>().norm();
    sol.iterations = it;
    if (sol.residual < strategy.tolerance) {
      sol.converged = true;
      return sol;
    }
    if (it == strategy.max_iterations || !std::isfinite(sol.residual)) {
      return sol;
    }
    Matrix6X jac = arm_analytical_jacobian(arm, sol.theta);
    if (locked_joint) {
      jac.col(static_cast<Eigen::Index>(*locked_joint)).setZero();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::VectorXd damped = s.cwiseQuotient((s.array().square() + lambda2).matrix());
    Eigen::VectorXd step =
        svd.matrixV() * damped.asDiagonal() * (svd.matrixU().transpose() * err);
    const double largest = step.cwiseAbs().maxCoeff();
    if (largest > strategy.max_step) {
      step *= strategy.max_step / largest;
    }
    sol.theta += step;
    keep_in_range(arm, sol.theta);
  }
}

std::vector<JointAngles> enumerate_arm_ik(const ArmModel& arm, const Pose& target,
                                          const IkStrategy& strategy, std::uint64_t stream,
                                          ArmEnumerationStats* stats) {
  validate_strategy(strategy);
  ArmEnumerationStats local;
  std::vector<JointAngles> found;
  const detail::ScrambledHalton halton(arm.dof(), derive_seed(strategy.seed, stream));
  std::uint64_t next_point = 0;

  auto attempt = [&](JointAngles seed, std::optional<std::size_t> locked) {
    ++local.attempted;
    const IkSolution sol = solve_arm_ik(arm, target, seed, strategy, locked);
    if (!sol.converged) {
      ++local.dropped_nonconverged;
      return;
    }
    ++local.converged;
    if (!arm.within_limits(sol.theta)) {
      ++local.dropped_limits;
      return;
    }
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const JointAngles& f) {
      return (f - sol.theta).cwiseAbs().maxCoeff() < strategy.dedup_tolerance;
    });
    if (!duplicate) {
      found.push_back(sol.theta);
    }
  };

  for (std::size_t s = 0; s < strategy.seeds; ++s) {
    attempt(seed_from_unit(arm, halton.point(next_point++)), std::nullopt);
  }

  const auto redundancy = arm.redundancy_joint();
  if (arm.dof() > 6 && redundancy && strategy.redundancy_steps > 0) {
    const auto r = static_cast<Eigen::Index>(*redundancy);
    double lo = -std::numbers::pi;
    double hi = std::numbers::pi;
    if (arm.has_limits()) {
      lo = arm.limits()[*redundancy].lower;
      hi = arm.limits()[*redundancy].upper;
    }
    const auto steps = static_cast<double>(strategy.redundancy_steps);
    for (std::size_t g = 0; g < strategy.redundancy_steps; ++g) {
      const double value = lo + (static_cast<double>(g) + 0.5) / steps * (hi - lo);
      for (std::size_t s = 0; s < strategy.seeds; ++s) {
        JointAngles seed = seed_from_unit(arm, halton.point(next_point++));
        seed[r] = value;
        attempt(seed, redundancy);
      }
    }
  }

  local.distinct = found.size();
  if (stats != nullptr) {
    *stats = local;
  }
  return found;
}

Enumeration enumerate_ik_pairs(const DualArmModel& dual, const Pose& g_left, const Pose& g_right,
                               const IkStrategy& strategy) {
  Enumeration out;
  const auto left = enumerate_arm_ik(dual.left(), g_left, strategy, 0, &out.diagnostics.left);
  const auto right = enumerate_arm_ik(dual.right(), g_right, strategy, 1, &out.diagnostics.right);
  out.pairs = combine(dual, g_left.inverse() * g_right, left, right);
  out.diagnostics.pairs = out.pairs.size();
  out.diagnostics.message = unreachable_message(out.diagnostics);
  return out;
}

Enumeration enumerate_ik_pairs_relative(const DualArmModel& dual, const Pose& g_rel,
                                        const IkStrategy& strategy) {
  validate_strategy(strategy);
  Enumeration out;
  const detail::ScrambledHalton halton(dual.left().dof(), derive_seed(strategy.seed, 2));
  std::vector<JointAngles> left_samples;
  for (std::size_t s = 0; s < strategy.left_samples; ++s) {
    left_samples.push_back(seed_from_unit(dual.left(), halton.point(s)));
  }
  out.diagnostics.left.attempted = left_samples.size();
  out.diagnostics.left.converged = left_samples.size();

  std::size_t left_used = 0;
  for (std::size_t s = 0; s < left_samples.size(); ++s) {
    const Pose g_right = forward_kinematics(dual.left(), left_samples[s]) * g_rel;
    ArmEnumerationStats stats;
    const auto right = enumerate_arm_ik(dual.right(), g_right, strategy, 3 + s, &stats);
    out.diagnostics.right.attempted += stats.attempted;
    out.diagnostics.right.converged += stats.converged;
    out.diagnostics.right.dropped_nonconverged += stats.dropped_nonconverged;
    out.diagnostics.right.dropped_limits += stats.dropped_limits;
    out.diagnostics.right.distinct += stats.distinct;
    if (!right.empty()) {
      ++left_used;
    }
    auto pairs = combine(dual, g_rel, {left_samples[s]}, right);
    std::move(pairs.begin(), pairs.end(), std::back_inserter(out.pairs));
  }
  out.diagnostics.left.distinct = left_used;
  out.diagnostics.pairs = out.pairs.size();
  if (out.pairs.empty()) {
    out.diagnostics.message = "no right-arm IK solutions for any sampled left configuration";
  }
  return out;
}

WorstCaseError score_configuration(const DualArmModel& dual, const JointAngles& theta_left,
                                   const JointAngles& theta_right, const JointNoiseModel& noise,
                                   double gamma) {
  noise.validate();
  if (noise.dim != dual.total_dof()) {
    throw std::invalid_argument(fmt::format("noise dimension {} does not match {} joints",
                                            noise.dim, dual.total_dof()));
  }
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw std::invalid_argument(fmt::format("gamma = {} must be finite and >= 0", gamma));
  }
  const Pose g_rel = relative_pose(dual, theta_left, theta_right);
  const JacobianMatrix ja =
      analytical_from_spatial(relative_spatial_jacobian(dual, theta_left, theta_right), g_rel);
  return worst_case_error(ja, g_rel.to_quaternion(), joint_error_bound(noise), gamma);
}

WorstCaseError score_pair(const DualArmModel& dual, const IKPair& pair,
                          const JointNoiseModel& noise, double gamma) {
  if (!pair.literal && !(pair.residual <= kPairPoseTolerance)) {
    throw std::invalid_argument(fmt::format(
        "IK pair residual {} exceeds the pose tolerance {}", pair.residual, kPairPoseTolerance));
  }
  return score_configuration(dual, pair.theta_left, pair.theta_right, noise, gamma);
}

void score_pairs(const DualArmModel& dual, std::vector<IKPair>& pairs,
                 const JointNoiseModel& noise, double gamma) {
  for (auto& p : pairs) {
    p.score = score_pair(dual, p, noise, gamma);
  }
}

std::size_t select_robust_index(const DualArmModel& dual, const std::vector<IKPair>& scored) {
  if (scored.empty()) {
    throw NoSolutionError("no IK pairs to select from");
  }
  const JointAngles mid_left = dual.left().mid_range();
  const JointAngles mid_right = dual.right().mid_range();
  auto key = [&](const IKPair& p) {
    if (!p.score) {
      throw std::invalid_argument("select_robust_index needs scored pairs");
    }
    const double dist = std::max((p.theta_left - mid_left).cwiseAbs().maxCoeff(),
                                 (p.theta_right - mid_right).cwiseAbs().maxCoeff());
    return std::make_tuple(p.score->m_star, p.score->p_star, dist);
  };
  std::size_t best = 0;
  auto best_key = key(scored[0]);
  for (std::size_t i = 1; i < scored.size(); ++i) {
    const auto k = key(scored[i]);
    if (k < best_key) {
      best = i;
      best_key = k;
    }
  }
  return best;
}

std::size_t worst_pair_index(const std::vector<IKPair>& scored) {
  if (scored.empty()) {
    throw NoSolutionError("no IK pairs to compare");
  }
  std::size_t worst = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (!scored[i].score) {
      throw std::invalid_argument("worst_pair_index needs scored pairs");
    }
    const auto& s = *scored[i].score;
    const auto& w = *scored[worst].score;
    if (std::tie(s.m_star, s.p_star) > std::tie(w.m_star, w.p_star)) {
      worst = i;
    }
  }
  return worst;
}

IKPair select_robust_pair(const DualArmModel& dual, std::vector<IKPair> pairs,
                          const JointNoiseModel& noise, double gamma) {
  if (pairs.empty()) {
    throw NoSolutionError("no IK pairs to select from");
  }
  score_pairs(dual, pairs, noise, gamma);
  return pairs[select_robust_index(dual, pairs)];
}

FeasibilityReport feasibility_check(const IKPair& best, double epsilon) {
  if (!best.score) {
    throw std::invalid_argument("feasibility_check needs a scored pair");
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw std::invalid_argument(fmt::format("epsilon = {} must be finite and >= 0", epsilon));
  }
  const double m_star = best.score->m_star;
  return {epsilon, best, m_star <= epsilon, epsilon - m_star};
}

}  // namespace robustik
