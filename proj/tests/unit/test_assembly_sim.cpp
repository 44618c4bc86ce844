#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "robustik/assembly_sim.hpp"
#include "robustik/config.hpp"

using namespace robustik;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix3 rot_x(double a) { return Eigen::AngleAxisd(a, Vector3::UnitX()).toRotationMatrix(); }
Matrix3 rot_z(double a) { return Eigen::AngleAxisd(a, Vector3::UnitZ()).toRotationMatrix(); }

// Widths that are exact in binary, so boundary cases compare exactly.
TaskSpec exact_task() {
  TaskSpec t;
  t.w_p = 0.25;
  t.w_h = 0.375;
  t.h_p = 0.125;
  return t;
}

// Hole frame seen from the peg frame for a peg hovering `gap` above the hole,
// shifted by `offset` in the hole plane and turned by `yaw` about the hole axis.
Pose hole_in_peg(double gap, const Vector3& offset, double yaw) {
  const Pose peg_in_hole(rot_x(kPi) * rot_z(yaw), Vector3(offset.x(), offset.y(), gap));
  return peg_in_hole.inverse();
}

Pose random_pose(std::mt19937_64& rng) {
  const UnitQuaternion q = UnitQuaternion::normalized(oracle::random_on_sphere(4, 1.0, rng));
  return Pose(q.to_rotation(), oracle::random_on_sphere(3, 0.5, rng));
}

struct BundledSetup {
  DualArmModel dual = load_model(ROBUSTIK_DATA_DIR "/baxter_model.json");
  TaskConfig task = load_task(ROBUSTIK_DATA_DIR "/peg_in_hole_task.json");
  std::vector<IKPair> pairs = load_pairs(ROBUSTIK_DATA_DIR "/reference_pairs.json", dual);
};

}  // namespace

TEST_CASE("task geometry") {
  TaskSpec t;
  t.w_p = 0.03;
  t.w_h = 0.04;
  CHECK(t.clearance() == doctest::Approx(0.005));
  CHECK(t.with_clearance(0.004).w_h == doctest::Approx(0.038));
  CHECK_THROWS_AS(t.with_clearance(0.0), std::invalid_argument);
  CHECK(t.peg_in_gripper().rotation() == Matrix3::Identity());
  CHECK(t.hole_in_gripper().position() == Vector3(0, 0, t.l_h));
}

TEST_CASE("hole alignment snaps the hole onto the peg axis") {
  const BundledSetup s;
  const TaskSpec& t = s.task.task;
  const Matrix3 expected = t.g_bp.rotation() * rot_x(kPi);
  CHECK((t.g_bh.rotation() - expected).cwiseAbs().maxCoeff() < 1e-12);
  const Vector3 offset = t.g_bh.position() - t.g_bp.position();
  CHECK(offset.cross(t.g_bp.rotation().col(2)).norm() < 1e-12);
  const Pose tip = t.desired_tip_relative();
  CHECK(tip.position().head<2>().norm() < 1e-12);
}

TEST_CASE("tip relative pose") {
  TaskSpec zero;
  zero.l_p = 0.0;
  zero.l_h = 0.0;
  std::mt19937_64 rng(41);
  const Pose g = random_pose(rng);
  CHECK((tip_relative_pose(g, zero).matrix() - g.matrix()).cwiseAbs().maxCoeff() < 1e-15);

  TaskSpec t;
  CHECK((tip_relative_pose(Pose::identity(), t).matrix() - Matrix4::Identity()).norm() < 1e-15);

  for (int i = 0; i < 20; ++i) {
    const Pose r = random_pose(rng);
    const Vector3 expected = r.position() + t.l_h * r.rotation().col(2) - Vector3(0, 0, t.l_p);
    CHECK((tip_relative_pose(r, t).position() - expected).norm() < 1e-14);
  }

  const BundledSetup s;
  const TaskSpec& task = s.task.task;
  CHECK((tip_relative_pose(task.desired_relative(), task).matrix() -
         task.desired_tip_relative().matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("assembly error measure examples") {
  const TaskSpec t;
  std::mt19937_64 rng(42);
  const Pose g = random_pose(rng);
  CHECK(assembly_error_measure(g, g, t) == 0.0);

  const Vector3 d(0.003, -0.001, 0.002);
  CHECK(assembly_error_measure(g, Pose::translation(d) * g, t) == doctest::Approx(d.norm()));

  const double dtheta = 0.05;
  const Pose turned = g * Pose(rot_z(dtheta), Vector3::Zero());
  CHECK(assembly_error_measure(g, turned, t) == doctest::Approx(t.h_p * std::sin(dtheta)));
}

TEST_CASE("insertion test examples") {
  const TaskSpec t = exact_task();
  const TrialOutcome centered = insertion_success_test(hole_in_peg(0.125, Vector3::Zero(), 0.0), t);
  CHECK(centered.success);
  CHECK(centered.diagnostic.empty());
  for (double m : centered.vertex_margins) {
    CHECK(m == doctest::Approx(t.clearance()).epsilon(1e-12));
  }

  const TrialOutcome edge =
      insertion_success_test(hole_in_peg(0.125, Vector3(t.clearance(), 0.0, 0.0), 0.0), t);
  CHECK(edge.success);
  CHECK(*std::min_element(edge.vertex_margins.begin(), edge.vertex_margins.end()) == 0.0);

  const TrialOutcome past = insertion_success_test(
      hole_in_peg(0.125, Vector3(t.clearance() + 1e-9, 0.0, 0.0), 0.0), t);
  CHECK_FALSE(past.success);

  const Pose sideways(rot_x(kPi / 2), Vector3(0.0, 0.0, 0.1));
  const TrialOutcome parallel = insertion_success_test(sideways, t);
  CHECK_FALSE(parallel.success);
  CHECK_FALSE(parallel.diagnostic.empty());
}

TEST_CASE("yawed peg corners follow the rotated-square geometry") {
  const TaskSpec t = exact_task();
  const double half_diag = t.w_p / std::sqrt(2.0);
  for (double yaw = 0.0; yaw < kPi / 4; yaw += 0.01) {
    const TrialOutcome out = insertion_success_test(hole_in_peg(0.1, Vector3::Zero(), yaw), t);
    // Corner of a square rotated by yaw reaches half_diag * cos(pi/4 - yaw).
    const double reach = half_diag * std::cos(kPi / 4 - yaw);
    for (double m : out.vertex_margins) {
      CHECK(m == doctest::Approx(0.5 * t.w_h - reach).epsilon(1e-9));
    }
    CHECK(out.success == (reach <= 0.5 * t.w_h));
  }
  // With a tighter hole a 0.5 rad yaw pushes the corners out.
  TaskSpec tight = t;
  tight.w_h = 0.3125;
  CHECK(half_diag * std::cos(kPi / 4 - 0.5) > 0.5 * tight.w_h);
  CHECK(insertion_success_test(hole_in_peg(0.1, Vector3::Zero(), 0.1), tight).success);
  CHECK_FALSE(insertion_success_test(hole_in_peg(0.1, Vector3::Zero(), 0.5), tight).success);
}

TEST_CASE("insertion test depends only on the relative pose") {
  const TaskSpec t;
  std::mt19937_64 rng(43);
  const Pose peg(rot_z(0.1), Vector3(0.3, 0.2, 0.1));
  const Pose hole = peg * hole_in_peg(0.02, Vector3(0.002, -0.001, 0.0), 0.02);
  const TrialOutcome base = insertion_success_test(peg.inverse() * hole, t);
  for (int i = 0; i < 10; ++i) {
    const Pose g = random_pose(rng);
    const TrialOutcome moved = insertion_success_test((g * peg).inverse() * (g * hole), t);
    CHECK(moved.success == base.success);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(moved.vertex_margins[k] == doctest::Approx(base.vertex_margins[k]).epsilon(1e-9));
    }
  }
}

TEST_CASE("Monte Carlo success rate") {
  const BundledSetup s;
  const IKPair& pair = s.pairs[0];
  const TaskSpec task = s.task.task.with_clearance(0.005);

  const MonteCarloResult exact =
      monte_carlo_success_rate(s.dual, pair, task, JointNoiseModel{0.0, 2.0, 14}, 500, 1);
  CHECK(exact.rate() == 100.0);

  const MonteCarloResult absurd =
      monte_carlo_success_rate(s.dual, pair, task, JointNoiseModel{1.0, 2.0, 14}, 2000, 1);
  CHECK(absurd.rate() < 5.0);

  const JointNoiseModel noise{0.003, 2.0, 14};
  const MonteCarloResult one = monte_carlo_success_rate(s.dual, pair, task, noise, 4500, 9, 1);
  const MonteCarloResult four = monte_carlo_success_rate(s.dual, pair, task, noise, 4500, 9, 4);
  CHECK(one.successes == four.successes);
  CHECK(one.trials == 4500);
  CHECK(one.rate() > 0.0);
  CHECK(one.rate() < 100.0);

  CHECK_THROWS_AS(monte_carlo_success_rate(s.dual, pair, task, noise, 0, 9),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      monte_carlo_success_rate(s.dual, pair, task, JointNoiseModel{0.003, 2.0, 13}, 10, 9),
      std::invalid_argument);
}

TEST_CASE("literal pairs are anchored to the desired pose") {
  const BundledSetup s;
  const TaskSpec& task = s.task.task;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(7);
  for (const auto& pair : s.pairs) {
    const TrialOutcome nominal = simulate_trial(s.dual, pair, task, zero, zero);
    CHECK(nominal.error_measure < 1e-12);
    CHECK(nominal.success);
  }
}

TEST_CASE("task error stays below the worst-case bound inside the noise ball") {
  // ||dp + l_h dz|| + h_p sin(dtheta_z) <= P* + 2 (l_h + h_p) O* to first order,
  // since the quaternion angle O* is half the rotation angle.
  const BundledSetup s;
  const TaskSpec& task = s.task.task;
  const JointNoiseModel noise{0.0045, 2.0, 14};
  const double gamma = 2.0 * (task.l_h + task.h_p);
  std::mt19937_64 rng(44);
  for (const auto& pair : s.pairs) {
    const WorstCaseError bound = score_pair(s.dual, pair, noise, gamma);
    const Pose nominal = relative_pose(s.dual, pair.theta_left, pair.theta_right);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Eigen::VectorXd d = oracle::random_on_sphere(14, std::sqrt(joint_error_bound(noise)), rng);
      const Pose achieved =
          relative_pose(s.dual, pair.theta_left + d.head(7), pair.theta_right + d.tail(7));
      worst = std::max(worst, assembly_error_measure(nominal, achieved, task));
    }
    CHECK(worst <= 1.05 * bound.m_star);
  }
}

TEST_CASE("sweep") {
  const BundledSetup s;
  const JointNoiseModel noise{0.0045, 2.0, 14};
  const TaskSpec& task = s.task.task;

  const SweepResult single = sweep(s.dual, {s.pairs[0]}, task, noise, {0.003}, {0.005}, 3000, 5);
  JointNoiseModel cell_noise = noise;
  cell_noise.sigma = 0.003;
  const MonteCarloResult direct = monte_carlo_success_rate(
      s.dual, s.pairs[0], task.with_clearance(0.005), cell_noise, 3000, derive_seed(5, 0));
  CHECK(single.cells.size() == 1);
  CHECK(single.cells[0].result.successes == direct.successes);

  const SweepResult grid =
      sweep(s.dual, s.pairs, task, noise, {0.001, 0.003, 0.006}, {0.003, 0.006}, 3000, 5, 2);
  CHECK(grid.cells.size() == 12);
  const std::string csv = grid.to_csv();
  CHECK(csv.rfind("sigma,clearance,pair_id,trials,success_pct\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  CHECK(csv.find("0.003,0.006,theta_minus,3000,") != std::string::npos);
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(grid.cell(0, j, p).result.rate() >= grid.cell(1, j, p).result.rate());
      CHECK(grid.cell(1, j, p).result.rate() >= grid.cell(2, j, p).result.rate());
    }
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(grid.cell(i, 1, p).result.rate() >= grid.cell(i, 0, p).result.rate());
    }
  }
  for (const auto& c : grid.cells) {
    CHECK(c.result.rate() >= 0.0);
    CHECK(c.result.rate() <= 100.0);
  }

  CHECK_THROWS_AS(sweep(s.dual, {}, task, noise, {0.001}, {0.003}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sweep(s.dual, s.pairs, task, noise, {}, {0.003}, 10, 1), std::invalid_argument);
}

TEST_CASE("doubling the trial count moves rates by less than two points") {
  const BundledSetup s;
  const TaskSpec task = s.task.task.with_clearance(0.005);
  const JointNoiseModel noise{0.0035, 2.0, 14};
  const double base = monte_carlo_success_rate(s.dual, s.pairs[1], task, noise, 10000, 17).rate();
  const double doubled =
      monte_carlo_success_rate(s.dual, s.pairs[1], task, noise, 20000, 18).rate();
  CHECK(std::abs(base - doubled) < 2.0);
}
