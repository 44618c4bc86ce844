#include "robustik/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "report.hpp"
#include "robustik/config.hpp"

namespace robustik {
namespace {

using nlohmann::json;

struct Options {
  std::string model_path;
  std::string task_path;
  std::string noise_path;
  std::string pairs_path;
  std::string out_path;
  std::string summary_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::size_t threads = 1;
  std::string side = "left";
  std::vector<double> theta;
  std::vector<double> theta_left;
  std::vector<double> theta_right;
};

// Everything a command needs, loaded before any computation starts.
struct Inputs {
  std::optional<DualArmModel> model;
  std::optional<TaskConfig> task;
  std::optional<NoiseConfig> noise;
  std::vector<IKPair> literal_pairs;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("robustik", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* level = std::getenv("ROBUSTIK_LOG")) {
    logger->set_level(spdlog::level::from_str(level));
  }
  return logger;
}

Inputs load_inputs(const Options& opt, bool needs_task, bool needs_noise) {
  Inputs in;
  if (opt.model_path.empty()) {
    throw ConfigError("--model", "a model file is required");
  }
  in.model = load_model(opt.model_path);
  if (needs_task) {
    if (opt.task_path.empty()) {
      throw ConfigError("--task", "a task file is required");
    }
    in.task = load_task(opt.task_path);
  }
  if (needs_noise) {
    if (opt.noise_path.empty()) {
      throw ConfigError("--noise", "a noise file is required");
    }
    in.noise = load_noise(opt.noise_path);
  }
  if (!opt.pairs_path.empty()) {
    in.literal_pairs = load_pairs(opt.pairs_path, *in.model);
  }
  if (opt.seed) {
    in.seed = *opt.seed;
  } else if (in.task && in.task->seed) {
    in.seed = *in.task->seed;
  } else if (in.noise && in.noise->seed) {
    in.seed = *in.noise->seed;
  }
  in.threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
  return in;
}

JointAngles joint_vector(const std::vector<double>& values, std::size_t dof,
                         const std::string& flag) {
  if (values.size() != dof) {
    throw ConfigError(flag, fmt::format("expected {} joint values, got {}", dof, values.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(dof));
}

JointNoiseModel noise_model(const NoiseConfig& cfg, const DualArmModel& dual) {
  return {cfg.sigma, cfg.k, dual.total_dof()};
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ConfigError("--out", fmt::format("cannot write {}", path));
  }
  file << text;
}

void emit_json(const json& doc, const std::string& path, std::ostream& out) {
  emit(doc.dump(2) + "\n", path, out);
}

// Enumerated, scored candidate pairs for the task.
struct Candidates {
  Enumeration enumeration;
  std::size_t robust = 0;
  std::size_t worst = 0;
};

Candidates enumerate_and_score(const Inputs& in, spdlog::logger& log) {
  const DualArmModel& dual = *in.model;
  const TaskConfig& task = *in.task;
  IkStrategy strategy = task.ik;
  strategy.seed = in.seed;

  Candidates c;
  if (task.relative_only) {
    c.enumeration = enumerate_ik_pairs_relative(dual, task.task.desired_relative(), strategy);
  } else {
    c.enumeration = enumerate_ik_pairs(dual, task.task.desired_left(), task.task.desired_right(),
                                       strategy);
  }
  const auto& d = c.enumeration.diagnostics;
  log.info("IK: left {} distinct of {} seeds, right {} distinct of {} seeds, {} pairs",
           d.left.distinct, d.left.attempted, d.right.distinct, d.right.attempted, d.pairs);
  if (c.enumeration.pairs.empty()) {
    throw NoSolutionError(fmt::format("no IK solutions: {}", d.message));
  }
  score_pairs(dual, c.enumeration.pairs, noise_model(*in.noise, dual), in.noise->gamma);
  c.robust = select_robust_index(dual, c.enumeration.pairs);
  c.worst = worst_pair_index(c.enumeration.pairs);
  c.enumeration.pairs[c.robust].label = "robust";
  if (c.worst != c.robust) {
    c.enumeration.pairs[c.worst].label = "worst";
  }
  return c;
}

// Pairs to simulate: the literal pairs when given, else robust and worst.
std::vector<IKPair> simulation_pairs(const Inputs& in, spdlog::logger& log) {
  if (!in.literal_pairs.empty()) {
    return in.literal_pairs;
  }
  const Candidates c = enumerate_and_score(in, log);
  std::vector<IKPair> out{c.enumeration.pairs[c.robust]};
  if (c.worst != c.robust) {
    out.push_back(c.enumeration.pairs[c.worst]);
  }
  return out;
}

int cmd_fk(const Options& opt, std::ostream& out) {
  const Inputs in = load_inputs(opt, false, false);
  if (opt.side != "left" && opt.side != "right") {
    throw ConfigError("--side", "must be left or right");
  }
  const ArmModel& arm = opt.side == "left" ? in.model->left() : in.model->right();
  const JointAngles theta = joint_vector(opt.theta, arm.dof(), "--theta");
  emit_json({{"side", opt.side},
             {"theta", report::vector(theta)},
             {"pose", report::pose(forward_kinematics(arm, theta))}},
            opt.out_path, out);
  return kExitOk;
}

int cmd_relpose(const Options& opt, std::ostream& out) {
  const Inputs in = load_inputs(opt, !opt.task_path.empty(), false);
  const DualArmModel& dual = *in.model;
  const JointAngles tl = joint_vector(opt.theta_left, dual.left().dof(), "--theta-left");
  const JointAngles tr = joint_vector(opt.theta_right, dual.right().dof(), "--theta-right");
  const Pose g_rel = relative_pose(dual, tl, tr);
  json doc = {{"theta_left", report::vector(tl)},
              {"theta_right", report::vector(tr)},
              {"g_left", report::pose(forward_kinematics(dual.left(), tl))},
              {"g_right", report::pose(forward_kinematics(dual.right(), tr))},
              {"g_rel", report::pose(g_rel)}};
  if (in.task) {
    const TaskSpec& task = in.task->task;
    const Pose desired = task.desired_relative();
    doc["tip_relative"] = report::pose(tip_relative_pose(g_rel, task));
    doc["desired_rel"] = report::pose(desired);
    doc["residual"] = pose_residual(desired, g_rel).composite();
    doc["error_measure"] = assembly_error_measure(desired, g_rel, task);
  }
  emit_json(doc, opt.out_path, out);
  return kExitOk;
}

int cmd_jacobian(const Options& opt, std::ostream& out) {
  const Inputs in = load_inputs(opt, false, false);
  const DualArmModel& dual = *in.model;
  const JointAngles tl = joint_vector(opt.theta_left, dual.left().dof(), "--theta-left");
  const JointAngles tr = joint_vector(opt.theta_right, dual.right().dof(), "--theta-right");
  const JacobianMatrix js = relative_spatial_jacobian(dual, tl, tr);
  const JacobianMatrix ja = analytical_from_spatial(js, relative_pose(dual, tl, tr));
  const QuaternionJacobian jq = quaternion_jacobian(dual, tl, tr);
  emit_json({{"spatial", report::matrix(js.m)},
             {"analytical", report::matrix(ja.m)},
             {"q_rel", report::quaternion(jq.q_rel)},
             {"quaternion_rate", report::matrix(jq.quaternion_rate())}},
            opt.out_path, out);
  return kExitOk;
}

int cmd_errset(const Options& opt, std::ostream& out) {
  const Inputs in = load_inputs(opt, false, true);
  const DualArmModel& dual = *in.model;
  const JointAngles tl = joint_vector(opt.theta_left, dual.left().dof(), "--theta-left");
  const JointAngles tr = joint_vector(opt.theta_right, dual.right().dof(), "--theta-right");
  const JointNoiseModel noise = noise_model(*in.noise, dual);
  noise.validate();
  const double c = joint_error_bound(noise);
  const Pose g_rel = relative_pose(dual, tl, tr);
  const JacobianMatrix ja = analytical_from_spatial(relative_spatial_jacobian(dual, tl, tr), g_rel);
  const UnitQuaternion q_rel = g_rel.to_quaternion();
  const WorstCaseError s = worst_case_error(ja, q_rel, c, in.noise->gamma);
  const OrientationWorstCase ow = max_orientation_error(ja.angular(), q_rel, c);
  const TaskEllipsoids ell = build_ellipsoids(ja, q_rel, c);
  emit_json({{"sigma", noise.sigma},
             {"k", noise.k},
             {"c", c},
             {"score", report::score(s)},
             {"q_rel", report::quaternion(q_rel)},
             {"q_worst", report::quaternion(ow.q_worst)},
             {"position_ellipsoid", report::ellipsoid(ell.position)},
             {"orientation_ellipsoid", report::ellipsoid(ell.orientation)}},
            opt.out_path, out);
  return kExitOk;
}

int cmd_select(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const Inputs in = load_inputs(opt, true, true);
  const DualArmModel& dual = *in.model;
  const Candidates c = enumerate_and_score(in, log);
  const auto& pairs = c.enumeration.pairs;

  json listed = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    listed.push_back(report::pair(pairs[i], i));
  }
  json doc = {{"seed", in.seed},
              {"sigma", in.noise->sigma},
              {"k", in.noise->k},
              {"c", joint_error_bound(noise_model(*in.noise, dual))},
              {"enumeration", report::diagnostics(c.enumeration.diagnostics)},
              {"pairs", listed},
              {"robust_index", c.robust},
              {"worst_index", c.worst},
              {"robust", report::pair(pairs[c.robust], c.robust)}};

  const std::optional<double> epsilon = opt.epsilon ? opt.epsilon : in.task->epsilon;
  if (epsilon) {
    const FeasibilityReport f = feasibility_check(pairs[c.robust], *epsilon);
    doc["feasibility"] = {{"epsilon", f.epsilon}, {"feasible", f.feasible}, {"margin", f.margin}};
  }
  if (!in.literal_pairs.empty()) {
    std::vector<IKPair> literal = in.literal_pairs;
    score_pairs(dual, literal, noise_model(*in.noise, dual), in.noise->gamma);
    const Pose desired = in.task->task.desired_relative();
    json scored = json::array();
    for (std::size_t i = 0; i < literal.size(); ++i) {
      json entry = report::pair(literal[i], i);
      entry["residual"] =
          pose_residual(desired, relative_pose(dual, literal[i].theta_left, literal[i].theta_right))
              .composite();
      scored.push_back(entry);
    }
    doc["literal_pairs"] = scored;
  }
  emit_json(doc, opt.out_path, out);
  return kExitOk;
}

int cmd_simulate(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const Inputs in = load_inputs(opt, true, true);
  const DualArmModel& dual = *in.model;
  const std::vector<IKPair> pairs = simulation_pairs(in, log);
  const TaskSpec& task = in.task->task;
  const JointNoiseModel noise = noise_model(*in.noise, dual);

  json results = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const MonteCarloResult r =
        monte_carlo_success_rate(dual, pairs[i], task, noise, in.task->trials, in.seed, in.threads);
    results.push_back({{"id", pairs[i].label.empty() ? fmt::format("pair{}", i) : pairs[i].label},
                       {"trials", r.trials},
                       {"successes", r.successes},
                       {"success_pct", r.rate()}});
  }
  emit_json({{"seed", in.seed},
             {"sigma", noise.sigma},
             {"clearance", task.clearance()},
             {"results", results}},
            opt.out_path, out);
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out, spdlog::logger& log) {
  const Inputs in = load_inputs(opt, true, true);
  const TaskConfig& task = *in.task;
  if (task.sigmas.empty()) {
    throw ConfigError("sigmas", "sweep needs a non-empty sigma list");
  }
  if (task.clearances.empty()) {
    throw ConfigError("clearances", "sweep needs a non-empty clearance list");
  }
  const DualArmModel& dual = *in.model;
  const std::vector<IKPair> pairs = simulation_pairs(in, log);
  const SweepResult result = sweep(dual, pairs, task.task, noise_model(*in.noise, dual),
                                   task.sigmas, task.clearances, task.trials, in.seed, in.threads);
  emit(result.to_csv(), opt.out_path, out);

  if (!opt.summary_path.empty()) {
    json per_pair = json::array();
    for (std::size_t p = 0; p < result.pair_ids.size(); ++p) {
      double total = 0.0;
      std::size_t cells = 0;
      for (const auto& cell : result.cells) {
        if (cell.pair_index == p) {
          total += cell.result.rate();
          ++cells;
        }
      }
      per_pair.push_back({{"id", result.pair_ids[p]}, {"mean_success_pct", total / cells}});
    }
    std::size_t dominated = 0;
    if (result.pair_ids.size() >= 2) {
      for (std::size_t i = 0; i < result.sigmas.size(); ++i) {
        for (std::size_t j = 0; j < result.clearances.size(); ++j) {
          if (result.cell(i, j, 0).result.rate() >= result.cell(i, j, 1).result.rate()) {
            ++dominated;
          }
        }
      }
    }
    json summary = {{"seed", in.seed},
                    {"trials", result.trials},
                    {"sigmas", result.sigmas},
                    {"clearances", result.clearances},
                    {"pairs", per_pair}};
    if (result.pair_ids.size() >= 2) {
      summary["cells_first_pair_not_worse"] = dominated;
      summary["cells"] = result.sigmas.size() * result.clearances.size();
    }
    std::ofstream file(opt.summary_path, std::ios::binary);
    if (!file) {
      throw ConfigError("--summary", fmt::format("cannot write {}", opt.summary_path));
    }
    file << summary.dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto log = make_logger(err);
  CLI::App app{"Robust IK-pair selection and peg-in-hole simulation for dual-arm robots"};
  app.name(args.empty() ? "robustik" : args.front());
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", opt.model_path, "dual-arm model JSON")->required();
    cmd->add_option("--out", opt.out_path, "output file (default: stdout)");
    cmd->add_option("--seed", opt.seed, "random seed (overrides config seeds)");
    cmd->add_option("--threads", opt.threads, "worker threads, 0 = all cores");
  };
  auto add_pair_angles = [&](CLI::App* cmd) {
    cmd->add_option("--theta-left", opt.theta_left, "left joint angles, comma separated")
        ->delimiter(',')
        ->required();
    cmd->add_option("--theta-right", opt.theta_right, "right joint angles, comma separated")
        ->delimiter(',')
        ->required();
  };

  auto* fk = app.add_subcommand("fk", "forward kinematics of one arm");
  add_common(fk);
  fk->add_option("--side", opt.side, "left or right");
  fk->add_option("--theta", opt.theta, "joint angles, comma separated")->delimiter(',')->required();

  auto* relpose = app.add_subcommand("relpose", "relative pose of the two grippers");
  add_common(relpose);
  add_pair_angles(relpose);
  relpose->add_option("--task", opt.task_path, "task JSON (adds the peg-to-hole pose)");

  auto* jacobian = app.add_subcommand("jacobian", "relative Jacobians at a configuration");
  add_common(jacobian);
  add_pair_angles(jacobian);

  auto* errset = app.add_subcommand("errset", "worst-case errors and error ellipsoids");
  add_common(errset);
  add_pair_angles(errset);
  errset->add_option("--noise", opt.noise_path, "joint noise JSON")->required();

  auto* select = app.add_subcommand("select", "enumerate, score and select the robust IK pair");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo insertion success rates");
  auto* sweep_cmd = app.add_subcommand("sweep", "success rates over the sigma x clearance grid");
  for (auto* cmd : {select, simulate, sweep_cmd}) {
    add_common(cmd);
    cmd->add_option("--task", opt.task_path, "task JSON")->required();
    cmd->add_option("--noise", opt.noise_path, "joint noise JSON")->required();
    cmd->add_option("--pairs", opt.pairs_path, "literal joint vectors JSON");
  }
  select->add_option("--epsilon", opt.epsilon, "task tolerance for the feasibility check");
  sweep_cmd->add_option("--summary", opt.summary_path, "summary JSON file");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) {
      rest.pop_back();
    }
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (fk->parsed()) {
      return cmd_fk(opt, out);
    }
    if (relpose->parsed()) {
      return cmd_relpose(opt, out);
    }
    if (jacobian->parsed()) {
      return cmd_jacobian(opt, out);
    }
    if (errset->parsed()) {
      return cmd_errset(opt, out);
    }
    if (select->parsed()) {
      return cmd_select(opt, out, *log);
    }
    if (simulate->parsed()) {
      return cmd_simulate(opt, out, *log);
    }
    return cmd_sweep(opt, out, *log);
  } catch (const ConfigError& e) {
    log->error("config error: {}", e.what());
    return kExitConfig;
  } catch (const NoSolutionError& e) {
    log->error("{}", e.what());
    return kExitNoSolution;
  } catch (const std::exception& e) {
    log->error("numerical failure: {}", e.what());
    return kExitNumerical;
  }
}

}  // namespace robustik
