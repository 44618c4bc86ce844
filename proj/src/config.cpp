#include "robustik/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace robustik {

using nlohmann::json;

namespace {

// Task poses are often printed with three decimals, so their rotation blocks
// are only orthonormal to about 1e-3 before re-projection.
constexpr double kTaskRotationTolerance = 1e-2;
constexpr double kModelRotationTolerance = 1e-6;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return fmt::format("{}[{}]", path, i);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) {
    throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(join(path, key), "missing required key");
  }
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw ConfigError(path, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw ConfigError(path, "must be finite");
  }
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v <= 0.0) {
    throw ConfigError(path, fmt::format("must be positive, got {}", v));
  }
  return v;
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) {
    throw ConfigError(path, "expected true or false");
  }
  return j.get<bool>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) {
    throw ConfigError(path, "expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], index(path, i)));
  }
  return out;
}

Eigen::VectorXd vector_of(const json& j, const std::string& path, std::size_t expected) {
  const auto values = number_list(j, path);
  if (values.size() != expected) {
    throw ConfigError(path, fmt::format("expected {} values, got {}", expected, values.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// 4x4 homogeneous matrix, nested row-major or 16 flat values.
Pose pose_of(const json& j, const std::string& path, double tolerance) {
  if (!j.is_array()) {
    throw ConfigError(path, "expected a 4x4 matrix");
  }
  Matrix4 m;
  if (j.size() == 16) {
    const Eigen::VectorXd flat = vector_of(j, path, 16);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        m(r, c) = flat[4 * r + c];
      }
    }
  } else if (j.size() == 4) {
    for (std::size_t r = 0; r < 4; ++r) {
      m.row(static_cast<Eigen::Index>(r)) = vector_of(j[r], index(path, r), 4).transpose();
    }
  } else {
    throw ConfigError(path, "expected a 4x4 matrix (4 rows or 16 values)");
  }
  try {
    return Pose::from_matrix(m, tolerance);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

Twist twist_of(const json& j, const std::string& path) {
  Vector6 xi;
  if (j.is_object()) {
    xi.head<3>() = vector_of(require(j, "v", path), join(path, "v"), 3);
    xi.tail<3>() = vector_of(require(j, "omega", path), join(path, "omega"), 3);
  } else {
    xi = vector_of(j, path, 6);
  }
  try {
    return Twist::from_coordinates(xi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

ArmModel arm_of(const json& j, const std::string& path) {
  const std::string twists_path = join(path, "twists");
  const json& tw = require(j, "twists", path);
  if (!tw.is_array() || tw.empty()) {
    throw ConfigError(twists_path, "expected a non-empty array of twists");
  }
  std::vector<Twist> twists;
  for (std::size_t i = 0; i < tw.size(); ++i) {
    twists.push_back(twist_of(tw[i], index(twists_path, i)));
  }
  const Pose g0 = pose_of(require(j, "g0", path), join(path, "g0"), kModelRotationTolerance);

  std::vector<JointLimit> limits;
  if (j.contains("limits")) {
    const std::string limits_path = join(path, "limits");
    const json& lj = j["limits"];
    if (!lj.is_array() || lj.size() != twists.size()) {
      throw ConfigError(limits_path, fmt::format("expected {} [lower, upper] pairs", twists.size()));
    }
    for (std::size_t i = 0; i < lj.size(); ++i) {
      const Eigen::VectorXd lim = vector_of(lj[i], index(limits_path, i), 2);
      if (!(lim[0] < lim[1])) {
        throw ConfigError(index(limits_path, i), "lower limit must be below upper limit");
      }
      limits.push_back({lim[0], lim[1]});
    }
  }

  std::optional<std::size_t> redundancy;
  if (j.contains("redundancy_joint")) {
    const std::string rpath = join(path, "redundancy_joint");
    const auto r = unsigned_integer(j["redundancy_joint"], rpath);
    if (r >= twists.size()) {
      throw ConfigError(rpath, fmt::format("joint index {} out of range", r));
    }
    redundancy = static_cast<std::size_t>(r);
  }
  return ArmModel(std::move(twists), g0, std::move(limits), redundancy);
}

void parse_ik(const json& j, const std::string& path, IkStrategy& ik) {
  if (!j.is_object()) {
    throw ConfigError(path, "expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    const std::string p = join(path, key);
    if (key == "seeds") {
      ik.seeds = unsigned_integer(value, p);
    } else if (key == "redundancy_steps") {
      ik.redundancy_steps = unsigned_integer(value, p);
    } else if (key == "damping") {
      ik.damping = number(value, p);
    } else if (key == "tolerance") {
      ik.tolerance = positive(value, p);
    } else if (key == "max_iterations") {
      ik.max_iterations = unsigned_integer(value, p);
    } else if (key == "max_step") {
      ik.max_step = positive(value, p);
    } else if (key == "dedup_tolerance") {
      ik.dedup_tolerance = positive(value, p);
    } else if (key == "left_samples") {
      ik.left_samples = unsigned_integer(value, p);
    } else {
      throw ConfigError(p, "unknown IK option");
    }
  }
  if (ik.seeds == 0) {
    throw ConfigError(join(path, "seeds"), "must be at least 1");
  }
  if (ik.tolerance > 0.1 * kPairPoseTolerance) {
    throw ConfigError(join(path, "tolerance"),
                      fmt::format("must not exceed {}", 0.1 * kPairPoseTolerance));
  }
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", key, message)), key_(std::move(key)) {}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string(), "cannot open file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), fmt::format("invalid JSON ({})", e.what()));
  }
}

DualArmModel parse_model(const json& doc) {
  ArmModel left = arm_of(require(doc, "left", ""), "left");
  ArmModel right = arm_of(require(doc, "right", ""), "right");
  return {std::move(left), std::move(right)};
}

NoiseConfig parse_noise(const json& doc) {
  const json& j = doc.contains("noise") ? doc["noise"] : doc;
  const std::string path = doc.contains("noise") ? "noise" : "";
  NoiseConfig out;
  if (!j.is_object()) {
    throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  }
  if (j.contains("sigma")) {
    out.sigma = number(j["sigma"], join(path, "sigma"));
    if (out.sigma < 0.0) {
      throw ConfigError(join(path, "sigma"), "must be >= 0");
    }
  }
  if (j.contains("k")) {
    out.k = positive(j["k"], join(path, "k"));
  }
  if (j.contains("gamma")) {
    out.gamma = number(j["gamma"], join(path, "gamma"));
    if (out.gamma < 0.0) {
      throw ConfigError(join(path, "gamma"), "must be >= 0");
    }
  }
  if (j.contains("seed")) {
    out.seed = unsigned_integer(j["seed"], join(path, "seed"));
  }
  return out;
}

TaskConfig parse_task(const json& doc) {
  TaskConfig out;
  TaskSpec& t = out.task;
  t.g_bp = pose_of(require(doc, "g_bp", ""), "g_bp", kTaskRotationTolerance);
  t.g_bh = pose_of(require(doc, "g_bh", ""), "g_bh", kTaskRotationTolerance);
  if (doc.contains("l_p")) {
    t.l_p = number(doc["l_p"], "l_p");
  }
  if (doc.contains("l_h")) {
    t.l_h = number(doc["l_h"], "l_h");
  }
  if (doc.contains("h_p")) {
    t.h_p = number(doc["h_p"], "h_p");
  }
  if (doc.contains("w_p")) {
    t.w_p = positive(doc["w_p"], "w_p");
  }
  if (doc.contains("clearances")) {
    out.clearances = number_list(doc["clearances"], "clearances");
    for (std::size_t i = 0; i < out.clearances.size(); ++i) {
      if (out.clearances[i] <= 0.0) {
        throw ConfigError(index("clearances", i), "clearance must be positive");
      }
    }
  }
  if (doc.contains("w_h")) {
    t.w_h = number(doc["w_h"], "w_h");
  } else if (!out.clearances.empty()) {
    t.w_h = t.w_p + 2.0 * out.clearances.front();
  } else {
    t.w_h = t.w_p + 0.01;
  }
  if (!(t.w_h > t.w_p)) {
    throw ConfigError("w_h", "hole width must exceed peg width");
  }
  if (doc.contains("sigmas")) {
    out.sigmas = number_list(doc["sigmas"], "sigmas");
    for (std::size_t i = 0; i < out.sigmas.size(); ++i) {
      if (out.sigmas[i] < 0.0) {
        throw ConfigError(index("sigmas", i), "sigma must be >= 0");
      }
    }
  }
  if (doc.contains("trials")) {
    out.trials = unsigned_integer(doc["trials"], "trials");
    if (out.trials == 0) {
      throw ConfigError("trials", "must be at least 1");
    }
  }
  if (doc.contains("seed")) {
    out.seed = unsigned_integer(doc["seed"], "seed");
  }
  if (doc.contains("epsilon")) {
    out.epsilon = number(doc["epsilon"], "epsilon");
    if (*out.epsilon < 0.0) {
      throw ConfigError("epsilon", "must be >= 0");
    }
  }
  if (doc.contains("relative_only")) {
    out.relative_only = boolean(doc["relative_only"], "relative_only");
  }
  if (doc.contains("ik")) {
    parse_ik(doc["ik"], "ik", out.ik);
  }
  if (doc.contains("align") && boolean(doc["align"], "align")) {
    t = align_hole_to_peg(t);
  }
  return out;
}

std::vector<IKPair> parse_pairs(const json& doc, const DualArmModel& dual) {
  const json& list = require(doc, "pairs", "");
  if (!list.is_array() || list.empty()) {
    throw ConfigError("pairs", "expected a non-empty array");
  }
  std::vector<IKPair> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = index("pairs", i);
    const json& p = list[i];
    IKPair pair;
    pair.literal = true;
    if (p.contains("id")) {
      if (!p["id"].is_string()) {
        throw ConfigError(join(path, "id"), "expected a string");
      }
      pair.label = p["id"].get<std::string>();
    } else {
      pair.label = fmt::format("pair{}", i);
    }
    pair.theta_left = vector_of(require(p, "left", path), join(path, "left"), dual.left().dof());
    pair.theta_right =
        vector_of(require(p, "right", path), join(path, "right"), dual.right().dof());
    out.push_back(std::move(pair));
  }
  return out;
}

DualArmModel load_model(const std::filesystem::path& path) {
  return parse_model(read_json_file(path));
}

NoiseConfig load_noise(const std::filesystem::path& path) {
  return parse_noise(read_json_file(path));
}

TaskConfig load_task(const std::filesystem::path& path) {
  return parse_task(read_json_file(path));
}

std::vector<IKPair> load_pairs(const std::filesystem::path& path, const DualArmModel& dual) {
  return parse_pairs(read_json_file(path), dual);
}

}  // namespace robustik
