#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustik/assembly_sim.hpp"
#include "robustik/kinematics.hpp"
#include "robustik/robust_ik.hpp"

namespace robustik {

/// Invalid or missing configuration; `key` names the offending field
/// (dotted path, e.g. "left.twists[3]").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct NoiseConfig {
  double sigma = 0.0045;
  double k = 2.0;
  double gamma = 0.0;
  std::optional<std::uint64_t> seed;
};

struct TaskConfig {
  TaskSpec task;
  std::vector<double> sigmas;
  std::vector<double> clearances;
  std::size_t trials = 10000;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  bool relative_only = false;
  IkStrategy ik;
};

/// Parsed JSON document; throws ConfigError naming the file on I/O or
/// syntax errors.
[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

[[nodiscard]] DualArmModel parse_model(const nlohmann::json& doc);
[[nodiscard]] NoiseConfig parse_noise(const nlohmann::json& doc);
[[nodiscard]] TaskConfig parse_task(const nlohmann::json& doc);
/// {"pairs": [{"id": ..., "left": [...], "right": [...]}]}; every pair is literal.
[[nodiscard]] std::vector<IKPair> parse_pairs(const nlohmann::json& doc, const DualArmModel& dual);

[[nodiscard]] DualArmModel load_model(const std::filesystem::path& path);
[[nodiscard]] NoiseConfig load_noise(const std::filesystem::path& path);
[[nodiscard]] TaskConfig load_task(const std::filesystem::path& path);
[[nodiscard]] std::vector<IKPair> load_pairs(const std::filesystem::path& path,
                                             const DualArmModel& dual);

}  // namespace robustik
