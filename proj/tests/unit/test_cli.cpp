#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "robustik/assembly_sim.hpp"
#include "robustik/cli.hpp"
#include "robustik/config.hpp"

using namespace robustik;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kModel = ROBUSTIK_DATA_DIR "/baxter_model.json";
const std::string kTask = ROBUSTIK_DATA_DIR "/peg_in_hole_task.json";
const std::string kNoise = ROBUSTIK_DATA_DIR "/noise.json";
const std::string kPairs = ROBUSTIK_DATA_DIR "/reference_pairs.json";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "robustik");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / "robustik_cli_test") {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] std::string write(const std::string& name, const json& doc) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << doc.dump(2);
    return p.string();
  }
  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Planar 3R arm with unit links along x from `x0`, rotating about z.
json planar_arm(double x0) {
  json twists = json::array();
  for (int i = 0; i < 3; ++i) {
    const double x = x0 + i;
    twists.push_back({0.0, -x, 0.0, 0.0, 0.0, 1.0});
  }
  return {{"twists", twists},
          {"g0", {{1, 0, 0, x0 + 3}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}}};
}

}  // namespace

TEST_CASE("fk at zero angles returns the home pose") {
  const Run r = run({"fk", "--model", kModel, "--side", "right", "--theta", "0,0,0,0,0,0,0"});
  REQUIRE(r.code == kExitOk);
  const json doc = json::parse(r.out);
  const DualArmModel dual = load_model(kModel);
  const Matrix4 g0 = dual.right().g0().matrix();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(doc["pose"]["matrix"][i][j].get<double>() == doctest::Approx(g0(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("usage and configuration errors exit with code 2") {
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"bogus"}).code == kExitConfig);
  CHECK(run({"fk", "--theta", "0"}).code == kExitConfig);
  CHECK(run({"fk", "--model", kModel, "--theta", "0,0"}).code == kExitConfig);
  CHECK(run({"fk", "--model", kModel, "--side", "up", "--theta", "0,0,0,0,0,0,0"}).code ==
        kExitConfig);
  CHECK(run({"--help"}).code == kExitOk);

  TempDir dir;
  json model = read_json_file(kModel);
  model["left"]["twists"][2] = "oops";
  const Run r = run({"fk", "--model", dir.write("bad_model.json", model), "--theta",
                     "0,0,0,0,0,0,0"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("left.twists[2]") != std::string::npos);

  CHECK(run({"errset", "--model", kModel, "--noise", dir.file("absent.json"), "--theta-left",
             "0,0,0,0,0,0,0", "--theta-right", "0,0,0,0,0,0,0"})
            .code == kExitConfig);
}

TEST_CASE("unreachable targets exit with code 3") {
  TempDir dir;
  const std::string model =
      dir.write("planar.json", {{"left", planar_arm(0.0)}, {"right", planar_arm(2.0)}});
  const json task = {{"g_bp", {{1, 0, 0, 10}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}},
                     {"g_bh", {{-1, 0, 0, 11}, {0, 1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}}},
                     {"w_p", 0.03},
                     {"ik", {{"seeds", 8}, {"redundancy_steps", 0}}}};
  const std::string task_path = dir.write("task.json", task);
  const std::string noise_path = dir.write("noise.json", {{"sigma", 0.001}});
  const Run r = run({"select", "--model", model, "--task", task_path, "--noise", noise_path});
  CHECK(r.code == kExitNoSolution);
  CHECK(r.err.find("no IK solutions") != std::string::npos);
  CHECK(run({"simulate", "--model", model, "--task", task_path, "--noise", noise_path}).code ==
        kExitNoSolution);
}

TEST_CASE("reruns are byte identical") {
  TempDir dir;
  const std::vector<std::vector<std::string>> commands = {
      {"fk", "--model", kModel, "--theta", "0.1,0.2,0.3,0.4,0.5,0.6,0.7"},
      {"relpose", "--model", kModel, "--task", kTask, "--theta-left",
       "-0.362,0.321,-2.994,0.572,1.279,1.932,-0.494", "--theta-right",
       "0.494,0.551,2.881,1.210,-1.367,1.552,0.840"},
      {"errset", "--model", kModel, "--noise", kNoise, "--theta-left",
       "-0.12,0.084,-1.98,0.507,0.324,1.81,-0.347", "--theta-right",
       "0.278,-0.71,0.71,1.203,-2.09,-1.336,3.05"},
  };
  for (const auto& cmd : commands) {
    const Run a = run(cmd);
    const Run b = run(cmd);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
  }

  json task = read_json_file(kTask);
  task["trials"] = 2500;
  const std::string task_path = dir.write("task.json", task);
  const std::vector<std::string> sim = {"simulate", "--model", kModel, "--task", task_path,
                                        "--noise", kNoise, "--pairs", kPairs, "--out"};
  auto with = [&](std::vector<std::string> args, const std::string& out,
                  const std::string& threads) {
    args.push_back(dir.file(out));
    args.insert(args.end(), {"--threads", threads});
    return run(args).code;
  };
  REQUIRE(with(sim, "a.json", "1") == kExitOk);
  REQUIRE(with(sim, "b.json", "1") == kExitOk);
  REQUIRE(with(sim, "c.json", "3") == kExitOk);
  CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));
  CHECK(slurp(dir.file("a.json")) == slurp(dir.file("c.json")));
  CHECK(json::parse(slurp(dir.file("a.json")))["seed"] == 20240601);

  std::vector<std::string> reseeded = sim;
  reseeded.insert(reseeded.end(), {dir.file("d.json"), "--seed", "5"});
  REQUIRE(run(reseeded).code == kExitOk);
  CHECK(json::parse(slurp(dir.file("d.json")))["seed"] == 5);
}

TEST_CASE("single-cell sweep matches a direct Monte Carlo call") {
  TempDir dir;
  json task = read_json_file(kTask);
  task["sigmas"] = {0.003};
  task["clearances"] = {0.005};
  task["trials"] = 3000;
  task["seed"] = 77;
  const std::string task_path = dir.write("task.json", task);
  const Run r = run({"sweep", "--model", kModel, "--task", task_path, "--noise", kNoise,
                     "--pairs", kPairs, "--summary", dir.file("summary.json")});
  REQUIRE(r.code == kExitOk);

  const DualArmModel dual = load_model(kModel);
  const TaskConfig cfg = parse_task(task);
  const auto pairs = load_pairs(kPairs, dual);
  std::string expected = "sigma,clearance,pair_id,trials,success_pct\n";
  for (const auto& pair : pairs) {
    const MonteCarloResult mc =
        monte_carlo_success_rate(dual, pair, cfg.task.with_clearance(0.005),
                                 JointNoiseModel{0.003, 2.0, 14}, 3000, derive_seed(77, 0));
    expected += fmt::format("0.003,0.005,{},3000,{:.2f}\n", pair.label, mc.rate());
  }
  CHECK(r.out == expected);

  const json summary = json::parse(slurp(dir.file("summary.json")));
  CHECK(summary["cells"] == 1);
  CHECK(summary["pairs"].size() == 2);
}
