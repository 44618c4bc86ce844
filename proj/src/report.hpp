#pragma once

#include <json.hpp>

#include "robustik/assembly_sim.hpp"
#include "robustik/error_propagation.hpp"
#include "robustik/kinematics.hpp"
#include "robustik/robust_ik.hpp"
#include "robustik/se3.hpp"

namespace robustik::report {

using nlohmann::json;

json matrix(const Eigen::MatrixXd& m);
json vector(const Eigen::VectorXd& v);
json pose(const Pose& g);
json quaternion(const UnitQuaternion& q);
json score(const WorstCaseError& s);
json pair(const IKPair& p, std::size_t index);
json arm_stats(const ArmEnumerationStats& s);
json diagnostics(const EnumerationDiagnostics& d);
json ellipsoid(const ErrorEllipsoid& e);

}  // namespace robustik::report
