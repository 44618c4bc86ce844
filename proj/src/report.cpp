#include "report.hpp"

namespace robustik::report {

json matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(vector(m.row(r).transpose()));
  }
  return rows;
}

json vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
  }
  return out;
}

json pose(const Pose& g) {
  return {{"matrix", matrix(g.matrix())},
          {"position", vector(g.position())},
          {"quaternion", quaternion(g.to_quaternion())}};
}

json quaternion(const UnitQuaternion& q) { return vector(q.coeffs()); }

json score(const WorstCaseError& s) {
  return {{"p_star", s.p_star}, {"o_star", s.o_star}, {"m_star", s.m_star}, {"gamma", s.gamma}};
}

json pair(const IKPair& p, std::size_t index) {
  json out = {{"index", index},
              {"left", vector(p.theta_left)},
              {"right", vector(p.theta_right)},
              {"residual", p.residual},
              {"literal", p.literal}};
  if (!p.label.empty()) {
    out["id"] = p.label;
  }
  if (p.score) {
    out["score"] = score(*p.score);
  }
  return out;
}

json arm_stats(const ArmEnumerationStats& s) {
  return {{"attempted", s.attempted},
          {"converged", s.converged},
          {"dropped_nonconverged", s.dropped_nonconverged},
          {"dropped_limits", s.dropped_limits},
          {"distinct", s.distinct}};
}

json diagnostics(const EnumerationDiagnostics& d) {
  json out = {{"left", arm_stats(d.left)}, {"right", arm_stats(d.right)}, {"pairs", d.pairs}};
  if (!d.message.empty()) {
    out["message"] = d.message;
  }
  return out;
}

json ellipsoid(const ErrorEllipsoid& e) {
  return {{"characteristic", matrix(e.characteristic)},
          {"bound", e.bound},
          {"degenerate", e.degenerate}};
}

}  // namespace robustik::report
