#pragma once

#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "rnc/activation.hpp"
#include "rnc/control.hpp"
#include "rnc/controllability.hpp"
#include "rnc/errors.hpp"
#include "rnc/reach.hpp"
#include "rnc/systems.hpp"

namespace rnc {

using json = nlohmann::json;

inline Activation activation_by_name(const std::string& name) {
  if (name == "tanh") return make_tanh();
  throw DomainError("unknown activation: " + name);
}

inline Mat parse_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw DimensionError(std::string(what) + ": expected nested array");
  const auto rows = j.size();
  const auto cols = j[0].size();
  Mat M(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw DimensionError(std::string(what) + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
  }
  return M;
}

/// System file: {"n":2,"m":1,"A":[[..],[..]],"B":[[..],[..]],"activation":"tanh"}
inline RecurrentNet load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open system file: " + path);
  json j = json::parse(in);
  Mat A = parse_matrix(j.at("A"), "A");
  Mat B = parse_matrix(j.at("B"), "B");
  if (j.contains("n") && j["n"].get<int>() != A.rows())
    throw DimensionError("system file: n does not match A");
  if (j.contains("m") && j["m"].get<int>() != B.cols())
    throw DimensionError("system file: m does not match B");
  std::string act = j.value("activation", "tanh");
  return RecurrentNet(A, B, activation_by_name(act));
}

/// Control file: {"segments":[{"u":[1.0],"t":0.5}, ...]}
inline ControlSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open control file: " + path);
  json j = json::parse(in);
  ControlSchedule sched;
  for (const auto& seg : j.at("segments")) {
    const auto& uj = seg.at("u");
    Vec u(uj.size());
    for (std::size_t i = 0; i < uj.size(); ++i) u[static_cast<Eigen::Index>(i)] = uj[i].get<double>();
    double t = seg.at("t").get<double>();
    if (t < 0.0) throw DomainError("control file: negative duration");
    sched.segments.push_back({u, t});
  }
  return sched;
}

inline json to_json(const Violation& v) {
  json j;
  if (v.kind == Violation::Kind::ZeroRow) {
    j["kind"] = "ZeroRow";
    j["i"] = v.i;
  } else {
    j["kind"] = "EqualRows";
    j["i"] = v.i;
    j["j"] = v.j;
    j["sign"] = v.sign;
  }
  return j;
}

inline json to_json(const BClassReport& rep) {
  json j;
  j["in_class"] = rep.in_class;
  j["tolerance"] = rep.tolerance;
  j["violations"] = json::array();
  for (const auto& v : rep.violations) j["violations"].push_back(to_json(v));
  return j;
}

inline json to_json(const AdmissibilityReport& rep) {
  json j;
  j["odd_defect"] = rep.odd_defect;
  j["bound_defect"] = rep.bound_defect;
  j["ratio_monotone"] = rep.ratio_monotone;
  j["verdict"] = to_string(rep.verdict);
  if (rep.verdict == AdmissVerdict::Fails) j["reason"] = rep.fail_reason;
  if (rep.witness_s) j["witness_s"] = *rep.witness_s;
  j["ratio_samples"] = json::array();
  for (const auto& r : rep.ratio_samples)
    j["ratio_samples"].push_back({{"a", r.a}, {"b", r.b}, {"s", r.s}, {"ratio", r.ratio}});
  return j;
}

inline json to_json(const Certificate& c) {
  json j;
  j["p"] = std::vector<double>(c.p.data(), c.p.data() + c.p.size());
  j["violation"] = to_json(c.kind);
  return j;
}

inline json to_json(const Verdict& v) {
  json j;
  j["verdict"] = v.completely_controllable ? "CompletelyControllable" : "NotControllable";
  if (v.activation_report) j["activation_report"] = to_json(*v.activation_report);
  j["certificates"] = json::array();
  for (const auto& c : v.certificates) j["certificates"].push_back(to_json(c));
  return j;
}

/// Bitmap rows encoded as run lengths of alternating 0/1 cells, starting
/// with the count of zeros.
inline json to_json(const ReachGrid& g) {
  json j;
  j["box"] = {g.xmin, g.xmax, g.ymin, g.ymax};
  j["cell"] = g.cell;
  j["nx"] = g.nx;
  j["ny"] = g.ny;
  j["source"] = {g.source_ix, g.source_iy};
  j["t_step"] = g.t_step;
  j["budget_exceeded"] = g.budget_exceeded;
  j["expansions"] = g.expansions;
  j["reached_count"] = g.reached_count();
  json controls = json::array();
  for (const auto& u : g.control_values)
    controls.push_back(std::vector<double>(u.data(), u.data() + u.size()));
  j["controls"] = controls;
  json rows = json::array();
  for (int iy = 0; iy < g.ny; ++iy) {
    json rle = json::array();
    int run = 0;
    std::uint8_t cur = 0;
    for (int ix = 0; ix < g.nx; ++ix) {
      std::uint8_t v = g.reached[std::size_t(iy) * g.nx + ix];
      if (v == cur) {
        ++run;
      } else {
        rle.push_back(run);
        cur = v;
        run = 1;
      }
    }
    rle.push_back(run);
    rows.push_back(rle);
  }
  j["rows_rle"] = rows;
  return j;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto n = traj.states.empty() ? 0 : traj.states.front().size();
  const auto m = traj.control_trace.empty() ? 0 : traj.control_trace.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << (i + 1);
  os << "\n";
  os.precision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.times[k];
    for (Eigen::Index i = 0; i < n; ++i) os << "," << traj.states[k][i];
    if (!traj.control_trace.empty())
      for (Eigen::Index i = 0; i < m; ++i) os << "," << traj.control_trace[k][i];
    os << "\n";
  }
}

}  // namespace rnc
