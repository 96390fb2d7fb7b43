// Command-line front end: controllability verdicts, simulation, steering
// demonstrations, and reachability oracles over JSON system files.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rnc/activation.hpp"
#include "rnc/controllability.hpp"
#include "rnc/json_io.hpp"
#include "rnc/mollify.hpp"
#include "rnc/reach.hpp"
#include "rnc/simulate.hpp"
#include "rnc/steer2d.hpp"
#include "rnc/svg.hpp"
#include "rnc/systems.hpp"

namespace {

using rnc::json;
using rnc::Mat;
using rnc::Vec;

/// Write-to-temp-then-rename so consumers never observe partial files.
void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw rnc::DomainError("cannot write: " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void emit(const std::string& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

int run(int argc, char** argv) {
  CLI::App app{"Controllability analysis of continuous-time recurrent nets"};
  // --h is a step-size option on several subcommands, so help is --help only
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for all samplers");

  // activation check
  auto* act_cmd = app.add_subcommand("activation", "activation diagnostics");
  auto* act_check = act_cmd->add_subcommand("check", "admissibility grid check");
  std::string act_name = "tanh", act_report;
  act_check->add_option("--name", act_name, "activation name");
  act_check->add_option("--report", act_report, "output JSON path")->required();

  // check-b
  auto* checkb = app.add_subcommand("check-b", "row-class membership of B");
  std::string cb_system, cb_out;
  double cb_tol = 0.0;
  checkb->add_option("--system", cb_system)->required();
  checkb->add_option("--tol", cb_tol);
  checkb->add_option("--out", cb_out);

  // verdict
  auto* verdict = app.add_subcommand("verdict", "controllability verdict with certificates");
  std::string vd_system, vd_out;
  verdict->add_option("--system", vd_system)->required();
  verdict->add_option("--out", vd_out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "integrate under a control schedule");
  std::string sm_system, sm_x0, sm_control, sm_out;
  double sm_T = 1.0, sm_h = 1e-3;
  sim->add_option("--system", sm_system)->required();
  sim->add_option("--x0", sm_x0)->required();
  sim->add_option("--control", sm_control)->required();
  sim->add_option("--T", sm_T)->required();
  sim->add_option("--h", sm_h);
  sim->add_option("--out", sm_out)->required();

  // steer2d
  auto* steer = app.add_subcommand("steer2d", "planar steering constructions");
  std::string st_form = "f1t", st_start, st_out;
  double st_a = 0.0, st_b = 0.0, st_T = 1.0, st_h = 1e-3;
  steer->add_option("--form", st_form, "f1 | f1t | f2");
  steer->add_option("--a", st_a)->required();
  steer->add_option("--b", st_b)->required();
  steer->add_option("--start", st_start)->required();
  steer->add_option("--T", st_T)->required();
  steer->add_option("--h", st_h);
  steer->add_option("--out", st_out, "plan.json[,traj.csv[,phase.svg]]")->required();

  // mollify-demo
  auto* mol = app.add_subcommand("mollify-demo", "smoothing convergence and fixed-point cover");
  std::string ml_system, ml_control, ml_l = "10,20,40,80", ml_out;
  std::string ml_x0 = "0,0";
  mol->add_option("--system", ml_system)->required();
  mol->add_option("--control", ml_control)->required();
  mol->add_option("--l", ml_l, "comma-separated kernel scales");
  mol->add_option("--x0", ml_x0);
  mol->add_option("--out", ml_out)->required();

  // reach
  auto* reach = app.add_subcommand("reach", "grid reachability oracle");
  std::string rc_system, rc_x0 = "0,0", rc_box = "-1,1,-1,1", rc_controls, rc_out;
  double rc_cell = 0.1, rc_tstep = 0.25;
  long rc_budget = 1000000;
  reach->add_option("--system", rc_system)->required();
  reach->add_option("--x0", rc_x0);
  reach->add_option("--box", rc_box, "xmin,xmax,ymin,ymax");
  reach->add_option("--cell", rc_cell);
  reach->add_option("--controls", rc_controls)->required();
  reach->add_option("--tstep", rc_tstep);
  reach->add_option("--budget", rc_budget);
  reach->add_option("--out", rc_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  if (act_check->parsed()) {
    rnc::Activation act = rnc::activation_by_name(act_name);
    auto rep = rnc::check_admissible(act, {-1.0, 0.0, 2.0}, {1.5, 2.0}, {5.0, 10.0, 15.0, 20.0});
    emit(act_report, rnc::to_json(rep));
    return 0;
  }
  if (checkb->parsed()) {
    auto net = rnc::load_system(cb_system);
    json j = rnc::to_json(rnc::b_class_check(net.B, cb_tol));
    if (cb_out.empty())
      std::cout << j.dump(2) << "\n";
    else
      emit(cb_out, j);
    return 0;
  }
  if (verdict->parsed()) {
    auto net = rnc::load_system(vd_system);
    json j = rnc::to_json(rnc::controllability_verdict(net));
    if (vd_out.empty())
      std::cout << j.dump(2) << "\n";
    else
      emit(vd_out, j);
    return 0;
  }
  if (sim->parsed()) {
    auto net = rnc::load_system(sm_system);
    auto sched = rnc::load_schedule(sm_control);
    Vec x0 = to_vec(parse_csv_doubles(sm_x0));
    auto field = [&](const Vec& x, const Vec& u) { return rnc::recurrent_field(net, x, u); };
    auto traj = rnc::integrate(field, x0, sched, sm_T, sm_h, true);
    std::ostringstream csv;
    rnc::write_trajectory_csv(csv, traj);
    write_atomic(sm_out, csv.str());
    return 0;
  }
  if (steer->parsed()) {
    auto outs = [&] {
      std::vector<std::string> parts;
      std::stringstream ss(st_out);
      std::string item;
      while (std::getline(ss, item, ',')) parts.push_back(item);
      return parts;
    }();
    auto start = parse_csv_doubles(st_start);
    if (start.size() != 2) throw rnc::DimensionError("steer2d: start must be planar");

    json plan_json;
    rnc::Trajectory traj;
    std::vector<rnc::SvgOverlay> overlays;
    bool have_traj = false;

    if (st_form == "f1" || st_form == "f1t") {
      rnc::Form1Transformed ft{st_a, st_b};
      double xt0 = start[0], yt0 = start[1];
      if (st_form == "f1") {
        rnc::Form1 f1{st_a, st_b};
        auto tc = rnc::transform_f1(f1, start[0], start[1], 0.0);
        xt0 = tc.xt;
        yt0 = tc.yt;
      }
      auto plan = rnc::ray_plan(ft, xt0, yt0);
      plan_json = {{"form", st_form},          {"a", st_a},
                   {"b", st_b},                {"start", {xt0, yt0}},
                   {"gain", plan.gain},        {"kappa", plan.kappa},
                   {"admissible", plan.admissible}};
      if (plan.admissible) {
        auto run = rnc::simulate_ray(ft, plan, st_T, st_h);
        traj = run.traj;
        have_traj = true;
        plan_json["collinearity_defect"] = run.collinearity_defect;
        plan_json["v_max"] = run.v_max;
        plan_json["certified"] = run.certified;
        overlays.push_back({0.0, 0.0, xt0, yt0, "ray"});
      }
    } else if (st_form == "f2") {
      rnc::Form2 f2{st_a, st_b};
      auto run = rnc::simulate_implicit(f2, start[0], start[1], st_T, st_h);
      traj = run.traj;
      have_traj = true;
      plan_json = {{"form", "f2"},
                   {"a", st_a},
                   {"b", st_b},
                   {"base", {start[0], start[1]}},
                   {"form2_residual", run.form2_residual},
                   {"ratio_defect", run.ratio_defect},
                   {"decays", run.decays}};
      overlays.push_back({0.0, 0.0, start[0], start[1], "ray"});
    } else {
      throw CLI::ValidationError("--form must be f1, f1t or f2");
    }

    if (!outs.empty()) emit(outs[0], plan_json);
    if (outs.size() > 1 && have_traj) {
      std::ostringstream csv;
      rnc::write_trajectory_csv(csv, traj);
      write_atomic(outs[1], csv.str());
    }
    if (outs.size() > 2 && have_traj) write_atomic(outs[2], rnc::emit_phase_svg(traj, overlays));
    return 0;
  }
  if (mol->parsed()) {
    auto net = rnc::load_system(ml_system);
    auto sched = rnc::load_schedule(ml_control);
    Vec x0 = to_vec(parse_csv_doubles(ml_x0));
    auto ls = parse_csv_doubles(ml_l);
    auto field = [&](const Vec& x, const Vec& u) { return rnc::recurrent_field(net, x, u); };

    json j;
    j["mass_defects"] = json::array();
    for (double l : {1.0, 10.0, 100.0}) {
      // trapezoid over the support; the kernel is flat to all orders there
      rnc::BumpKernel k(l);
      const int N = 20000;
      double acc = 0.0, w = 2.0 / l / N;
      for (int i = 0; i <= N; ++i) {
        double t = -1.0 / l + w * i;
        acc += k(t) * ((i == 0 || i == N) ? 0.5 : 1.0);
      }
      j["mass_defects"].push_back({{"l", l}, {"defect", std::abs(acc * w - 1.0)}});
    }
    j["convergence"] = json::array();
    auto conv = rnc::endpoint_convergence(field, x0, sched, ls);
    for (const auto& c : conv) j["convergence"].push_back({{"l", c.l}, {"error", c.error}});

    std::vector<Vec> targets;
    Vec nominal =
        rnc::integrate(field, x0, rnc::smooth_control(sched, ls.back()), sched.total_duration(),
                       1e-3)
            .endpoint();
    for (int i = 0; i < 16; ++i) {
      double ang = 2.0 * M_PI * i / 16.0;
      Vec p = nominal;
      p[0] += 0.01 * std::cos(ang);
      p[1] += 0.01 * std::sin(ang);
      targets.push_back(p);
    }
    auto cover = rnc::fixed_point_cover(field, x0, sched, targets, ls.back());
    j["cover"] = {{"all_hit", cover.all_hit}, {"success_radius", cover.success_radius}};
    emit(ml_out, j);
    return 0;
  }
  if (reach->parsed()) {
    auto net = rnc::load_system(rc_system);
    if (net.n() != 2) throw rnc::NotPlanar("reach: planar systems only");
    auto box = parse_csv_doubles(rc_box);
    if (box.size() != 4) throw rnc::DomainError("reach: --box needs xmin,xmax,ymin,ymax");
    Vec x0 = to_vec(parse_csv_doubles(rc_x0));
    std::vector<Vec> controls;
    for (double u : parse_csv_doubles(rc_controls)) {
      Vec v(1);
      v << u;
      controls.push_back(v);
    }
    auto field = [&](const Vec& x, const Vec& u) { return rnc::recurrent_field(net, x, u); };
    auto grid = rnc::grid_reach(field, x0, box[0], box[1], box[2], box[3], rc_cell, controls,
                                rc_tstep, rc_budget);
    emit(rc_out, rnc::to_json(grid));
    return 0;
  }
  return 2;
}

}  // namespace

const char* error_name(const std::exception& e) {
#define RNC_ERROR_NAME(T) \
  if (dynamic_cast<const rnc::T*>(&e)) return #T;
  RNC_ERROR_NAME(DimensionError)
  RNC_ERROR_NAME(RankDeficient)
  RNC_ERROR_NAME(GridTooCoarse)
  RNC_ERROR_NAME(StepTooLarge)
  RNC_ERROR_NAME(NonFiniteState)
  RNC_ERROR_NAME(HorizonMismatch)
  RNC_ERROR_NAME(WindowOverlap)
  RNC_ERROR_NAME(CertificateMismatch)
  RNC_ERROR_NAME(InvalidViolation)
  RNC_ERROR_NAME(NotCanonical)
  RNC_ERROR_NAME(OnSingularLine)
  RNC_ERROR_NAME(NotAdmissible)
  RNC_ERROR_NAME(NotInvertible)
  RNC_ERROR_NAME(RangeError)
  RNC_ERROR_NAME(NoBracket)
  RNC_ERROR_NAME(NonMonotone)
  RNC_ERROR_NAME(KLookupOutOfRange)
  RNC_ERROR_NAME(NotPlanar)
  RNC_ERROR_NAME(DomainError)
#undef RNC_ERROR_NAME
  return "Error";
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.get_name() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err;
    err["type"] = error_name(e);
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
