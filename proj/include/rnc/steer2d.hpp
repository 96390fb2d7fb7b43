#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "rnc/activation.hpp"
#include "rnc/control.hpp"
#include "rnc/errors.hpp"
#include "rnc/simulate.hpp"

namespace rnc {

/// Inverse of an odd, strictly increasing sigmoid with limit 1 on (-1, 1).
inline double act_inverse(const Activation& act, double v) {
  if (std::abs(v) >= act.limit) throw RangeError("act_inverse: |v| >= limit");
  if (v == 0.0) return 0.0;
  double sign = v < 0.0 ? -1.0 : 1.0;
  double y = std::abs(v);
  double lo = 0.0, hi = 1.0;
  while (act.eval(hi) < y) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = act.eval(mid) - y;
    if (std::abs(f) < 1e-15) return sign * mid;
    (f < 0.0 ? lo : hi) = mid;
  }
  return sign * 0.5 * (lo + hi);
}

/// B = (0,0)^T: autonomous planar system, no control authority.
struct Decoupled {};

/// B = (0,1)^T canonical form: dx/dt = act(a x + b y), dy/dt = act(u).
struct Form1 {
  double a = 0.0;
  double b = 0.0;
  Activation act = make_tanh();
};

/// Form1 after the change of variables xt = a x + b y, yt = y, v = act(u):
/// d(xt)/dt = a act(xt) + b v, d(yt)/dt = v, with |v| < 1.
struct Form1Transformed {
  double a = 0.0;
  double b = 0.0;
  Activation act = make_tanh();
};

/// B = (1,1)^T canonical form: dx/dt = act(a x + u), dy/dt = act(b y + u).
struct Form2 {
  double a = 0.0;
  double b = 0.0;
  Activation act = make_tanh();
};

using CanonicalForm = std::variant<Form1, Form2, Decoupled>;

/// Reduction of the degenerate planar cases. B must already be normalized to
/// one of (0,0), (0,1), (1,1), (1,-1). The (0,1) case absorbs the second row
/// of A into the unconstrained input; the (1,±1) cases are only accepted with
/// diagonal A (the general reduction is not attempted).
inline CanonicalForm canonicalize(const Vec& B, const Mat& A,
                                  const Activation& act = make_tanh()) {
  if (B.size() != 2 || A.rows() != 2 || A.cols() != 2)
    throw DimensionError("canonicalize: planar case only");
  double b0 = B[0], b1 = B[1];
  if (b0 == 0.0 && b1 == 0.0) return Decoupled{};
  if (b0 == 0.0 && b1 == 1.0) return Form1{A(0, 0), A(0, 1), act};
  if (b0 == 1.0 && (b1 == 1.0 || b1 == -1.0)) {
    if (A(0, 1) != 0.0 || A(1, 0) != 0.0)
      throw NotCanonical("canonicalize: (1,±1) case requires diagonal A");
    return Form2{A(0, 0), A(1, 1), act};  // y -> -y reflection fixes diag(A)
  }
  throw NotCanonical("canonicalize: B not one of the normalized degenerate cases");
}

struct HalfPlane {
  double c;                // the invariant set is {a x + b y >= c}
  double boundary_margin;  // lower bound for d/dt(ax+by) on the boundary
};

/// Forward-invariant half-plane of Form1 when |a| > |b|: no admissible input
/// can push the trajectory back across the boundary.
inline std::optional<HalfPlane> invariant_halfplane(const Form1& f) {
  double aa = std::abs(f.a), ab = std::abs(f.b);
  if (aa <= ab) return std::nullopt;
  double c_mag = act_inverse(f.act, ab / aa) + 0.1;
  // On {ax+by = c_mag}, d/dt(ax+by) = a*act(c_mag) + b*act(u) >= aa*act(c_mag) - ab
  // when a > 0; the a < 0 side follows by the point symmetry of the field.
  double margin = aa * f.act.eval(c_mag) - ab;
  return HalfPlane{f.a > 0.0 ? c_mag : -c_mag, margin};
}

struct F1Coords {
  double xt, yt, v;
};

inline F1Coords transform_f1(const Form1& f, double x, double y, double u) {
  return {f.a * x + f.b * y, y, f.act.eval(u)};
}

/// Inverse of transform_f1; fails when a = 0 (x not recoverable) or when v is
/// outside the open saturation range.
inline std::tuple<double, double, double> inverse_transform_f1(const Form1& f, double xt,
                                                               double yt, double v) {
  if (f.a == 0.0) throw NotInvertible("inverse_transform_f1: a = 0");
  if (std::abs(v) >= f.act.limit) throw RangeError("inverse_transform_f1: |v| >= limit");
  double y = yt;
  double x = (xt - f.b * yt) / f.a;
  double u = act_inverse(f.act, v);
  return {x, y, u};
}

/// Feedback v = g * act(xt) keeping the state on the ray through the origin;
/// the closed loop collapses to d(xt)/dt = kappa * act(xt).
struct RayPlan {
  double xt0, yt0;
  double gain;   // g = a yt0 / (xt0 - b yt0)
  double kappa;  // a xt0 / (xt0 - b yt0)
  bool admissible;
};

inline RayPlan ray_plan(const Form1Transformed& ft, double xt0, double yt0) {
  if (xt0 == 0.0 && yt0 == 0.0) throw DomainError("ray_plan: start at origin");
  double denom = xt0 - ft.b * yt0;
  if (std::abs(denom) <= 1e-12 * std::max(std::abs(xt0), std::abs(ft.b * yt0)))
    throw OnSingularLine("ray_plan: xt0 = b yt0");
  RayPlan plan;
  plan.xt0 = xt0;
  plan.yt0 = yt0;
  plan.gain = ft.a * yt0 / denom;
  plan.kappa = ft.a * xt0 / denom;
  // |act(xt(t))| <= act(|xt0|) along the decaying closed loop, so this bound
  // certifies |v| < 1 for all time.
  plan.admissible =
      plan.kappa < 0.0 && std::abs(plan.gain) * ft.act.eval(std::abs(xt0)) < ft.act.limit;
  return plan;
}

struct RayRun {
  Trajectory traj;              // states (xt, yt); control_trace holds v
  double collinearity_defect;   // max |yt xt0 - xt yt0|
  double v_max;                 // max |v(t)|
  bool monotone_decay;          // |xt| nonincreasing
  bool endpoint_shrunk;         // ||state(T)|| < ||start||
  bool certified;               // all of the above within tolerance
};

inline RayRun simulate_ray(const Form1Transformed& ft, const RayPlan& plan, double T,
                           double h = 1e-3) {
  if (!plan.admissible) throw NotAdmissible("simulate_ray: plan not admissible");
  auto field = [&](const Vec& s, const Vec&) {
    double v = plan.gain * ft.act.eval(s[0]);
    Vec d(2);
    d << ft.a * ft.act.eval(s[0]) + ft.b * v, v;
    return d;
  };
  ControlSchedule none;
  none.segments.push_back({Vec::Zero(0), T});
  Vec start(2);
  start << plan.xt0, plan.yt0;
  RayRun run;
  run.traj = integrate(field, start, none, T, h);

  run.collinearity_defect = 0.0;
  run.v_max = 0.0;
  run.monotone_decay = true;
  double prev = std::abs(plan.xt0);
  run.traj.control_trace.clear();
  for (std::size_t i = 0; i < run.traj.size(); ++i) {
    double xt = run.traj.states[i][0], yt = run.traj.states[i][1];
    double v = plan.gain * ft.act.eval(xt);
    Vec vv(1);
    vv << v;
    run.traj.control_trace.push_back(vv);
    run.v_max = std::max(run.v_max, std::abs(v));
    run.collinearity_defect =
        std::max(run.collinearity_defect, std::abs(yt * plan.xt0 - xt * plan.yt0));
    if (std::abs(xt) > prev + 1e-12) run.monotone_decay = false;
    prev = std::abs(xt);
  }
  double nstart = start.norm();
  run.endpoint_shrunk = run.traj.endpoint().norm() < nstart;
  run.certified = run.collinearity_defect <= 1e-6 * nstart && run.v_max < ft.act.limit &&
                  run.monotone_decay && run.endpoint_shrunk;
  return run;
}

/// Root of f(s, u) = y0 act(s a x0 + u) - x0 act(s b y0 + u) in u.
/// The slope df/du at a simple root has the sign of (y0 - x0); the root is
/// found by expanding bisection and polished by Newton to |f| <= 1e-10.
inline double implicit_k(const Form2& f2, double x0, double y0, double s) {
  if (s <= 0.0) throw DomainError("implicit_k: s must be > 0");
  if (x0 * y0 <= 0.0) throw DomainError("implicit_k: requires x0 y0 > 0");
  if (x0 == y0) throw NoBracket("implicit_k: x0 = y0 gives no sign change");

  auto f = [&](double u) {
    return y0 * f2.act.eval(s * f2.a * x0 + u) - x0 * f2.act.eval(s * f2.b * y0 + u);
  };
  auto fp = [&](double u) {
    return y0 * f2.act.deriv(s * f2.a * x0 + u) - x0 * f2.act.deriv(s * f2.b * y0 + u);
  };

  double lo = -1.0, hi = 1.0;
  double flo = f(lo), fhi = f(hi);
  for (int it = 0; it < 80 && flo * fhi > 0.0; ++it) {
    lo *= 2.0;
    hi *= 2.0;
    flo = f(lo);
    fhi = f(hi);
  }
  if (flo * fhi > 0.0) throw NoBracket("implicit_k: no sign change found");

  for (int it = 0; it < 200 && hi - lo > 1e-6; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 50 && std::abs(f(u)) > 1e-14; ++it) {
    double d = fp(u);
    if (d == 0.0) break;
    double step = f(u) / d;
    double next = u - step;
    if (next < lo || next > hi) {  // bisection fallback keeps the bracket
      double fm = f(u);
      if (flo * fm <= 0.0)
        hi = u;
      else
        lo = u;
      next = 0.5 * (lo + hi);
    }
    u = next;
  }
  if (std::abs(f(u)) > 1e-10) throw NonMonotone("implicit_k: root polish failed");
  double slope = fp(u);
  if (slope == 0.0 || slope * (y0 - x0) < 0.0)
    throw NonMonotone("implicit_k: df/du has the wrong sign at the root");
  return u;
}

/// The control curve s -> k(s) for a Form2 base point, eagerly tabulated on a
/// geometric grid in [eps, 1] and root-refined on demand for any other
/// s in (0, s_max]. The trajectory ratio s = xi/x0 decays below eps on long
/// horizons, so lookups below the table floor re-solve rather than fail.
struct ImplicitCurve {
  Form2 f2;
  double x0, y0;
  double eps = 1e-4;
  double s_max = 1.0 + 1e-4;
  std::vector<double> s_grid;
  std::vector<double> k_grid;

  ImplicitCurve(Form2 form, double x0_, double y0_, int table_size = 256)
      : f2(std::move(form)), x0(x0_), y0(y0_) {
    s_grid.reserve(table_size);
    k_grid.reserve(table_size);
    for (int i = 0; i < table_size; ++i) {
      double s = eps * std::pow(1.0 / eps, double(i) / double(table_size - 1));
      s_grid.push_back(s);
      k_grid.push_back(implicit_k(f2, x0, y0, s));
    }
  }

  double eval(double s) const {
    if (s <= 0.0 || s > s_max)
      throw KLookupOutOfRange("ImplicitCurve: s outside (0, s_max]");
    return implicit_k(f2, x0, y0, s);
  }
};

struct ImplicitRun {
  Trajectory traj;         // states (xi, eta); control_trace holds u = k(xi/x0)
  double form2_residual;   // max FD defect of d(eta)/dt = act(b eta + u)
  double ratio_defect;     // max |eta/xi - y0/x0|
  bool decays;             // |xi(T)| < |xi(0)| (reported, not asserted)
};

/// Integrates d(xi)/dt = act(a xi + k(xi/x0)) and carries eta = y0 xi / x0
/// along; by construction of k the pair solves Form2 under u(t) = k(xi/x0).
inline ImplicitRun simulate_implicit(const Form2& f2, double x0, double y0, double T,
                                     double h = 1e-3) {
  ImplicitCurve curve(f2, x0, y0);
  auto field = [&](const Vec& s, const Vec&) {
    Vec d(1);
    d << f2.act.eval(f2.a * s[0] + curve.eval(s[0] / x0));
    return d;
  };
  ControlSchedule none;
  none.segments.push_back({Vec::Zero(0), T});
  Vec start(1);
  start << x0;
  Trajectory xi = integrate(field, start, none, T, h);

  ImplicitRun run;
  run.traj.times = xi.times;
  const double ratio = y0 / x0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    Vec st(2);
    st << xi.states[i][0], ratio * xi.states[i][0];
    run.traj.states.push_back(st);
    Vec u(1);
    u << curve.eval(xi.states[i][0] / x0);
    run.traj.control_trace.push_back(u);
  }
  run.form2_residual = 0.0;
  for (std::size_t i = 1; i + 1 < run.traj.size(); ++i) {
    double dt = run.traj.times[i + 1] - run.traj.times[i - 1];
    double eta_dot = (run.traj.states[i + 1][1] - run.traj.states[i - 1][1]) / dt;
    double rhs = f2.act.eval(f2.b * run.traj.states[i][1] + run.traj.control_trace[i][0]);
    run.form2_residual = std::max(run.form2_residual, std::abs(eta_dot - rhs));
  }
  run.ratio_defect = 0.0;
  for (std::size_t i = 0; i < run.traj.size(); ++i) {
    double x = run.traj.states[i][0];
    if (std::abs(x) > 1e-12)
      run.ratio_defect = std::max(run.ratio_defect, std::abs(run.traj.states[i][1] / x - ratio));
  }
  run.decays = std::abs(run.traj.endpoint()[0]) < std::abs(x0);
  return run;
}

inline Vec form2_field(const Form2& f2, const Vec& x, const Vec& u) {
  if (x.size() != 2 || u.size() != 1) throw DimensionError("form2_field: planar, scalar input");
  Vec d(2);
  d << f2.act.eval(f2.a * x[0] + u[0]), f2.act.eval(f2.b * x[1] + u[0]);
  return d;
}

struct DiagonalReport {
  double max_defect = 0.0;  // max over schedules and time of |x(t) - y(t)|
  std::size_t runs = 0;
};

/// With a = b the diagonal {x = y} is invariant for every input: starting on
/// it, both components solve the same scalar equation.
inline DiagonalReport diagonal_invariance_check(const Form2& f2,
                                                const std::vector<ControlSchedule>& schedules,
                                                double c, double h = 1e-3) {
  if (f2.a != f2.b) throw DomainError("diagonal_invariance_check: requires a = b");
  DiagonalReport rep;
  Vec start(2);
  start << c, c;
  for (const auto& sched : schedules) {
    auto field = [&](const Vec& x, const Vec& u) { return form2_field(f2, x, u); };
    Trajectory traj = integrate(field, start, sched, sched.total_duration(),
                                std::min(h, sched.min_positive_duration()));
    for (const auto& st : traj.states)
      rep.max_defect = std::max(rep.max_defect, std::abs(st[0] - st[1]));
    ++rep.runs;
  }
  return rep;
}

/// Point reflection (x, y, u) -> (-x, -y, -u); an involution that maps valid
/// certificates to valid certificates because the field is odd.
inline Trajectory reflect(const Trajectory& traj) {
  Trajectory out;
  out.times = traj.times;
  out.states.reserve(traj.states.size());
  for (const auto& s : traj.states) out.states.push_back(-s);
  out.control_trace.reserve(traj.control_trace.size());
  for (const auto& u : traj.control_trace) out.control_trace.push_back(-u);
  return out;
}

inline RayPlan reflect(const RayPlan& plan) {
  RayPlan out = plan;
  out.xt0 = -plan.xt0;
  out.yt0 = -plan.yt0;
  // gain and kappa are invariant under the reflection: both numerator and
  // denominator change sign.
  return out;
}

}  // namespace rnc
