#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "rnc/control.hpp"
#include "rnc/errors.hpp"

namespace rnc {

namespace detail {

template <typename C>
concept HasMinDuration = requires(const C& c) { c.min_positive_duration(); };

template <typename Control>
std::vector<double> knot_times(const Control& c) {
  if constexpr (requires { c.step; c.samples; }) {
    std::vector<double> out;
    for (std::size_t i = 0; i < c.samples.size(); ++i) out.push_back(c.step * double(i));
    return out;
  } else {
    return c.switch_times();
  }
}

}  // namespace detail

/// Classical fixed-step RK4. Step boundaries are aligned to the control's
/// switching times, so no step straddles a discontinuity; the last step of
/// each smooth interval is shortened to land on the boundary exactly.
template <typename Field, typename Control>
Trajectory integrate(const Field& field, const Vec& x0, const Control& control, double T,
                     double h, bool record_control = false) {
  if (h <= 0.0) throw DomainError("integrate: h must be > 0");
  if (T <= 0.0) throw DomainError("integrate: T must be > 0");
  if constexpr (detail::HasMinDuration<Control>) {
    if (h > control.min_positive_duration())
      throw StepTooLarge("integrate: h exceeds the shortest control segment");
  }

  std::set<double> cuts{0.0, T};
  for (double s : control.switch_times())
    if (s > 0.0 && s < T) cuts.insert(s);
  std::vector<double> breaks(cuts.begin(), cuts.end());

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  if (record_control) traj.control_trace.push_back(control.value_at(0.0));

  Vec x = x0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double t0 = breaks[b], t1 = breaks[b + 1];
    // Control evaluation for this smooth interval; the right endpoint belongs
    // to the next segment under right-continuity, so nudge it inward.
    auto u_at = [&](double t) {
      if (t >= t1) t = std::nextafter(t1, t0);
      return control.value_at(t);
    };
    const auto nsteps = static_cast<long>(std::ceil((t1 - t0) / h - 1e-12));
    const double hs = (t1 - t0) / static_cast<double>(nsteps);
    for (long k = 0; k < nsteps; ++k) {
      const double t = t0 + hs * static_cast<double>(k);
      const Vec u1 = u_at(t), u2 = u_at(t + 0.5 * hs), u3 = u_at(t + hs);
      const Vec k1 = field(x, u1);
      const Vec k2 = field(x + 0.5 * hs * k1, u2);
      const Vec k3 = field(x + 0.5 * hs * k2, u2);
      const Vec k4 = field(x + hs * k3, u3);
      x = x + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite()) throw NonFiniteState("integrate: state overflowed");
      const double tk = (k + 1 == nsteps) ? t1 : t + hs;
      traj.times.push_back(tk);
      traj.states.push_back(x);
      if (record_control) traj.control_trace.push_back(control.value_at(tk));
    }
  }
  return traj;
}

/// Endpoint of the composed flow phi_{u_k}^{t_k} o ... o phi_{u_1}^{t_1}(x0).
template <typename Field>
Vec flow_composition(const Field& field, const Vec& x0, const ControlSchedule& sched,
                     double h = 1e-3) {
  double T = sched.total_duration();
  if (sched.segments.empty() || T <= 0.0) return x0;
  return integrate(field, x0, sched, T, std::min(h, sched.min_positive_duration()), false)
      .endpoint();
}

struct ReachabilityJacobian {
  Mat J;            // n x k, d(endpoint)/d(duration_i)
  Vec singular_values;
  int rank = 0;
  bool normal = false;  // rank == n
};

/// Jacobian of the endpoint map in the switching durations, by central
/// finite differences. Rank via singular values, threshold 1e-8 * sigma_max.
template <typename Field>
ReachabilityJacobian reachability_jacobian(const Field& field, const Vec& x0,
                                           const ControlSchedule& sched, double h = 1e-3) {
  const auto k = sched.segments.size();
  if (k < 1) throw DomainError("reachability_jacobian: need k >= 1 segments");
  for (const auto& s : sched.segments)
    if (s.duration <= 0.0) throw DomainError("reachability_jacobian: durations must be > 0");

  const auto n = x0.size();
  ReachabilityJacobian out;
  out.J.resize(n, static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    double ti = sched.segments[i].duration;
    double delta = std::max(1e-6, 1e-6 * ti);
    ControlSchedule plus = sched, minus = sched;
    plus.segments[i].duration = ti + delta;
    minus.segments[i].duration = ti - delta;
    Vec ep = flow_composition(field, x0, plus, h);
    Vec em = flow_composition(field, x0, minus, h);
    out.J.col(static_cast<Eigen::Index>(i)) = (ep - em) / (2.0 * delta);
  }
  Eigen::JacobiSVD<Mat> svd(out.J);
  out.singular_values = svd.singularValues();
  double thresh = 1e-8 * out.singular_values(0);
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > thresh) ++out.rank;
  out.normal = (out.rank == n);
  return out;
}

namespace detail {

// Exact integral of |alpha + beta t| over [0, dt].
inline double abs_linear_integral(double a0, double a1, double dt) {
  if (dt <= 0.0) return 0.0;
  if (a0 * a1 >= 0.0) return 0.5 * (std::abs(a0) + std::abs(a1)) * dt;
  double root = dt * a0 / (a0 - a1);  // sign change inside
  return 0.5 * (std::abs(a0) * root + std::abs(a1) * (dt - root));
}

}  // namespace detail

/// L1-in-time distance  int_0^T ||u(t) - v(t)||_1 dt, exact for
/// piecewise-constant and piecewise-linear controls.
template <typename CU, typename CV>
double control_distance(const CU& u, const CV& v, double T) {
  if (u.total_duration() < T - 1e-12 || v.total_duration() < T - 1e-12)
    throw HorizonMismatch("control_distance: controls do not cover [0, T]");
  if (u.value_at(0.0).size() != v.value_at(0.0).size())
    throw DimensionError("control_distance: input dimensions differ");

  std::set<double> cuts{0.0, T};
  for (double t : detail::knot_times(u))
    if (t > 0.0 && t < T) cuts.insert(t);
  for (double t : detail::knot_times(v))
    if (t > 0.0 && t < T) cuts.insert(t);
  std::vector<double> breaks(cuts.begin(), cuts.end());

  double total = 0.0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    double t0 = breaks[b], t1 = breaks[b + 1], dt = t1 - t0;
    // Evaluate just inside the interval so step discontinuities at the cuts
    // resolve to the segment that owns the interior.
    double lo = std::nextafter(t0, t1), hi = std::nextafter(t1, t0);
    Vec d0 = u.value_at(lo) - v.value_at(lo);
    Vec d1 = u.value_at(hi) - v.value_at(hi);
    for (Eigen::Index c = 0; c < d0.size(); ++c)
      total += detail::abs_linear_integral(d0[c], d1[c], dt);
  }
  return total;
}

struct ContinuityPoint {
  double distance;
  double deviation;
};

struct ContinuityReport {
  std::vector<ContinuityPoint> points;  // sorted by distance, ascending
  bool monotone_fit = true;             // deviation shrinks with distance, 5% slack
};

/// Endpoint deviation as a function of control distance: the numerical
/// counterpart of the continuity estimate for the endpoint map.
template <typename Field, typename CU, typename CV>
ContinuityReport continuity_experiment(const Field& field, const Vec& x0, const CU& u,
                                       const std::vector<CV>& perturbations, double T,
                                       double h = 1e-3) {
  Vec ref = integrate(field, x0, u, T, h).endpoint();
  ContinuityReport rep;
  for (const auto& v : perturbations) {
    double d = control_distance(u, v, T);
    double dev = (integrate(field, x0, v, T, h).endpoint() - ref).norm();
    rep.points.push_back({d, dev});
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const ContinuityPoint& a, const ContinuityPoint& b) {
              return a.distance < b.distance;
            });
  for (std::size_t i = 0; i + 1 < rep.points.size(); ++i)
    if (rep.points[i].deviation > rep.points[i + 1].deviation * 1.05 + 1e-12)
      rep.monotone_fit = false;
  return rep;
}

}  // namespace rnc
