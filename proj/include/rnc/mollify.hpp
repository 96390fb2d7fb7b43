#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "rnc/control.hpp"
#include "rnc/errors.hpp"
#include "rnc/simulate.hpp"

namespace rnc {

namespace detail {

inline double bump_profile(double s) {  // exp(-1/(1-s^2)) on (-1,1), else 0
  double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  return std::exp(-1.0 / q);
}

// integral of exp(-1/(1-s^2)) over [-1,1]. All derivatives vanish at the
// endpoints, so the composite midpoint rule converges superalgebraically.
inline double bump_profile_mass() {
  static const double mass = [] {
    constexpr int N = 1 << 16;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      double s = -1.0 + (2.0 * i + 1.0) / N;
      acc += bump_profile(s);
    }
    return acc * (2.0 / N);
  }();
  return mass;
}

}  // namespace detail

/// Smooth unit-mass kernel supported on [-1/l, 1/l]:
/// rho_l(t) = c_l exp(-1/(1 - (l t)^2)), c_l = l / int_{-1}^{1} exp(-1/(1-s^2)).
struct BumpKernel {
  double l;
  double normalization;  // c_l

  explicit BumpKernel(double l_) : l(l_) {
    if (l <= 0.0) throw DomainError("BumpKernel: l must be > 0");
    normalization = l / detail::bump_profile_mass();
  }

  double operator()(double t) const { return normalization * detail::bump_profile(l * t); }

  /// Cumulative integral K_l(t) = int_{-inf}^{t} rho_l; tabulated once on the
  /// support with Hermite interpolation (the exact density is the derivative).
  double cdf(double t) const {
    double s = l * t;
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const auto& tab = cdf_table();
    double pos = (s + 1.0) * 0.5 * (tab.size() - 1);
    auto i = std::min(static_cast<std::size_t>(pos), tab.size() - 2);
    double ds = 2.0 / (tab.size() - 1);
    double w = pos - static_cast<double>(i);
    double s0 = -1.0 + ds * static_cast<double>(i);
    double f0 = tab[i], f1 = tab[i + 1];
    double d0 = detail::bump_profile(s0) / detail::bump_profile_mass();
    double d1 = detail::bump_profile(s0 + ds) / detail::bump_profile_mass();
    // cubic Hermite on [0,1]
    double w2 = w * w, w3 = w2 * w;
    return (2 * w3 - 3 * w2 + 1) * f0 + (w3 - 2 * w2 + w) * ds * d0 +
           (-2 * w3 + 3 * w2) * f1 + (w3 - w2) * ds * d1;
  }

 private:
  static const std::vector<double>& cdf_table() {
    static const std::vector<double> tab = [] {
      constexpr int N = 10000;
      std::vector<double> t(N + 1, 0.0);
      const double ds = 2.0 / N;
      const double inv_mass = 1.0 / detail::bump_profile_mass();
      double acc = 0.0;
      double prev = detail::bump_profile(-1.0);
      for (int i = 1; i <= N; ++i) {
        double cur = detail::bump_profile(-1.0 + ds * i);
        double mid = detail::bump_profile(-1.0 + ds * (i - 0.5));
        acc += ds / 6.0 * (prev + 4.0 * mid + cur);  // Simpson per cell
        t[i] = acc * inv_mass;
        prev = cur;
      }
      t[N] = 1.0;
      return t;
    }();
    return tab;
  }
};

inline double kernel_eval(double l, double t) { return BumpKernel(l)(t); }

/// Convolution of a piecewise-constant schedule with rho_l, realized as CDF
/// steps at the interior switching times:
///   w_l(t) = u_1 + sum_i (u_{i+1} - u_i) K_l(t - tau_i).
/// Coincides with the convolution away from the horizon ends and keeps every
/// component inside the interval spanned by the adjacent segment values.
inline SampledControl smooth_control(const ControlSchedule& sched, double l,
                                     int samples_per_window = 64) {
  if (sched.segments.empty()) throw DomainError("smooth_control: empty schedule");
  double dmin = sched.min_positive_duration();
  if (!(l > 2.0 / dmin))
    throw WindowOverlap("smooth_control: need l > 2 / min segment duration");

  BumpKernel kernel(l);
  auto taus = sched.switch_times();
  double T = sched.total_duration();

  SampledControl out;
  out.horizon = T;
  double want = 1.0 / l / samples_per_window;
  auto count = static_cast<std::size_t>(std::ceil(T / want));
  out.step = T / static_cast<double>(count);
  out.samples.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    double t = out.step * static_cast<double>(i);
    Vec val = sched.segments.front().value;
    for (std::size_t j = 0; j < taus.size(); ++j)
      val += (sched.segments[j + 1].value - sched.segments[j].value) * kernel.cdf(t - taus[j]);
    out.samples.push_back(val);
  }
  return out;
}

struct ConvergencePoint {
  double l;
  double error;  // endpoint gap vs. the unsmoothed schedule
};

/// Endpoint error of the smoothed control as the kernel narrows.
template <typename Field>
std::vector<ConvergencePoint> endpoint_convergence(const Field& field, const Vec& x0,
                                                   const ControlSchedule& sched,
                                                   const std::vector<double>& l_list,
                                                   double h = 1e-3) {
  for (std::size_t i = 1; i < l_list.size(); ++i)
    if (l_list[i] <= l_list[i - 1]) throw DomainError("endpoint_convergence: l_list not increasing");
  double T = sched.total_duration();
  Vec ref = integrate(field, x0, sched, T, h).endpoint();
  std::vector<ConvergencePoint> out;
  for (double l : l_list) {
    SampledControl w = smooth_control(sched, l);
    Vec ep = integrate(field, x0, w, T, h).endpoint();
    out.push_back({l, (ep - ref).norm()});
  }
  return out;
}

struct CoverTarget {
  Vec p;
  bool success = false;
  int iterations = 0;
  double residual = 0.0;  // ||h(x*) - p||
};

struct CoverReport {
  Vec center;            // starting state of the iteration
  Vec nominal_endpoint;  // h(center)
  std::vector<CoverTarget> targets;
  double success_radius = 0.0;  // largest r with every target within r hit
  bool all_hit = false;
};

/// Damped fixed-point demonstration for the endpoint map h of the smoothed
/// control: iterate x <- x + 0.5 (p - h(x)) until ||h(x) - p|| <= 1e-6.
/// Divergence is recorded per target, not fatal.
template <typename Field>
CoverReport fixed_point_cover(const Field& field, const Vec& x0, const ControlSchedule& sched,
                              const std::vector<Vec>& targets, double l, double h = 1e-3,
                              int max_iters = 200) {
  SampledControl w = smooth_control(sched, l);
  double T = sched.total_duration();
  auto endpoint_map = [&](const Vec& x) { return integrate(field, x, w, T, h).endpoint(); };

  CoverReport rep;
  rep.center = x0;
  rep.nominal_endpoint = endpoint_map(x0);

  std::vector<std::pair<double, bool>> by_radius;
  for (const Vec& p : targets) {
    CoverTarget tgt;
    tgt.p = p;
    Vec x = x0;
    for (int it = 0; it < max_iters; ++it) {
      Vec hx = endpoint_map(x);
      tgt.residual = (hx - p).norm();
      tgt.iterations = it;
      if (tgt.residual <= 1e-6) {
        tgt.success = true;
        break;
      }
      x = x + 0.5 * (p - hx);
      if (!x.allFinite()) break;
    }
    by_radius.emplace_back((p - rep.nominal_endpoint).norm(), tgt.success);
    rep.targets.push_back(std::move(tgt));
  }

  std::sort(by_radius.begin(), by_radius.end());
  rep.all_hit = true;
  for (const auto& [r, ok] : by_radius) {
    if (!ok) {
      rep.all_hit = false;
      break;
    }
    rep.success_radius = r;
  }
  return rep;
}

/// Differentiable curve through prescribed nodes gamma(0) = y0,
/// gamma(i) = u_i, gamma(k+1) = yf; monotone cubic (Fritsch-Carlson)
/// componentwise over the node index.
struct SteeringCurve {
  std::vector<Vec> nodes;
  std::vector<Vec> slopes;

  explicit SteeringCurve(std::vector<Vec> nodes_) : nodes(std::move(nodes_)) {
    if (nodes.size() < 2) throw DomainError("SteeringCurve: need at least two nodes");
    const auto n = nodes.size();
    const auto dim = nodes.front().size();
    slopes.assign(n, Vec::Zero(dim));
    for (Eigen::Index c = 0; c < dim; ++c) {
      std::vector<double> d(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i) d[i] = nodes[i + 1][c] - nodes[i][c];
      slopes[0][c] = d[0];
      slopes[n - 1][c] = d[n - 2];
      for (std::size_t i = 1; i + 1 < n; ++i)
        slopes[i][c] = (d[i - 1] * d[i] > 0.0) ? 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]) : 0.0;
      // Fritsch-Carlson clamp keeps the interpolant inside the node range.
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
          slopes[i][c] = slopes[i + 1][c] = 0.0;
        } else {
          for (std::size_t j : {i, i + 1}) {
            double r = slopes[j][c] / d[i];
            if (r > 3.0) slopes[j][c] = 3.0 * d[i];
            if (r < -3.0) slopes[j][c] = -3.0 * d[i];
          }
        }
      }
    }
  }

  Vec value_at(double s) const {
    double hi = static_cast<double>(nodes.size() - 1);
    s = std::clamp(s, 0.0, hi);
    auto i = std::min(static_cast<std::size_t>(s), nodes.size() - 2);
    double w = s - static_cast<double>(i), w2 = w * w, w3 = w2 * w;
    return (2 * w3 - 3 * w2 + 1) * nodes[i] + (w3 - 2 * w2 + w) * slopes[i] +
           (-2 * w3 + 3 * w2) * nodes[i + 1] + (w3 - w2) * slopes[i + 1];
  }
};

}  // namespace rnc
