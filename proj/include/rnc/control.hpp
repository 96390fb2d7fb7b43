#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rnc/errors.hpp"

namespace rnc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Piecewise-constant open-loop control. Right-continuous: the value at a
/// switching instant is the next segment's value.
struct ControlSchedule {
  struct Segment {
    Vec value;
    double duration;
  };
  std::vector<Segment> segments;

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }

  int dim() const { return segments.empty() ? 0 : static_cast<int>(segments.front().value.size()); }

  /// Cumulative switch times e_1 < ... < e_{k-1} strictly inside (0, total).
  std::vector<double> switch_times() const {
    std::vector<double> out;
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
      t += segments[i].duration;
      out.push_back(t);
    }
    return out;
  }

  double min_positive_duration() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : segments)
      if (s.duration > 0.0) m = std::min(m, s.duration);
    return m;
  }

  Vec value_at(double t) const {
    if (segments.empty()) throw DomainError("ControlSchedule: empty schedule");
    double acc = 0.0;
    for (const auto& s : segments) {
      acc += s.duration;
      if (t < acc) return s.value;
    }
    return segments.back().value;
  }
};

inline ControlSchedule make_schedule(std::initializer_list<std::pair<double, double>> scalar_segs) {
  ControlSchedule sched;
  for (auto [u, t] : scalar_segs) {
    Vec v(1);
    v << u;
    sched.segments.push_back({v, t});
  }
  return sched;
}

/// Control sampled on a uniform grid with linear interpolation between nodes.
struct SampledControl {
  double horizon = 0.0;
  double step = 0.0;  // h_c
  std::vector<Vec> samples;

  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }

  Vec value_at(double t) const {
    if (samples.size() < 2 || step <= 0.0) throw DomainError("SampledControl: not initialized");
    double clamped = std::clamp(t, 0.0, horizon);
    double pos = clamped / step;
    auto i = static_cast<std::size_t>(pos);
    if (i >= samples.size() - 1) return samples.back();
    double w = pos - static_cast<double>(i);
    return (1.0 - w) * samples[i] + w * samples[i + 1];
  }

  std::vector<double> switch_times() const { return {}; }
  double total_duration() const { return horizon; }
};

/// Trajectory samples, strictly increasing times starting at 0.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> control_trace;  // optional; empty or same length as times

  std::size_t size() const { return times.size(); }
  const Vec& endpoint() const { return states.back(); }
};

}  // namespace rnc
