#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "rnc/control.hpp"
#include "rnc/errors.hpp"
#include "rnc/simulate.hpp"

namespace rnc {

/// Brute-force reachable-cell bitmap on a planar box. Cell-center dynamics:
/// an under-approximation of the true reachable set.
struct ReachGrid {
  double xmin, xmax, ymin, ymax;
  double cell;
  int nx = 0, ny = 0;
  std::vector<std::uint8_t> reached;  // row-major, index = iy * nx + ix
  int source_ix = 0, source_iy = 0;
  std::vector<Vec> control_values;
  double t_step;
  bool budget_exceeded = false;
  long expansions = 0;

  bool in_box(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
  int cell_x(double x) const {
    return std::min(nx - 1, std::max(0, static_cast<int>((x - xmin) / cell)));
  }
  int cell_y(double y) const {
    return std::min(ny - 1, std::max(0, static_cast<int>((y - ymin) / cell)));
  }
  double center_x(int ix) const { return xmin + (ix + 0.5) * cell; }
  double center_y(int iy) const { return ymin + (iy + 0.5) * cell; }
  bool is_reached(int ix, int iy) const { return reached[std::size_t(iy) * nx + ix] != 0; }

  long reached_count() const {
    long c = 0;
    for (auto v : reached) c += v;
    return c;
  }
  long cell_count() const { return static_cast<long>(nx) * ny; }
};

/// BFS over grid cells: from each frontier cell center, integrate one step of
/// duration t_step under each control value and mark every in-box cell the
/// sampled trajectory lands in. Deterministic: FIFO frontier, control values
/// in list order, samples in time order. An optional state constraint
/// restricts exploration: expansion centers that fail it are discarded and a
/// hop stops marking at its first sample outside the constrained region, so
/// the bitmap only contains cells visited while the constraint held.
template <typename Field>
ReachGrid grid_reach(const Field& field, const Vec& x0, double xmin, double xmax, double ymin,
                     double ymax, double cell, const std::vector<Vec>& control_values,
                     double t_step, long max_expansions = 1'000'000, double h = 5e-3,
                     const std::function<bool(const Vec&)>& constraint = {}) {
  if (cell <= 0.0) throw DomainError("grid_reach: cell must be > 0");
  if (t_step <= 0.0) throw DomainError("grid_reach: t_step must be > 0");
  ReachGrid g;
  g.xmin = xmin;
  g.xmax = xmax;
  g.ymin = ymin;
  g.ymax = ymax;
  g.cell = cell;
  g.nx = static_cast<int>(std::ceil((xmax - xmin) / cell - 1e-12));
  g.ny = static_cast<int>(std::ceil((ymax - ymin) / cell - 1e-12));
  g.control_values = control_values;
  g.t_step = t_step;
  if (!g.in_box(x0[0], x0[1])) throw DomainError("grid_reach: x0 outside box");
  if (constraint && !constraint(x0)) throw DomainError("grid_reach: x0 fails the constraint");
  g.reached.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);

  g.source_ix = g.cell_x(x0[0]);
  g.source_iy = g.cell_y(x0[1]);
  g.reached[std::size_t(g.source_iy) * g.nx + g.source_ix] = 1;

  std::deque<std::pair<int, int>> frontier{{g.source_ix, g.source_iy}};
  while (!frontier.empty()) {
    if (g.expansions >= max_expansions) {
      g.budget_exceeded = true;
      break;
    }
    auto [ix, iy] = frontier.front();
    frontier.pop_front();
    ++g.expansions;
    Vec c(2);
    c << g.center_x(ix), g.center_y(iy);
    if (constraint && !constraint(c)) continue;
    for (const Vec& u : control_values) {
      ControlSchedule sched;
      sched.segments.push_back({u, t_step});
      Trajectory hop = integrate(field, c, sched, t_step, std::min(h, t_step));
      for (std::size_t k = 1; k < hop.size(); ++k) {
        const Vec& s = hop.states[k];
        if (constraint && !constraint(s)) break;
        if (!g.in_box(s[0], s[1])) continue;
        int jx = g.cell_x(s[0]), jy = g.cell_y(s[1]);
        auto& mark = g.reached[std::size_t(jy) * g.nx + jx];
        if (!mark) {
          mark = 1;
          frontier.emplace_back(jx, jy);
        }
      }
    }
  }
  return g;
}

struct ConfinementReport {
  double delta;
  std::vector<std::pair<int, int>> violations;  // reached cells inside the forbidden region
};

/// With a certificate p and start x0 satisfying p^T A x0 > 0, the monotone
/// functional forbids reached states with p^T A x > delta and
/// p^T x < p^T x0 - delta; delta = 2 * cell * ||p||_1 absorbs cell rounding.
/// The guarantee holds for trajectories along which p^T A x stays positive,
/// so the grid must be computed with that region as the grid_reach
/// constraint; on an unconstrained grid the check reports where the
/// reachable set re-entered after leaving the region.
inline ConfinementReport confinement_check(const ReachGrid& grid, const Vec& p, const Mat& A,
                                           const Vec& x0) {
  ConfinementReport rep;
  rep.delta = 2.0 * grid.cell * p.lpNorm<1>();
  double base = p.dot(x0);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (!grid.is_reached(ix, iy)) continue;
      Vec c(2);
      c << grid.center_x(ix), grid.center_y(iy);
      if (p.dot(A * c) > rep.delta && p.dot(c) < base - rep.delta)
        rep.violations.emplace_back(ix, iy);
    }
  return rep;
}

}  // namespace rnc
