#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rnc/control.hpp"
#include "rnc/errors.hpp"

namespace rnc {

/// Dashed straight-segment overlay (half-plane boundary, steering ray, ...).
struct SvgOverlay {
  double x0, y0, x1, y1;
  std::string label;
};

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}
}  // namespace detail

/// Static phase portrait: fixed 600x600 viewBox, solid polyline for the
/// trajectory, dashed lines for overlays. Byte-identical for identical input.
inline std::string emit_phase_svg(const Trajectory& traj,
                                  const std::vector<SvgOverlay>& overlays = {}) {
  for (const auto& s : traj.states)
    if (s.size() != 2) throw NotPlanar("emit_phase_svg: trajectory is not 2-D");

  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  bool first = true;
  auto grow = [&](double x, double y) {
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  };
  for (const auto& s : traj.states) grow(s[0], s[1]);
  for (const auto& o : overlays) {
    grow(o.x0, o.y0);
    grow(o.x1, o.y1);
  }
  double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  double pad = 0.05 * span;
  xmin -= pad;
  ymin -= pad;
  span += 2.0 * pad;

  const double W = 600.0;
  auto px = [&](double x) { return (x - xmin) / span * W; };
  auto py = [&](double y) { return W - (y - ymin) / span * W; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 600 600\" "
         "width=\"600\" height=\"600\">\n";
  svg += "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  // axes through the origin when visible
  if (xmin < 0.0 && xmin + span > 0.0)
    svg += "<line x1=\"" + detail::fmt(px(0)) + "\" y1=\"0\" x2=\"" + detail::fmt(px(0)) +
           "\" y2=\"600\" stroke=\"#bbbbbb\"/>\n";
  if (ymin < 0.0 && ymin + span > 0.0)
    svg += "<line x1=\"0\" y1=\"" + detail::fmt(py(0)) + "\" x2=\"600\" y2=\"" +
           detail::fmt(py(0)) + "\" stroke=\"#bbbbbb\"/>\n";
  for (const auto& o : overlays)
    svg += "<line x1=\"" + detail::fmt(px(o.x0)) + "\" y1=\"" + detail::fmt(py(o.y0)) +
           "\" x2=\"" + detail::fmt(px(o.x1)) + "\" y2=\"" + detail::fmt(py(o.y1)) +
           "\" stroke=\"#d06000\" stroke-dasharray=\"6,4\"/>\n";
  if (!traj.states.empty()) {
    svg += "<polyline fill=\"none\" stroke=\"#0050c0\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      if (i) svg += " ";
      svg += detail::fmt(px(traj.states[i][0])) + "," + detail::fmt(py(traj.states[i][1]));
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace rnc
