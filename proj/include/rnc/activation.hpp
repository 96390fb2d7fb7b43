#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rnc/errors.hpp"

namespace rnc {

/// Scalar sigmoid with derivative and finite saturation value.
///
/// `gap(s)` returns `limit - eval(s)` computed in a cancellation-safe way;
/// for saturating sigmoids the plain difference rounds to zero long before
/// the true tail does, so tail-ratio diagnostics use `gap`.
struct Activation {
  std::string name;
  std::function<double(double)> eval;
  std::function<double(double)> deriv;  // analytic if available
  double limit = 1.0;                   // saturation value, lim_{s->+inf} eval(s)
  std::function<double(double)> gap;    // limit - eval(s), stable form

  double operator()(double s) const { return eval(s); }
};

inline constexpr double kDerivFdStep = 1e-6;

/// Wraps eval with a central-difference derivative when no analytic one exists.
inline std::function<double(double)> central_difference(
    std::function<double(double)> f, double h = kDerivFdStep) {
  return [f = std::move(f), h](double s) { return (f(s + h) - f(s - h)) / (2.0 * h); };
}

inline Activation make_activation(std::string name, std::function<double(double)> eval,
                                  std::function<double(double)> deriv, double limit,
                                  std::function<double(double)> gap = nullptr) {
  Activation a;
  a.name = std::move(name);
  a.eval = eval;
  a.deriv = deriv ? std::move(deriv) : central_difference(eval);
  a.limit = limit;
  a.gap = gap ? std::move(gap) : [eval, limit](double s) { return limit - eval(s); };
  return a;
}

inline Activation make_tanh() {
  auto ev = [](double s) { return std::tanh(s); };
  auto dv = [](double s) {
    double t = std::tanh(s);
    return 1.0 - t * t;
  };
  // 1 - tanh(s) = 2 / (1 + e^{2s}); exact down to denormal range for s >= 0.
  auto gp = [](double s) {
    if (s >= 0.0) return 2.0 / (1.0 + std::exp(2.0 * s));  // no cancellation
    return 1.0 - std::tanh(s);
  };
  return make_activation("tanh", ev, dv, 1.0, gp);
}

struct LimitRatio {
  double value = 0.0;
  bool underflow = false;  // denominator below 1e-300
};

/// Tail ratio (sigma_inf - sigma(a + b s)) / (sigma_inf - sigma(s)) for b > 1.
inline LimitRatio limit_ratio(const Activation& act, double a, double b, double s) {
  if (b <= 1.0) throw DomainError("limit_ratio: requires b > 1");
  double num = act.gap(a + b * s);
  double den = act.gap(s);
  LimitRatio r;
  r.underflow = den < 1e-300;
  if (num < 0.0) num = 0.0;  // clamp rounding noise; eval < limit holds by invariant
  r.value = r.underflow ? 0.0 : num / den;
  return r;
}

enum class AdmissVerdict { Admissible, Inconclusive, Fails };

struct RatioSample {
  double a, b, s, ratio;
};

struct AdmissibilityReport {
  double odd_defect = 0.0;
  double bound_defect = -std::numeric_limits<double>::infinity();
  // ^ max over samples of eval(s) - limit; negative when the strict bound holds
  std::vector<RatioSample> ratio_samples;
  bool ratio_monotone = true;
  AdmissVerdict verdict = AdmissVerdict::Inconclusive;
  std::string fail_reason;          // set when verdict == Fails
  std::optional<double> witness_s;  // concrete sample backing a failure
};

inline const char* to_string(AdmissVerdict v) {
  switch (v) {
    case AdmissVerdict::Admissible: return "Admissible";
    case AdmissVerdict::Inconclusive: return "Inconclusive";
    default: return "Fails";
  }
}

/// Grid check of the saturating-tail class: oddness, strict bound, and
/// monotone decay of the tail ratio to below 1e-6 for every (a, b) pair.
/// A grid cannot prove the limit, hence the Inconclusive verdict.
inline AdmissibilityReport check_admissible(const Activation& act,
                                            const std::vector<double>& a_grid,
                                            const std::vector<double>& b_grid,
                                            const std::vector<double>& s_grid) {
  for (double b : b_grid)
    if (b <= 1.0) throw DomainError("check_admissible: all b must be > 1");
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    if (s_grid[i] <= s_grid[i - 1]) throw DomainError("check_admissible: s_grid not increasing");

  AdmissibilityReport rep;

  // Oddness and strict bound on a fixed sweep, plus the user's s grid.
  constexpr int kSweep = 1001;
  auto probe = [&](double s) {
    double od = std::abs(act.eval(-s) + act.eval(s));
    if (od > rep.odd_defect) {
      rep.odd_defect = od;
      if (od > 1e-10) rep.witness_s = s;
    }
    double bd = -act.gap(s);  // eval(s) - limit, cancellation-safe
    if (bd > rep.bound_defect) rep.bound_defect = bd;
    if (bd >= 0.0 && rep.verdict != AdmissVerdict::Fails) {
      rep.verdict = AdmissVerdict::Fails;
      rep.fail_reason = "bound: eval(s) >= limit";
      rep.witness_s = s;
    }
  };
  for (int i = 0; i < kSweep; ++i) probe(-50.0 + 100.0 * i / (kSweep - 1));
  for (double s : s_grid) probe(s);
  if (rep.verdict == AdmissVerdict::Fails) return rep;

  if (rep.odd_defect > 1e-10) {
    rep.verdict = AdmissVerdict::Fails;
    rep.fail_reason = "oddness defect above 1e-10";
    return rep;
  }

  bool all_decay = true;
  for (double a : a_grid) {
    for (double b : b_grid) {
      double prev = std::numeric_limits<double>::infinity();
      double last = prev;
      for (double s : s_grid) {
        double r = limit_ratio(act, a, b, s).value;
        rep.ratio_samples.push_back({a, b, s, r});
        if (r >= prev) {
          rep.ratio_monotone = false;
          rep.verdict = AdmissVerdict::Fails;
          rep.fail_reason = "tail ratio not decreasing along s_grid";
          rep.witness_s = s;
          return rep;
        }
        prev = r;
        last = r;
      }
      if (!s_grid.empty() && last >= 1e-6) all_decay = false;
    }
  }
  rep.verdict = all_decay ? AdmissVerdict::Admissible : AdmissVerdict::Inconclusive;
  return rep;
}

struct SmoothClassReport {
  bool pass = true;
  std::vector<std::string> failures;
  std::optional<double> witness_s;
};

/// Stricter class used by the planar analysis: deriv > 0, deriv(0) = 1,
/// limit = 1, deriv non-increasing on s >= 0.
inline SmoothClassReport check_smooth_class(const Activation& act,
                                            const std::vector<double>& s_grid) {
  SmoothClassReport rep;
  auto fail = [&](std::string why, std::optional<double> s = std::nullopt) {
    rep.pass = false;
    rep.failures.push_back(std::move(why));
    if (s && !rep.witness_s) rep.witness_s = s;
  };

  std::vector<double> grid = s_grid;
  std::sort(grid.begin(), grid.end());
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] + grid[grid.size() - 1 - i]) > 1e-12)
      throw DomainError("check_smooth_class: s_grid not symmetric about 0");

  if (std::abs(act.deriv(0.0) - 1.0) > 1e-9) fail("deriv(0) != 1", 0.0);
  if (act.limit != 1.0) fail("limit != 1");
  double prev = std::numeric_limits<double>::infinity();
  for (double s : grid) {
    double d = act.deriv(s);
    if (d <= 0.0) fail("deriv not positive", s);
    if (s >= 0.0) {
      if (d > prev + 1e-12) fail("deriv increasing on s >= 0", s);
      prev = d;
    }
  }
  return rep;
}

}  // namespace rnc
