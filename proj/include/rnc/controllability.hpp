#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rnc/activation.hpp"
#include "rnc/control.hpp"
#include "rnc/errors.hpp"
#include "rnc/systems.hpp"

namespace rnc {

/// A breach of the row-class criterion: some row of B is zero, or two rows
/// coincide up to sign.
struct Violation {
  enum class Kind { ZeroRow, EqualRows };
  Kind kind;
  int i = 0;
  int j = 0;     // EqualRows only, i < j
  int sign = 0;  // EqualRows only, +1 or -1
};

struct BClassReport {
  bool in_class = false;
  std::vector<Violation> violations;
  double tolerance = 0.0;
};

/// Row-class membership: every row of B nonzero and no two rows equal up to
/// sign, compared in the max norm with the given tolerance.
inline BClassReport b_class_check(const Mat& B, double tol = 0.0) {
  if (tol < 0.0) throw DomainError("b_class_check: tol must be >= 0");
  BClassReport rep;
  rep.tolerance = tol;
  const auto n = B.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    if (B.row(i).lpNorm<Eigen::Infinity>() <= tol)
      rep.violations.push_back({Violation::Kind::ZeroRow, static_cast<int>(i), 0, 0});
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      for (int s : {+1, -1})
        if ((B.row(i) - static_cast<double>(s) * B.row(j)).lpNorm<Eigen::Infinity>() <= tol)
          rep.violations.push_back(
              {Violation::Kind::EqualRows, static_cast<int>(i), static_cast<int>(j), s});
  rep.in_class = rep.violations.empty();
  return rep;
}

/// Non-controllability witness p with p^T B = 0 and entries in {-1, 0, 1}.
struct Certificate {
  Vec p;
  Violation kind;
};

inline Certificate necessity_certificate(const Violation& v, int n) {
  auto in_range = [n](int idx) { return idx >= 0 && idx < n; };
  Vec p = Vec::Zero(n);
  switch (v.kind) {
    case Violation::Kind::ZeroRow:
      if (!in_range(v.i)) throw InvalidViolation("necessity_certificate: index out of range");
      p[v.i] = 1.0;
      break;
    case Violation::Kind::EqualRows:
      if (!in_range(v.i) || !in_range(v.j) || v.i >= v.j || (v.sign != 1 && v.sign != -1))
        throw InvalidViolation("necessity_certificate: bad EqualRows violation");
      p[v.i] = 1.0;
      p[v.j] = -static_cast<double>(v.sign);
      break;
  }
  return {p, v};
}

struct CertificateVerification {
  long checked = 0;
  long passed = 0;
  long dead_band = 0;  // samples with p^T A x too close to 0, skipped
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // min of sgn(p^T A x) p^T f
};

/// p^T act(z) evaluated without saturation cancellation: each term is folded
/// to p_i sgn(z_i) (limit - gap(|z_i|)), so the limit parts combine exactly
/// and only the small tail gaps are subtracted.
inline double stable_p_dot_sigma(const Activation& act, const Vec& p, const Vec& z) {
  double coeff = 0.0, tail = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0 || z[i] == 0.0) continue;
    double c = p[i] * (z[i] > 0.0 ? 1.0 : -1.0);
    coeff += c;
    tail += c * act.gap(std::abs(z[i]));
  }
  return coeff * act.limit - tail;
}

/// Monte-Carlo check of the sign identity sgn(p^T field) = sgn(p^T A x)
/// behind the certificate. Deterministic for a fixed seed.
inline CertificateVerification verify_certificate(const RecurrentNet& net, const Certificate& cert,
                                                  long samples, double box, std::uint64_t seed) {
  if ((cert.p.transpose() * net.B).lpNorm<Eigen::Infinity>() > 1e-12)
    throw CertificateMismatch("verify_certificate: p^T B != 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-box, box);
  CertificateVerification rep;
  Vec x(net.n()), u(net.m());
  for (long k = 0; k < samples; ++k) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = unif(rng);
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = unif(rng);
    double lin = cert.p.dot(net.A * x);
    if (std::abs(lin) <= 1e-9) {
      ++rep.dead_band;
      continue;
    }
    ++rep.checked;
    double val = stable_p_dot_sigma(net.act, cert.p, net.A * x + net.B * u);
    double margin = (lin > 0.0 ? val : -val);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin > 0.0)
      ++rep.passed;
    else
      ++rep.violations;
  }
  return rep;
}

struct MonotoneCheck {
  long applicable = 0;  // samples with |p^T A xi| above the dead band
  std::vector<double> violation_times;
};

/// Along a trajectory of the matching net, the functional p^T xi must move in
/// the direction of sgn(p^T A xi); checked with forward differences.
inline MonotoneCheck monotone_functional_check(const Trajectory& traj, const Vec& p,
                                               const Mat& A) {
  MonotoneCheck rep;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    double lin = p.dot(A * traj.states[i]);
    double lin_next = p.dot(A * traj.states[i + 1]);
    if (std::abs(lin) <= 1e-6 || std::abs(lin_next) <= 1e-6 || lin * lin_next < 0.0) continue;
    ++rep.applicable;
    double slope =
        (p.dot(traj.states[i + 1]) - p.dot(traj.states[i])) / (traj.times[i + 1] - traj.times[i]);
    if (slope * lin < 0.0 && std::abs(slope) > 1e-12)
      rep.violation_times.push_back(traj.times[i]);
  }
  return rep;
}

struct Verdict {
  bool completely_controllable = false;
  std::optional<AdmissibilityReport> activation_report;  // hypothesis backing a positive verdict
  std::vector<Certificate> certificates;                 // one per violation otherwise
};

/// Row-class criterion as a decision: membership gives complete
/// controllability conditional on the activation's grid-checked
/// admissibility; otherwise each violation yields a concrete certificate.
inline Verdict controllability_verdict(const RecurrentNet& net) {
  Verdict v;
  BClassReport rep = b_class_check(net.B, 0.0);
  if (rep.in_class) {
    v.completely_controllable = true;
    v.activation_report =
        check_admissible(net.act, {-1.0, 0.0, 2.0}, {1.5, 2.0}, {5.0, 10.0, 15.0, 20.0});
  } else {
    for (const auto& viol : rep.violations)
      v.certificates.push_back(necessity_certificate(viol, net.n()));
  }
  return v;
}

}  // namespace rnc
