#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "rnc/activation.hpp"
#include "rnc/control.hpp"
#include "rnc/errors.hpp"

namespace rnc {

namespace detail {
inline void require_finite(const Mat& M, const char* what) {
  if (!M.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
}
}  // namespace detail

/// Componentwise application of a scalar activation.
inline Vec apply(const Activation& act, const Vec& z) {
  Vec out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = act.eval(z[i]);
  return out;
}

/// dx/dt = act(A x + B u), componentwise.
struct RecurrentNet {
  Mat A;
  Mat B;
  Activation act;

  RecurrentNet(Mat A_, Mat B_, Activation act_)
      : A(std::move(A_)), B(std::move(B_)), act(std::move(act_)) {
    if (A.rows() < 1 || B.cols() < 1) throw DimensionError("RecurrentNet: need n >= 1, m >= 1");
    if (A.rows() != A.cols()) throw DimensionError("RecurrentNet: A must be square");
    if (B.rows() != A.rows()) throw DimensionError("RecurrentNet: B row count must equal n");
    detail::require_finite(A, "RecurrentNet A");
    detail::require_finite(B, "RecurrentNet B");
  }

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

/// dx/dt = A act(x) + B u. Unlike the recurrent form the field is unbounded.
struct InputAffineNet {
  Mat A;
  Mat B;
  Activation act;

  InputAffineNet(Mat A_, Mat B_, Activation act_)
      : A(std::move(A_)), B(std::move(B_)), act(std::move(act_)) {
    if (A.rows() < 1 || B.cols() < 1) throw DimensionError("InputAffineNet: need n >= 1, m >= 1");
    if (A.rows() != A.cols()) throw DimensionError("InputAffineNet: A must be square");
    if (B.rows() != A.rows()) throw DimensionError("InputAffineNet: B row count must equal n");
    detail::require_finite(A, "InputAffineNet A");
    detail::require_finite(B, "InputAffineNet B");
  }

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

inline Vec recurrent_field(const RecurrentNet& net, const Vec& x, const Vec& u) {
  if (x.size() != net.n() || u.size() != net.m())
    throw DimensionError("recurrent_field: state/input dimension mismatch");
  return apply(net.act, net.A * x + net.B * u);
}

inline Vec input_affine_field(const InputAffineNet& net, const Vec& x, const Vec& u) {
  if (x.size() != net.n() || u.size() != net.m())
    throw DimensionError("input_affine_field: state/input dimension mismatch");
  return net.A * apply(net.act, x) + net.B * u;
}

/// The net with its input driven by an integrator:
/// state (x, y) in R^{n+m}, input v in R^m,
/// d(x)/dt = act(A x + B y), d(y)/dt = v.
struct CascadeNet {
  RecurrentNet base;

  int state_dim() const { return base.n() + base.m(); }
  int input_dim() const { return base.m(); }

  Vec field(const Vec& xy, const Vec& v) const {
    if (xy.size() != state_dim() || v.size() != input_dim())
      throw DimensionError("CascadeNet::field: dimension mismatch");
    Vec x = xy.head(base.n());
    Vec y = xy.tail(base.m());
    Vec out(state_dim());
    out.head(base.n()) = recurrent_field(base, x, y);
    out.tail(base.m()) = v;
    return out;
  }
};

inline CascadeNet to_cascade(const RecurrentNet& net) { return CascadeNet{net}; }

inline Vec affine_state_map(const Mat& A, const Mat& B, const Vec& x, const Vec& y) {
  if (A.cols() != x.size() || B.cols() != y.size() || A.rows() != B.rows())
    throw DimensionError("affine_state_map: dimension mismatch");
  return A * x + B * y;
}

/// Minimum-norm solution of [A B] (x; y) = z via SVD. Requires full row rank
/// of [A B] with relative singular-value threshold 1e-10.
inline std::pair<Vec, Vec> affine_preimage(const Mat& A, const Mat& B, const Vec& z) {
  if (A.rows() != B.rows() || A.rows() != z.size())
    throw DimensionError("affine_preimage: dimension mismatch");
  const auto n = A.rows();
  Mat M(n, A.cols() + B.cols());
  M << A, B;
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double thresh = 1e-10 * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  if (rank < n) throw RankDeficient(rank, thresh);
  svd.setThreshold(1e-10);
  Vec w = svd.solve(z);
  return {w.head(A.cols()), w.tail(B.cols())};
}

struct TransportReport {
  double max_defect = 0.0;
  double argmax_time = 0.0;
};

/// Checks that z(t) = A x(t) + B y(t) built from a cascade trajectory solves
/// the input-affine equation dz/dt = A act(z) + B v. dz/dt is estimated by
/// central finite differences on the trajectory grid.
template <typename Control>
TransportReport transport_check(const InputAffineNet& net, const Trajectory& traj,
                                const Control& v) {
  if (traj.size() < 8) throw GridTooCoarse("transport_check: need at least 8 samples");
  const int n = net.n(), m = net.m();
  std::vector<Vec> z(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    Vec x = traj.states[i].head(n);
    Vec y = traj.states[i].tail(m);
    z[i] = net.A * x + net.B * y;
  }
  TransportReport rep;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    double dt = traj.times[i + 1] - traj.times[i - 1];
    Vec zdot = (z[i + 1] - z[i - 1]) / dt;
    Vec rhs = net.A * apply(net.act, z[i]) + net.B * v.value_at(traj.times[i]);
    double d = (zdot - rhs).template lpNorm<Eigen::Infinity>();
    if (d > rep.max_defect) {
      rep.max_defect = d;
      rep.argmax_time = traj.times[i];
    }
  }
  return rep;
}

}  // namespace rnc
