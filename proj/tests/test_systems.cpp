#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "rnc/simulate.hpp"
#include "rnc/systems.hpp"

using namespace rnc;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat M(2, 2);
  M << a, b, c, d;
  return M;
}

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("recurrent field values") {
  RecurrentNet net(mat2(0, 1, -1, 0), vec2(1, 2), make_tanh());
  CHECK(recurrent_field(net, vec2(0, 0), vec1(0)).norm() == 0.0);

  Vec f = recurrent_field(net, vec2(1, 0), vec1(0));
  CHECK(f[0] == 0.0);
  CHECK(f[1] == Catch::Approx(-0.7615941559557649).epsilon(1e-14));

  RecurrentNet scalar(Mat::Zero(1, 1), Mat::Ones(1, 1), make_tanh());
  CHECK(recurrent_field(scalar, vec1(0), vec1(3))[0] ==
        Catch::Approx(0.9950547536867305).epsilon(1e-14));

  CHECK_THROWS_AS(recurrent_field(net, vec1(0), vec1(0)), DimensionError);
}

TEST_CASE("recurrent field is odd and strictly inside the saturation cube") {
  RecurrentNet net(mat2(0.3, -1.2, 2.0, 0.7), vec2(1, -0.5), make_tanh());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    Vec x = vec2(unif(rng), unif(rng));
    Vec u = vec1(unif(rng));
    Vec f = recurrent_field(net, x, u);
    CHECK((f + recurrent_field(net, Vec(-x), Vec(-u))).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(f.lpNorm<Eigen::Infinity>() < net.act.limit);
  }
}

TEST_CASE("input-affine field") {
  InputAffineNet net(Mat::Ones(1, 1), Mat::Ones(1, 1), make_tanh());
  CHECK(input_affine_field(net, vec1(0), vec1(0))[0] == 0.0);
  CHECK(input_affine_field(net, vec1(1), vec1(2))[0] ==
        Catch::Approx(2.7615941559557649).epsilon(1e-14));

  InputAffineNet net2(Mat::Identity(2, 2), vec2(0, 1), make_tanh());
  CHECK_THROWS_AS(input_affine_field(net2, vec2(0, 0), vec2(0, 0)), DimensionError);
}

TEST_CASE("cascade field stacks the net with an integrator") {
  RecurrentNet scalar(Mat::Zero(1, 1), Mat::Ones(1, 1), make_tanh());
  CascadeNet cas = to_cascade(scalar);
  CHECK(cas.state_dim() == 2);
  CHECK(cas.field(vec2(0, 0), vec1(0)).norm() == 0.0);

  Vec f = cas.field(vec2(0, 1), vec1(0.5));
  CHECK(f[0] == Catch::Approx(0.7615941559557649).epsilon(1e-14));
  CHECK(f[1] == 0.5);

  // first n components never depend on v
  Vec g = cas.field(vec2(0, 1), vec1(-3.0));
  CHECK(f[0] == g[0]);
}

TEST_CASE("affine state map and preimage") {
  CHECK(affine_state_map(mat2(1, 0, 0, 2), vec2(1, 1), vec2(1, 1), vec1(3)) == vec2(4, 5));

  // hand case: A = 0, B = 2 scalar
  auto [x, y] = affine_preimage(Mat::Zero(1, 1), 2.0 * Mat::Ones(1, 1), vec1(3));
  CHECK(x[0] == 0.0);
  CHECK(y[0] == Catch::Approx(1.5));

  auto [xz, yz] = affine_preimage(mat2(1, 0, 0, 2), vec2(1, 1), Vec(Vec::Zero(2)));
  CHECK(xz.norm() == 0.0);
  CHECK(yz.norm() == 0.0);

  CHECK_THROWS_AS(affine_preimage(Mat::Zero(1, 1), Mat::Zero(1, 1), vec1(1)), RankDeficient);
}

TEST_CASE("preimage round-trip on random full-rank instances") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 100; ++k) {
    int n = 1 + static_cast<int>(rng() % 4);
    int m = 1 + static_cast<int>(rng() % 3);
    Mat A(n, n), B(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) B(i, j) = gauss(rng);
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = gauss(rng);
    auto [x, y] = affine_preimage(A, B, z);
    CHECK((affine_state_map(A, B, x, y) - z).norm() <= 1e-9 * (1.0 + z.norm()));
  }
}

TEST_CASE("transport: cascade trajectory maps onto the input-affine system") {
  // n = m = 1, A = 1, B = 1, v constant 0.2
  RecurrentNet base(Mat::Ones(1, 1), Mat::Ones(1, 1), make_tanh());
  CascadeNet cas = to_cascade(base);
  InputAffineNet affine(Mat::Ones(1, 1), Mat::Ones(1, 1), make_tanh());

  ControlSchedule v = make_schedule({{0.2, 2.0}});
  auto field = [&](const Vec& xy, const Vec& vv) { return cas.field(xy, vv); };
  Trajectory traj = integrate(field, vec2(0.1, 0.0), v, 2.0, 1e-3);

  auto rep = transport_check(affine, traj, v);
  CHECK(rep.max_defect <= 1e-4);

  // zero trajectory under zero input: defect identically zero
  ControlSchedule zero = make_schedule({{0.0, 2.0}});
  Trajectory still = integrate(field, vec2(0, 0), zero, 2.0, 1e-2);
  CHECK(transport_check(affine, still, zero).max_defect == 0.0);

  // deliberately mismatched input: large defect
  ControlSchedule wrong = make_schedule({{2.5, 2.0}});
  CHECK(transport_check(affine, traj, wrong).max_defect > 0.1);

  Trajectory tiny;
  tiny.times = {0.0, 1.0};
  tiny.states = {vec2(0, 0), vec2(0, 0)};
  CHECK_THROWS_AS(transport_check(affine, tiny, v), GridTooCoarse);
}

TEST_CASE("constructor contracts") {
  CHECK_THROWS_AS(RecurrentNet(Mat::Zero(2, 3), Mat::Ones(2, 1), make_tanh()), DimensionError);
  CHECK_THROWS_AS(RecurrentNet(Mat::Zero(2, 2), Mat::Ones(3, 1), make_tanh()), DimensionError);
  Mat bad = Mat::Ones(1, 1) * std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(RecurrentNet(bad, Mat::Ones(1, 1), make_tanh()), DomainError);
}
