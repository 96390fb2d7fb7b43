#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "rnc/steer2d.hpp"
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

}  // namespace

TEST_CASE("canonicalize the degenerate planar cases") {
  auto f1 = canonicalize(vec2(0, 1), mat2(-1, 2, 5, 7));
  REQUIRE(std::holds_alternative<Form1>(f1));
  CHECK(std::get<Form1>(f1).a == -1.0);
  CHECK(std::get<Form1>(f1).b == 2.0);

  auto f2 = canonicalize(vec2(1, 1), mat2(-1, 0, 0, -0.5));
  REQUIRE(std::holds_alternative<Form2>(f2));
  CHECK(std::get<Form2>(f2).a == -1.0);
  CHECK(std::get<Form2>(f2).b == -0.5);

  auto f2m = canonicalize(vec2(1, -1), mat2(-1, 0, 0, -0.5));
  CHECK(std::holds_alternative<Form2>(f2m));

  CHECK(std::holds_alternative<Decoupled>(canonicalize(vec2(0, 0), mat2(1, 0, 0, 1))));

  CHECK_THROWS_AS(canonicalize(vec2(1, 1), mat2(1, 1, 0, 1)), NotCanonical);
  CHECK_THROWS_AS(canonicalize(vec2(2, 1), mat2(1, 0, 0, 1)), NotCanonical);
}

TEST_CASE("invariant half-plane for |a| > |b|") {
  Form1 f{2.0, 1.0};
  auto hp = invariant_halfplane(f);
  REQUIRE(hp.has_value());
  // c = atanh(0.5) + 0.1, frozen oracle atanh(0.5) = 0.5493061443340549
  CHECK(hp->c == Catch::Approx(0.6493061443340549).epsilon(1e-12));
  CHECK(hp->boundary_margin == Catch::Approx(2.0 * std::tanh(hp->c) - 1.0).epsilon(1e-12));
  CHECK(hp->boundary_margin > 0.0);

  CHECK_FALSE(invariant_halfplane(Form1{1.0, 2.0}).has_value());

  // mirrored side for a < 0
  auto hm = invariant_halfplane(Form1{-2.0, 1.0});
  REQUIRE(hm.has_value());
  CHECK(hm->c == Catch::Approx(-0.6493061443340549).epsilon(1e-12));
}

TEST_CASE("boundary derivative has fixed sign on the invariant boundary") {
  Form1 f{2.0, 1.0};
  auto hp = invariant_halfplane(f);
  REQUIRE(hp.has_value());
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> xs(-5.0, 5.0), us(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    double x = xs(rng);
    double y = hp->c - f.a * x;  // point on {a x + b y = c} with b = 1
    double u = us(rng);
    double ddt = f.a * f.act.eval(f.a * x + f.b * y) + f.b * f.act.eval(u);
    CHECK(ddt > 0.0);
    CHECK(ddt >= hp->boundary_margin - 1e-12);
  }
}

TEST_CASE("transform_f1 and its inverse") {
  Form1 f{1.0, 2.0};
  auto c0 = transform_f1(f, 0, 0, 0);
  CHECK(c0.xt == 0.0);
  CHECK(c0.yt == 0.0);
  CHECK(c0.v == 0.0);

  auto c = transform_f1(f, 1, 1, 1);
  CHECK(c.xt == 3.0);
  CHECK(c.yt == 1.0);
  CHECK(c.v == Catch::Approx(0.7615941559557649).epsilon(1e-14));

  auto [x, y, u] = inverse_transform_f1(f, c.xt, c.yt, c.v);
  CHECK(x == Catch::Approx(1.0).margin(1e-12));
  CHECK(y == 1.0);
  CHECK(u == Catch::Approx(1.0).margin(1e-9));

  CHECK_THROWS_AS(inverse_transform_f1(Form1{0.0, 2.0}, 1, 1, 0.5), NotInvertible);
  CHECK_THROWS_AS(inverse_transform_f1(f, 1, 1, 1.0), RangeError);
}

TEST_CASE("ray plan gains and admissibility") {
  Form1Transformed ft{1.0, 2.0};
  auto plan = ray_plan(ft, 1.0, 1.0);
  CHECK(plan.gain == Catch::Approx(-1.0));
  CHECK(plan.kappa == Catch::Approx(-1.0));
  CHECK(plan.admissible);  // |-1| * tanh(1) = 0.7616 < 1

  auto bad = ray_plan(ft, 1.0, -1.0);
  CHECK(bad.kappa == Catch::Approx(1.0 / 3.0));
  CHECK_FALSE(bad.admissible);

  CHECK_THROWS_AS(ray_plan(ft, 2.0, 1.0), OnSingularLine);  // xt0 = b yt0
  CHECK_THROWS_AS(ray_plan(ft, 0.0, 0.0), DomainError);

  // on the xt-axis the feedback is zero; admissible when a < 0
  auto axis = ray_plan(Form1Transformed{-1.0, 2.0}, 1.0, 0.0);
  CHECK(axis.gain == 0.0);
  CHECK(axis.kappa == Catch::Approx(-1.0));
  CHECK(axis.admissible);
}

TEST_CASE("ray simulation decays along the ray") {
  Form1Transformed ft{1.0, 2.0};
  auto plan = ray_plan(ft, 1.0, 1.0);
  // closed loop d(xt)/dt = -tanh(xt); time from 1 to 0.05 is
  // ln(sinh 1 / sinh 0.05) = 3.1567550031752318 (quadrature oracle)
  auto run = simulate_ray(ft, plan, 3.16, 1e-3);
  CHECK(run.certified);
  CHECK(std::abs(run.traj.endpoint()[0]) <= 0.051);
  CHECK(run.collinearity_defect <= 1e-6 * std::sqrt(2.0));
  CHECK(run.v_max < 1.0);
  CHECK(run.monotone_decay);

  // at T just below the analytic crossing, |xt| is still above 0.05
  auto early = simulate_ray(ft, plan, 3.10, 1e-3);
  CHECK(std::abs(early.traj.endpoint()[0]) > 0.05);

  CHECK_THROWS_AS(simulate_ray(ft, ray_plan(ft, 1.0, -1.0), 1.0, 1e-3), NotAdmissible);
}

TEST_CASE("perturbed gain breaks the collinearity certificate") {
  Form1Transformed ft{1.0, 2.0};
  auto plan = ray_plan(ft, 1.0, 1.0);
  RayPlan faulty = plan;
  faulty.gain *= 1.01;
  auto run = simulate_ray(ft, faulty, 3.16, 1e-3);
  CHECK(run.collinearity_defect > 1e-6 * std::sqrt(2.0));
  CHECK_FALSE(run.certified);
}

TEST_CASE("implicit control root") {
  Form2 f2{-1.0, -0.5};
  // frozen from an mpmath root solve of tanh(-2+u) = 2 tanh(-0.5+u)
  double k1 = implicit_k(f2, 2.0, 1.0, 1.0);
  CHECK(k1 == Catch::Approx(-0.026807167245031884).margin(1e-9));
  // residual at the returned root
  auto f = [&](double u) { return std::tanh(-2.0 + u) - 2.0 * std::tanh(-0.5 + u); };
  CHECK(std::abs(f(k1)) <= 1e-10);

  CHECK_THROWS_AS(implicit_k(f2, 1.0, 1.0, 1.0), NoBracket);
  CHECK_THROWS_AS(implicit_k(f2, 2.0, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(implicit_k(f2, 2.0, 1.0, 0.0), DomainError);

  // odd symmetry: k for the reflected base is -k
  double km = implicit_k(f2, -2.0, -1.0, 1.0);
  CHECK(km == Catch::Approx(-k1).margin(1e-10));
}

TEST_CASE("implicit curve tabulation satisfies the defining equation") {
  Form2 f2{-1.0, -0.5};
  ImplicitCurve curve(f2, 2.0, 1.0, 100);
  REQUIRE(curve.s_grid.size() == 100);
  int slope_sign = 0;
  for (std::size_t i = 0; i < curve.s_grid.size(); ++i) {
    double s = curve.s_grid[i], k = curve.k_grid[i];
    double fv = 1.0 * std::tanh(-2.0 * s + k) - 2.0 * std::tanh(-0.5 * s + k);
    CHECK(std::abs(fv) <= 1e-10);
    double fp = 1.0 * f2.act.deriv(-2.0 * s + k) - 2.0 * f2.act.deriv(-0.5 * s + k);
    int sgn = fp > 0.0 ? 1 : -1;
    if (slope_sign == 0) slope_sign = sgn;
    CHECK(sgn == slope_sign);  // consistent branch along the curve
  }
  CHECK_THROWS_AS(curve.eval(0.0), KLookupOutOfRange);
  CHECK_THROWS_AS(curve.eval(1.1), KLookupOutOfRange);
  CHECK_NOTHROW(curve.eval(1e-6));  // below the table floor: refined on demand
}

TEST_CASE("implicit-control simulation solves Form2 and conserves the ratio") {
  Form2 f2{-1.0, -0.5};
  auto run = simulate_implicit(f2, 2.0, 1.0, 20.0, 1e-3);
  CHECK(run.form2_residual <= 1e-6);
  CHECK(run.ratio_defect <= 1e-9);
  CHECK(run.decays);

  // reflected base reproduces the mirrored trajectory
  auto mirror = simulate_implicit(f2, -2.0, -1.0, 20.0, 1e-3);
  REQUIRE(mirror.traj.size() == run.traj.size());
  for (std::size_t i = 0; i < run.traj.size(); i += 997)
    CHECK((mirror.traj.states[i] + run.traj.states[i]).lpNorm<Eigen::Infinity>() <= 1e-9);

  CHECK_THROWS_AS(simulate_implicit(f2, 1.0, 1.0, 1.0, 1e-3), NoBracket);
}

TEST_CASE("diagonal invariance for a = b") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::vector<ControlSchedule> schedules;
  for (int k = 0; k < 20; ++k)
    schedules.push_back(make_schedule({{unif(rng), 0.5}, {unif(rng), 0.5}, {unif(rng), 0.5}}));

  auto rep = diagonal_invariance_check(Form2{-1.0, -1.0}, schedules, 0.5);
  CHECK(rep.runs == 20);
  CHECK(rep.max_defect <= 1e-9);

  auto rep0 = diagonal_invariance_check(Form2{0.0, 0.0}, schedules, 0.5);
  CHECK(rep0.max_defect <= 1e-9);

  CHECK_THROWS_AS(diagonal_invariance_check(Form2{-1.0, -0.5}, schedules, 0.5), DomainError);
}

TEST_CASE("reflect is an involution and commutes with simulation") {
  Form1Transformed ft{1.0, 2.0};
  auto plan = ray_plan(ft, 1.0, 1.0);
  auto run = simulate_ray(ft, plan, 2.0, 1e-3);

  Trajectory twice = reflect(reflect(run.traj));
  REQUIRE(twice.size() == run.traj.size());
  for (std::size_t i = 0; i < twice.size(); ++i) {
    CHECK(twice.states[i] == run.traj.states[i]);
    CHECK(twice.control_trace[i] == run.traj.control_trace[i]);
  }

  // reflected plan keeps gain and kappa, flips the start
  RayPlan rplan = reflect(plan);
  CHECK(rplan.gain == plan.gain);
  CHECK(rplan.kappa == plan.kappa);
  CHECK(rplan.xt0 == -1.0);

  // direct check they agree with a freshly computed plan at the mirrored start
  auto fresh = ray_plan(ft, -1.0, -1.0);
  CHECK(fresh.gain == rplan.gain);
  CHECK(fresh.kappa == rplan.kappa);

  // simulated mirrored trajectory equals the negated original
  auto mrun = simulate_ray(ft, fresh, 2.0, 1e-3);
  for (std::size_t i = 0; i < run.traj.size(); i += 499)
    CHECK((mrun.traj.states[i] + run.traj.states[i]).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("transform consistency between Form1 and its transformed system") {
  // integrate Form1 under u(t), map through transform_f1, compare against
  // integrating the transformed dynamics driven by v = act(u(t))
  Form1 f{1.0, 2.0};
  auto sched = make_schedule({{0.4, 1.0}, {-0.3, 1.0}});

  auto field1 = [&](const Vec& s, const Vec& u) {
    Vec d(2);
    d << f.act.eval(f.a * s[0] + f.b * s[1]), f.act.eval(u[0]);
    return d;
  };
  Vec start = vec2(0.5, -0.2);
  Trajectory torig = integrate(field1, start, sched, 2.0, 1e-3);

  ControlSchedule vsched = sched;
  for (auto& seg : vsched.segments) seg.value[0] = f.act.eval(seg.value[0]);
  auto field_t = [&](const Vec& s, const Vec& v) {
    Vec d(2);
    d << f.a * f.act.eval(s[0]) + f.b * v[0], v[0];
    return d;
  };
  auto c0 = transform_f1(f, start[0], start[1], 0.0);
  Trajectory ttrans = integrate(field_t, vec2(c0.xt, c0.yt), vsched, 2.0, 1e-3);

  auto cT = transform_f1(f, torig.endpoint()[0], torig.endpoint()[1], 0.0);
  CHECK(std::abs(cT.xt - ttrans.endpoint()[0]) <= 1e-8);
  CHECK(std::abs(cT.yt - ttrans.endpoint()[1]) <= 1e-8);
}
