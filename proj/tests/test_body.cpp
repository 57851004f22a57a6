#include "doctest.h"

#include <cmath>

#include "affsurf/body.hpp"
#include "affsurf/rng.hpp"
#include "affsurf/sphere.hpp"

using namespace affsurf;

namespace {

Vec e_n(int dim) {
  Vec e = Vec::Zero(dim);
  e[dim - 1] = 1.0;
  return e;
}

// independent support oracle: max over dense boundary samples of <x, u>
double support_by_sampling(const ConvexBody& body, const Vec& u, int count = 20000) {
  SeededRng rng(314);
  double best = -kInf;
  for (int i = 0; i < count; ++i) {
    const Vec v = rng.unit_vector(body.dim());
    best = std::max(best, body.radial(v) * v.dot(u));
  }
  return best;
}

}  // namespace

TEST_CASE("support closed forms") {
  SeededRng rng(1);
  const auto ball = ConvexBody::ball(2, 1.0);
  for (int i = 0; i < 10; ++i) CHECK(ball.support(rng.unit_vector(2)) == doctest::Approx(1.0));

  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 1.0;
  const auto ell = ConvexBody::ellipsoid(a);
  Vec e1(2);
  e1 << 1.0, 0.0;
  CHECK(ell.support(e1) == doctest::Approx(2.0).epsilon(1e-14));
  // oracle h_{A B_2}(u) = |A^T u| via dense boundary sampling
  const Vec u = rng.unit_vector(2);
  CHECK(ell.support(u) == doctest::Approx((a.transpose() * u).norm()).epsilon(1e-14));
  CHECK(support_by_sampling(ell, u) <= ell.support(u) + 1e-12);
  CHECK(support_by_sampling(ell, u) > ell.support(u) - 2e-4);
}

TEST_CASE("translation identity for supports") {
  Vec c(2);
  c << 0.2, -0.1;
  const auto k0 = ConvexBody::ball(2, 1.0);
  const auto kc = ConvexBody::ball(2, 1.0, c);
  SeededRng rng(2);
  for (int i = 0; i < 32; ++i) {
    const Vec u = rng.unit_vector(2);
    CHECK(kc.support(u) - k0.support(u) == doctest::Approx(c.dot(u)).epsilon(1e-13));
  }
}

TEST_CASE("radial closed forms and bisection agreement") {
  SeededRng rng(3);
  CHECK(ConvexBody::ball(2, 1.0).radial(rng.unit_vector(2)) == doctest::Approx(1.0));
  CHECK(ConvexBody::ball(3, 2.0).radial(rng.unit_vector(3)) == doctest::Approx(2.0));
  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 1.0;
  const auto ell = ConvexBody::ellipsoid(a);
  Vec e2(2);
  e2 << 0.0, 1.0;
  CHECK(ell.radial(e2) == doctest::Approx(1.0).epsilon(1e-12));
  // oracle rho(u) = 1 / sqrt(u^T (A A^T)^{-1} u) for centered ellipsoids
  const Mat q = (a * a.transpose()).inverse();
  for (int i = 0; i < 16; ++i) {
    const Vec u = rng.unit_vector(2);
    CHECK(ell.radial(u) == doctest::Approx(1.0 / std::sqrt(u.dot(q * u))).epsilon(1e-12));
  }
  // p-norm ball radial vs membership bisection through the symmetral wrapper path
  const auto q4 = ConvexBody::pnorm_ball(2, 4.0, Vec::Ones(2));
  for (int i = 0; i < 8; ++i) {
    const Vec u = rng.unit_vector(2);
    const double r = q4.radial(u);
    CHECK(q4.contains(Vec((r - 1e-9) * u)));
    CHECK(!q4.contains(Vec((r + 1e-9) * u)));
  }
}

TEST_CASE("volumes") {
  CHECK(ConvexBody::ball(2, 1.0).volume() == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(ConvexBody::ball(3, 1.0).volume() == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 1.0;
  CHECK(ConvexBody::ellipsoid(a).volume() == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  // q = 2 p-norm ball is the unit disk
  CHECK(ConvexBody::pnorm_ball(2, 2.0, Vec::Ones(2)).volume() ==
        doctest::Approx(M_PI).epsilon(1e-12));
  // perturbed ball in 2d: |K| = (1/2) int rho^2 = pi r^2 (1 + delta^2/2)
  CHECK(ConvexBody::perturbed_ball(2, 1.0, 0.05, 3).volume() ==
        doctest::Approx(M_PI * (1.0 + 0.5 * 0.05 * 0.05)).epsilon(1e-10));
}

TEST_CASE("graph body of the unit disk reproduces pi") {
  // sample f = g = sqrt(1 - x^2) on 512 cells
  const int n = 512;
  const double lo = -1.0, hi = 1.0, dx = (hi - lo) / n;
  Vec f(n + 2);
  f[0] = 0.0;
  f[n + 1] = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * dx;
    f[i + 1] = std::sqrt(std::max(1.0 - x * x, 0.0));
  }
  const auto gb = ConvexBody::graph_body_1d(Mat::Identity(2, 2), lo, hi, f, f);
  CHECK(gb.volume() == doctest::Approx(M_PI).epsilon(1e-3));
  CHECK(gb.kind() == BodyKind::GraphBody);
  SeededRng rng(5);
  for (int i = 0; i < 8; ++i) {
    const Vec u = rng.unit_vector(2);
    CHECK(gb.support(u) == doctest::Approx(1.0).epsilon(2e-4));
    CHECK(gb.radial(u) == doctest::Approx(1.0).epsilon(2e-3));
  }
}

TEST_CASE("polar volumes") {
  QuadratureSpec q;
  CHECK(ConvexBody::ball(2, 1.0).polar_volume(q) == doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(ConvexBody::ball(2, 2.0).polar_volume(q) == doctest::Approx(M_PI / 4.0).epsilon(1e-10));
  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 1.0;
  CHECK(ConvexBody::ellipsoid(a).polar_volume(q) == doctest::Approx(M_PI / 2.0).epsilon(1e-10));
  CHECK(ConvexBody::ball(3, 1.0).polar_volume(q) ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-3));
  CHECK(ConvexBody::ball(3, 2.0).polar_volume(q) ==
        doctest::Approx(4.0 * M_PI / 3.0 / 8.0).epsilon(1e-3));
}

TEST_CASE("graph extraction closed forms") {
  QuadratureSpec q;
  // unit ball along e_n: f = g = sqrt(1 - x^2)
  const auto gp = to_graph_pair(ConvexBody::ball(2, 1.0), e_n(2), q);
  for (double xv : {-0.7, -0.1, 0.4}) {
    Vec x(1);
    x[0] = xv;
    const double expect = std::sqrt(1.0 - xv * xv);
    CHECK(gp.f(x) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(gp.g(x) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(gp.derivative_mode() == DerivativeMode::Analytic);
  // shifted ball: f = 0.3 + sqrt(1 - x^2), g = -0.3 + sqrt(1 - x^2)
  Vec c(2);
  c << 0.0, 0.3;
  const auto gp2 = to_graph_pair(ConvexBody::ball(2, 1.0, c), e_n(2), q);
  for (double xv : {-0.5, 0.2}) {
    Vec x(1);
    x[0] = xv;
    const double w = std::sqrt(1.0 - xv * xv);
    CHECK(gp2.f(x) == doctest::Approx(0.3 + w).epsilon(1e-13));
    CHECK(gp2.g(x) == doctest::Approx(-0.3 + w).epsilon(1e-13));
  }
  // ellipsoid diag(1,2): f = g = 2 sqrt(1 - x^2)
  Mat a(2, 2);
  a << 1.0, 0.0, 0.0, 2.0;
  const auto gp3 = to_graph_pair(ConvexBody::ellipsoid(a), e_n(2), q);
  for (double xv : {-0.6, 0.3}) {
    Vec x(1);
    x[0] = xv;
    CHECK(gp3.f(x) == doctest::Approx(2.0 * std::sqrt(1.0 - xv * xv)).epsilon(1e-13));
  }
  // solver-backed extraction matches the closed form on the p-norm ball axis frame
  const auto q4 = ConvexBody::pnorm_ball(2, 4.0, Vec::Ones(2));
  const auto gp4 = to_graph_pair(q4, e_n(2), q);
  for (double xv : {-0.5, 0.0, 0.7}) {
    Vec x(1);
    x[0] = xv;
    CHECK(gp4.f(x) ==
          doctest::Approx(std::pow(1.0 - std::pow(std::abs(xv), 4.0), 0.25)).epsilon(1e-11));
  }
}

TEST_CASE("hausdorff distance") {
  QuadratureSpec q;
  const auto b1 = ConvexBody::ball(2, 1.0);
  const auto b2 = ConvexBody::ball(2, 2.0);
  CHECK(hausdorff_distance(b1, b1, q) == 0.0);
  CHECK(hausdorff_distance(b1, b2, q) == doctest::Approx(1.0));
  Vec c(2);
  c << 0.12, -0.07;
  const auto bc = ConvexBody::ball(2, 1.0, c);
  CHECK(hausdorff_distance(b1, bc, q) == doctest::Approx(c.norm()).epsilon(1e-5));
  CHECK_THROWS_AS(hausdorff_distance(b1, ConvexBody::ball(3, 1.0), q), InputError);
}

TEST_CASE("support sublinearity on sampled pairs") {
  SeededRng rng(21);
  QuadratureSpec q;
  for (const auto& body : {ConvexBody::pnorm_ball(2, 1.5, Vec::Ones(2)),
                           ConvexBody::perturbed_ball(2, 1.0, 0.05, 3),
                           ConvexBody::perturbed_ball(3, 1.0, 0.05)}) {
    for (int it = 0; it < 64; ++it) {
      const Vec u = rng.unit_vector(body.dim());
      const Vec v = rng.unit_vector(body.dim());
      const Vec w = u + v;
      if (w.norm() < 1e-6) continue;
      const double hw = w.norm() * body.support(Vec(w / w.norm()));
      CHECK(hw <= body.support(u) + body.support(v) + 1e-8);
    }
  }
}

TEST_CASE("graph concavity on sampled triples") {
  SeededRng rng(23);
  QuadratureSpec q;
  const auto body = ConvexBody::pnorm_ball(2, 3.0, Vec::Ones(2));
  const auto gp = to_graph_pair(body, rng.unit_vector(2), q);
  const auto& dom = gp.domain();
  const double lo = dom.bbox_lo()[0], hi = dom.bbox_hi()[0];
  for (int it = 0; it < 64; ++it) {
    Vec x1(1), x2(1), xm(1);
    x1[0] = rng.uniform(lo, hi);
    x2[0] = rng.uniform(lo, hi);
    xm[0] = 0.5 * (x1[0] + x2[0]);
    if (dom.margin(x1) < 1e-6 || dom.margin(x2) < 1e-6) continue;
    CHECK(gp.f(xm) >= 0.5 * (gp.f(x1) + gp.f(x2)) - 1e-10);
    CHECK(gp.g(xm) >= 0.5 * (gp.g(x1) + gp.g(x2)) - 1e-10);
  }
}

TEST_CASE("rotation consistency: chord integral matches volume in any frame") {
  SeededRng rng(29);
  QuadratureSpec q;
  q.grid_resolution = 256;
  for (const auto& body : {ConvexBody::pnorm_ball(2, 3.0, Vec::Ones(2)),
                           ConvexBody::perturbed_ball(2, 1.0, 0.05, 3)}) {
    const double vol = body.volume(q);
    for (int it = 0; it < 3; ++it) {
      const Vec xi = rng.unit_vector(2);
      const auto sec = body.section(frame_rotation(xi), q);
      StripParams params;
      params.boundary_exponent = 0.5;
      params.eval_floor = 1e-9;
      auto chord = [&sec](const Vec& x) { return sec->f(x) + sec->g(x); };
      const auto run =
          truncated_pair(sec->domain(), q.grid_resolution, q.boundary_margin, params, chord,
                         ExecMode::Serial);
      CHECK(run.value_half == doctest::Approx(vol).epsilon(q.tol_rel));
    }
  }
}

TEST_CASE("polar involution on balls") {
  QuadratureSpec q;
  for (double r : {0.5, 1.0, 2.0}) {
    const double expect = std::pow(r, -2.0) * M_PI;
    CHECK(ConvexBody::ball(2, r).polar_volume(q) == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("json round-trip preserves geometry") {
  SeededRng rng(31);
  QuadratureSpec q;
  std::vector<ConvexBody> bodies;
  Vec c(2);
  c << 0.0, 0.3;
  bodies.push_back(ConvexBody::ball(2, 1.0, c));
  Mat a(2, 2);
  a << 2.0, 0.1, 0.0, 0.5;
  bodies.push_back(ConvexBody::ellipsoid(a));
  bodies.push_back(ConvexBody::pnorm_ball(2, 4.0, Vec::Ones(2)));
  bodies.push_back(ConvexBody::perturbed_ball(2, 1.0, 0.05, 3));
  {
    const int n = 64;
    Vec f(n + 2);
    f[0] = 0.0;
    f[n + 1] = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * 2.0 / n;
      f[i + 1] = std::sqrt(std::max(1.0 - x * x, 0.0));
    }
    bodies.push_back(ConvexBody::graph_body_1d(Mat::Identity(2, 2), -1.0, 1.0, f, f));
  }
  bodies.push_back(ConvexBody::symmetral(ConvexBody::ball(2, 1.0, c), e_n(2)));
  for (const auto& body : bodies) {
    const auto back = ConvexBody::from_json(body.to_json());
    CHECK(back.kind() == body.kind());
    for (int i = 0; i < 16; ++i) {
      const Vec u = rng.unit_vector(body.dim());
      CHECK(back.support(u) == doctest::Approx(body.support(u)).epsilon(1e-10));
    }
  }
}

TEST_CASE("construction-time validation errors") {
  Vec far(2);
  far << 0.0, 1.5;
  CHECK_THROWS_AS(ConvexBody::ball(2, 1.0, far), GeometryError);  // origin outside
  CHECK_THROWS_AS(ConvexBody::ball(2, -1.0), InputError);
  CHECK_THROWS_AS(ConvexBody::ellipsoid(Mat::Zero(2, 2)), InputError);
  CHECK_THROWS_AS(ConvexBody::pnorm_ball(2, 1.0, Vec::Ones(2)), InputError);
  CHECK_THROWS_AS(ConvexBody::pnorm_ball(2, 3.0, Vec::Zero(2)), InputError);
  // large high-frequency perturbation breaks convexity
  CHECK_THROWS_AS(ConvexBody::perturbed_ball(2, 1.0, 0.4, 6), InputError);
  // non-unit direction
  Vec bad(2);
  bad << 0.5, 0.5;
  CHECK_THROWS_AS(ConvexBody::ball(2, 1.0).support(bad), InputError);
  CHECK_THROWS_AS(to_graph_pair(ConvexBody::ball(2, 1.0), bad, QuadratureSpec{}), InputError);
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec q;
  q.grid_resolution = 8;
  CHECK_THROWS_AS(q.validate(), InputError);
  q = QuadratureSpec{};
  q.boundary_margin = 0.2;
  CHECK_THROWS_AS(q.validate(), InputError);
  q = QuadratureSpec{};
  CHECK_NOTHROW(q.validate());
}
