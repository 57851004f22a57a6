#include "doctest.h"

#include <cmath>

#include "affsurf/explab.hpp"
#include "affsurf/rng.hpp"

using namespace affsurf;

namespace {
Vec e_n(int dim) {
  Vec e = Vec::Zero(dim);
  e[dim - 1] = 1.0;
  return e;
}
QuadratureSpec q2() {
  QuadratureSpec q;
  q.grid_resolution = 256;
  q.boundary_margin = 0.005;
  q.sphere_samples = 1024;
  return q;
}
}  // namespace

TEST_CASE("symmetral of an off-center ball is the centered ball") {
  Vec c(2);
  c << 0.0, 0.3;
  const auto sym = ConvexBody::symmetral(ConvexBody::ball(2, 1.0, c), e_n(2));
  const auto target = ConvexBody::ball(2, 1.0);
  CHECK(hausdorff_distance(sym, target, q2()) < 2e-3);
  CHECK(sym.volume(q2()) == doctest::Approx(M_PI).epsilon(1e-3));
  CHECK(sym.kind() == BodyKind::Symmetral);
}

TEST_CASE("steiner symmetrization preserves volume across the catalog") {
  SeededRng rng(41);
  const QuadratureSpec q = q2();
  for (const auto& entry : catalog(2)) {
    const double vol = entry.body.volume(q);
    for (int it = 0; it < 8; ++it) {
      const Vec xi = rng.unit_vector(2);
      const auto sym = steiner_symmetral(entry.body, xi, q);
      CHECK(sym.volume(q) == doctest::Approx(vol).epsilon(3e-3));
    }
  }
}

TEST_CASE("symmetral is reflection-symmetric about xi-perp") {
  SeededRng rng(43);
  const QuadratureSpec q = q2();
  const auto body = ConvexBody::pnorm_ball(2, 3.0, Vec::Ones(2));
  const Vec xi = rng.unit_vector(2);
  const auto sym = steiner_symmetral(body, xi, q);
  for (int it = 0; it < 64; ++it) {
    const Vec u = rng.unit_vector(2);
    const Vec refl = u - 2.0 * u.dot(xi) * xi;
    CHECK(sym.support(u) == doctest::Approx(sym.support(refl)).epsilon(5e-3));
  }
}

TEST_CASE("idempotence: symmetrizing twice in the same direction is stable") {
  const QuadratureSpec q = q2();
  SeededRng rng(47);
  const Vec xi = rng.unit_vector(2);
  const auto body = ConvexBody::pnorm_ball(2, 4.0, Vec::Ones(2));
  const auto s1 = materialize_symmetral(body, xi, q);
  const auto s2 = materialize_symmetral(s1, xi, q);
  // support distance within 2 grid cells
  const double cell = 2.0 * 2.2 / q.grid_resolution;
  CHECK(hausdorff_distance(s1, s2, q) < 2.0 * cell);
}

TEST_CASE("ellipsoid symmetral keeps as_phi (SL image, equality case)") {
  const QuadratureSpec q = q2();
  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 0.5;
  const auto ell = ConvexBody::ellipsoid(a);
  SeededRng rng(53);
  const Generator gen = Generator::power_conc(0.5, 2);
  for (int it = 0; it < 3; ++it) {
    const Vec xi = rng.unit_vector(2);
    const SurfaceResult before = affine_surface_area(ell, gen, xi, q);
    const SurfaceResult after = affine_surface_area(steiner_symmetral(ell, xi, q), gen, xi, q);
    const double slack = 3.0 * (before.estimated_error + after.estimated_error);
    CHECK(std::abs(after.value - before.value) <= slack);
  }
}

TEST_CASE("monotonicity: as_phi rises and as_psi falls under symmetrization") {
  const QuadratureSpec q = q2();
  Vec c(2);
  c << 0.0, 0.3;
  struct Case {
    ConvexBody body;
    Generator gen;
    Vec xi;
  };
  Vec diag(2);
  diag << std::sqrt(0.5), std::sqrt(0.5);
  std::vector<Case> cases;
  cases.push_back({ConvexBody::ball(2, 1.0, c), Generator::power_conc(1.0, 2), e_n(2)});
  cases.push_back({ConvexBody::ball(2, 1.0, c), Generator::power_conc(0.5, 2), e_n(2)});
  cases.push_back({ConvexBody::pnorm_ball(2, 4.0, Vec::Ones(2)), Generator::power_conv(-1.0, 2),
                   diag});
  cases.push_back({ConvexBody::perturbed_ball(2, 1.0, 0.05, 3), Generator::power_conv(-0.5, 2),
                   e_n(2)});
  for (const auto& tc : cases) {
    const SurfaceResult before = affine_surface_area(tc.body, tc.gen, tc.xi, q);
    const SurfaceResult after =
        affine_surface_area(steiner_symmetral(tc.body, tc.xi, q), tc.gen, tc.xi, q);
    const double slack = 3.0 * (before.estimated_error + after.estimated_error);
    if (tc.gen.class_tag() == ClassTag::Conv) {
      CHECK(after.value - before.value <= slack);
    } else {
      CHECK(after.value - before.value >= -slack);
    }
  }
  // p = 1 is translation invariant: the off-center ball case is near equality
  const SurfaceResult b1 =
      affine_surface_area(cases[0].body, cases[0].gen, cases[0].xi, q);
  const SurfaceResult a1 = affine_surface_area(
      steiner_symmetral(cases[0].body, cases[0].xi, q), cases[0].gen, cases[0].xi, q);
  CHECK(std::abs(a1.value - b1.value) <= 3.0 * (b1.estimated_error + a1.estimated_error));
}

TEST_CASE("midpoint planarity separates ellipsoids from the q4 body") {
  const QuadratureSpec q = q2();
  SeededRng rng(59);
  Mat a(2, 2);
  a << 2.0, 0.3, 0.0, 0.5;
  const auto ell = ConvexBody::ellipsoid(a);
  for (int it = 0; it < 4; ++it)
    CHECK(midpoint_planarity(ell, rng.unit_vector(2), q) < 1e-8);
  Vec c(2);
  c << 0.1, 0.25;
  CHECK(midpoint_planarity(ConvexBody::ball(2, 1.0, c), e_n(2), q) < 1e-8);
  const auto q4 = ConvexBody::pnorm_ball(2, 4.0, Vec::Ones(2));
  Vec xi30(2);
  xi30 << 0.5, std::sqrt(3.0) / 2.0;  // generic non-axis direction
  CHECK(midpoint_planarity(q4, xi30, q) > 1e-3);
  // the 45-degree direction is a reflection symmetry of the q4 body, so its
  // midpoint set is exactly planar
  Vec xi45(2);
  xi45 << std::sqrt(0.5), std::sqrt(0.5);
  CHECK(midpoint_planarity(q4, xi45, q) < 1e-8);
}

TEST_CASE("successive symmetrization of a centered ball is a fixed point") {
  QuadratureSpec q = q2();
  q.grid_resolution = 128;
  const auto trace = successive_symmetrization(ConvexBody::ball(2, 1.0), 4, 3,
                                               {Generator::power_conc(0.5, 2)}, q,
                                               ExecMode::Serial, "ball");
  CHECK(trace.bk_radius == doctest::Approx(1.0).epsilon(1e-6));
  for (const auto& st : trace.steps) {
    CHECK(st.hausdorff_to_bk < 5e-3);
    CHECK(st.volume == doctest::Approx(M_PI).epsilon(1e-3));
    CHECK(st.surface_values[0].value == doctest::Approx(2 * M_PI).epsilon(2e-2));
  }
}

TEST_CASE("short ellipse trace: volume holds and d_H shrinks") {
  QuadratureSpec q = q2();
  q.grid_resolution = 128;
  q.sphere_samples = 512;
  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 0.5;
  const auto trace = successive_symmetrization(ConvexBody::ellipsoid(a), 10, 7,
                                               {Generator::power_conc(0.5, 2)}, q,
                                               ExecMode::Serial, "ellipse");
  CHECK(trace.steps.size() == 10);
  for (const auto& st : trace.steps)
    CHECK(st.volume == doctest::Approx(trace.initial_volume).epsilon(3e-3));
  CHECK(trace.steps.back().hausdorff_to_bk < trace.steps.front().hausdorff_to_bk);
  // every 5th step is a coordinate direction
  CHECK(std::abs(trace.steps[4].xi[0]) == doctest::Approx(1.0));
  CHECK(std::abs(trace.steps[9].xi[1]) == doctest::Approx(1.0));
}

TEST_CASE("planarity needs enough samples") {
  QuadratureSpec q;
  q.grid_resolution = 16;
  q.boundary_margin = 0.09;
  // a 16-cell grid with a huge margin still leaves enough points in 2d; force
  // the error path with a degenerate sphere count instead
  CHECK_THROWS_AS(successive_symmetrization(ConvexBody::ball(2, 1.0), 0, 1, {}, q), InputError);
}
