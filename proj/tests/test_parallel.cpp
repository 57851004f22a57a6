#include "doctest.h"

#include "affsurf/explab.hpp"

using namespace affsurf;

// The OpenMP kernel must reproduce the serial reference bit for bit: cell
// evaluations land in indexed slots and the reduction is a fixed pairwise tree.
TEST_CASE("parallel quadrature is bit-identical to the serial reference") {
  QuadratureSpec q;
  q.grid_resolution = 256;
  Vec en2(2), en3(3);
  en2 << 0.0, 1.0;
  en3 << 0.0, 0.0, 1.0;
  Mat e3 = Mat::Identity(3, 3);
  e3(0, 0) = 2.0;
  e3(2, 2) = 0.5;
  struct Case {
    ConvexBody body;
    Generator gen;
  };
  std::vector<Case> cases;
  cases.push_back({ConvexBody::pnorm_ball(2, 3.0, Vec::Ones(2)), Generator::power_conc(0.5, 2)});
  cases.push_back({ConvexBody::perturbed_ball(2, 1.0, 0.05, 3), Generator::power_conv(-1.0, 2)});
  cases.push_back({ConvexBody::ellipsoid(e3), Generator::power_conc(1.0, 3)});
  for (const auto& tc : cases) {
    QuadratureSpec qq = q;
    qq.grid_resolution = tc.body.dim() == 2 ? 256 : 48;
    Vec xi = tc.body.dim() == 2 ? en2 : en3;
    const SurfaceResult serial = affine_surface_area(tc.body, tc.gen, xi, qq, ExecMode::Serial);
    const SurfaceResult parallel =
        affine_surface_area(tc.body, tc.gen, xi, qq, ExecMode::Parallel);
    CHECK(serial.value == parallel.value);
    CHECK(serial.estimated_error == parallel.estimated_error);
    CHECK(serial.n_samples == parallel.n_samples);
  }
}

TEST_CASE("trace pipeline matches between serial and parallel execution") {
  QuadratureSpec q;
  q.grid_resolution = 64;
  q.sphere_samples = 256;
  Mat a(2, 2);
  a << 1.6, 0.0, 0.0, 0.7;
  const std::vector<Generator> gens{Generator::power_conc(0.5, 2)};
  const auto ts = successive_symmetrization(ConvexBody::ellipsoid(a), 3, 5, gens, q,
                                            ExecMode::Serial, "x");
  const auto tp = successive_symmetrization(ConvexBody::ellipsoid(a), 3, 5, gens, q,
                                            ExecMode::Parallel, "x");
  REQUIRE(ts.steps.size() == tp.steps.size());
  for (std::size_t i = 0; i < ts.steps.size(); ++i) {
    CHECK(ts.steps[i].volume == tp.steps[i].volume);
    CHECK(ts.steps[i].hausdorff_to_bk == tp.steps[i].hausdorff_to_bk);
    CHECK(ts.steps[i].surface_values[0].value == tp.steps[i].surface_values[0].value);
  }
}
