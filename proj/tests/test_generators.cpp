#include "doctest.h"

#include <cmath>

#include "affsurf/generators.hpp"

using namespace affsurf;

TEST_CASE("power generator values") {
  const Generator conc = Generator::power_conc(1.0, 2);  // phi(t) = t^{1/3}
  CHECK(conc.eval(8.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(conc.eval(0.0) == 0.0);

  const Generator cst = Generator::constant(2.5, 2);
  CHECK(cst.eval(0.3) == 2.5);
  CHECK(cst.eval(1e9) == 2.5);

  const Generator conv = Generator::power_conv(-1.0, 2);  // psi(t) = 1/t
  CHECK(conv.eval(4.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::isinf(conv.eval(0.0)));

  CHECK_THROWS_AS(conc.eval(-1.0), InputError);
  CHECK_THROWS_AS(Generator::power_conc(0.0, 2), InputError);
  CHECK_THROWS_AS(Generator::power_conv(-2.0, 2), InputError);  // p <= -n
}

TEST_CASE("transform values") {
  const Generator conc = Generator::power_conc(1.0, 2);  // F(t) = t
  CHECK(conc.transform_eval(5.0) == doctest::Approx(5.0).epsilon(1e-14));
  const Generator cst = Generator::constant(3.0, 2);
  CHECK(cst.transform_eval(17.0) == 3.0);
  const Generator conv = Generator::power_conv(-1.0, 2);  // G(t) = t^{-3}
  CHECK(conv.transform_eval(2.0) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("class validation flags") {
  // F exponent (np+p)/(n+p) = 0.6 < 1: concave, strictly
  const auto r1 = Generator::power_conc(0.5, 2).validate_class();
  CHECK(r1.in_class);
  CHECK(r1.transform_ok);
  CHECK(r1.strict);

  // p = 1: F(t) = t, concave but not strictly
  const auto r2 = Generator::power_conc(1.0, 2).validate_class();
  CHECK(r2.in_class);
  CHECK(r2.transform_ok);
  CHECK(!r2.strict);

  // psi(t) = 1/t: G(t) = t^{-3} convex decreasing
  const auto r3 = Generator::power_conv(-1.0, 2).validate_class();
  CHECK(r3.in_class);
  CHECK(r3.transform_ok);
  CHECK(r3.strict);

  // phi(t) = t is not in Conc (phi/t does not vanish) and F = t^3 is convex
  std::vector<double> kt, kv;
  for (int i = 0; i <= 40; ++i) {
    const double t = std::exp(std::log(1e-6) + i * (std::log(1e6) - std::log(1e-6)) / 40);
    kt.push_back(t);
    kv.push_back(t);
  }
  const auto r4 = Generator::tabulated(kt, kv, 2, ClassTag::Conc, "identity").validate_class();
  CHECK(!r4.in_class);
  CHECK(!r4.transform_ok);
}

TEST_CASE("F concavity matches the closed-form p <= 1 predicate") {
  for (int i = 1; i <= 20; ++i) {
    const double p = 0.1 * i;
    const auto rep = Generator::power_conc(p, 2).validate_class();
    CHECK(rep.transform_ok == (p <= 1.0 + 1e-12));
  }
}

TEST_CASE("tabulated generator with concave increasing F lands in Conc") {
  // F(t) = t/(1+t): concave, increasing, F(0) = 0; phi(t) = F(t^{1/(n+1)})
  const int n = 2;
  std::vector<double> kt, kv;
  for (int i = 0; i <= 60; ++i) {
    const double t = std::exp(std::log(1e-6) + i * (std::log(1e6) - std::log(1e-6)) / 60);
    const double root = std::pow(t, 1.0 / (n + 1));
    kt.push_back(t);
    kv.push_back(root / (1.0 + root));
  }
  const auto gen = Generator::tabulated(kt, kv, n, ClassTag::Conc, "saturating");
  const auto rep = gen.validate_class();
  CHECK(rep.transform_ok);
  CHECK(rep.in_class);  // the paper's implication: F concave increasing => phi in Conc
}

TEST_CASE("concave F obeys F(t) <= F(1) t beyond 1") {
  const Generator gen = Generator::power_conc(0.7, 3);
  const double f1 = gen.transform_eval(1.0);
  for (double t : {1.5, 4.0, 77.0, 1e4, 1e6}) CHECK(gen.transform_eval(t) <= f1 * t * (1 + 1e-12));
}

TEST_CASE("generator json round-trip") {
  for (const auto& g : {Generator::power_conc(0.5, 2), Generator::power_conv(-0.5, 3),
                        Generator::constant(2.0, 2)}) {
    const Generator back = Generator::from_json_string(g.to_json_string());
    CHECK(back.name() == g.name());
    for (double t : {0.1, 1.0, 42.0}) CHECK(back.eval(t) == g.eval(t));
  }
}
