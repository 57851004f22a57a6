#include "doctest.h"

#include "affsurf/common.hpp"
#include "affsurf/rng.hpp"
#include "affsurf/sphere.hpp"

using namespace affsurf;

TEST_CASE("frame rotation maps xi to e_n with det +1") {
  SeededRng rng(42);
  for (int dim : {2, 3}) {
    Vec en = Vec::Zero(dim);
    en[dim - 1] = 1.0;
    for (int it = 0; it < 50; ++it) {
      const Vec xi = rng.unit_vector(dim);
      const Mat r = frame_rotation(xi);
      CHECK((r * xi - en).norm() < 1e-12);
      CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
      CHECK((r * r.transpose() - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
    }
    // antipodal special case goes through the e_1 reflection
    const Mat r = frame_rotation(Vec(-en));
    CHECK((r * Vec(-en) - en).norm() < 1e-12);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
    // deterministic
    const Vec xi = rng.unit_vector(dim);
    CHECK((frame_rotation(xi) - frame_rotation(xi)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("icosphere rule partitions the sphere area") {
  for (int level : {1, 2, 3}) {
    const SphereRule rule = icosphere_rule(level);
    CHECK(rule.nodes.size() == 20u * (1u << (2 * level)));
    double total = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(total == doctest::Approx(4.0 * M_PI).epsilon(1e-10));
    for (const auto& v : rule.nodes) CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("direction sets are unit and sized") {
  auto d2 = direction_set(2, 64);
  CHECK(d2.size() == 64);
  auto d3 = direction_set(3, 100);
  CHECK(d3.size() >= 100);
  for (const auto& u : d3) CHECK(std::abs(u.norm() - 1.0) < 1e-12);
}

TEST_CASE("pairwise sum is order-deterministic and accurate") {
  SeededRng rng(7);
  std::vector<double> v(1003);
  long double exact = 0.0;
  for (auto& x : v) {
    x = rng.uniform(-1.0, 1.0);
    exact += x;
  }
  const double s1 = pairwise_sum(v);
  const double s2 = pairwise_sum(v);
  CHECK(s1 == s2);
  CHECK(std::abs(s1 - static_cast<double>(exact)) < 1e-12);
}

TEST_CASE("seeded rng reproduces streams") {
  SeededRng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  SeededRng c(124);
  bool differs = false;
  SeededRng a2(123);
  for (int i = 0; i < 10; ++i) differs = differs || (a2.uniform() != c.uniform());
  CHECK(differs);
}
