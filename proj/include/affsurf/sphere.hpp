// Deterministic direction sets on S^{n-1} and a face-based quadrature rule on S^2.
#pragma once

#include <vector>

#include "affsurf/common.hpp"

namespace affsurf {

// Uniform angles for n=2; icosphere vertices for n=3 (smallest subdivision
// level with at least `count` vertices, capped at 2562).
std::vector<Vec> direction_set(int dim, int count);

struct SphereRule {           // quadrature nodes on S^2
  std::vector<Vec> nodes;     // face centroids projected to the sphere
  std::vector<double> weights;  // spherical triangle areas, sum = 4*pi
};

SphereRule icosphere_rule(int level);  // 20 * 4^level faces

// Householder-derived rotation taking xi to e_n; deterministic.
Mat frame_rotation(const Vec& xi);

}  // namespace affsurf
