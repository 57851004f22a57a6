// Convex bodies with the origin in the interior: support/radial evaluation,
// volume, polar volume, graph extraction, Hausdorff distance, serialization.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "affsurf/graph.hpp"
#include "affsurf/quadrature.hpp"

#include "json.hpp"

namespace affsurf {

enum class BodyKind { Ball, Ellipsoid, PNormBall, PerturbedBall, GraphBody, Symmetral };

std::string body_kind_name(BodyKind k);

namespace detail {
class BodyImpl;
}

class ConvexBody {
 public:
  static ConvexBody ball(int dim, double radius, Vec center);
  static ConvexBody ball(int dim, double radius);  // centered
  static ConvexBody ellipsoid(Mat map, Vec center);
  static ConvexBody ellipsoid(Mat map);  // centered
  static ConvexBody pnorm_ball(int dim, double exponent, Vec semi_axes);
  // radial r*(1 + amplitude*s(u)); s = cos(k*theta) for n=2, zonal P2 for n=3
  static ConvexBody perturbed_ball(int dim, double radius, double amplitude, int frequency = 3);
  // n=2 grid body: nodes are [lo, centers..., hi]
  static ConvexBody graph_body_1d(Mat frame, double lo, double hi, Vec f_nodes, Vec g_nodes);
  // n=3 grid body: cell-centered values over the bounding box, row-major (x-major)
  static ConvexBody graph_body_2d(Mat frame, Vec bbox_lo, Vec bbox_hi, int nx, int ny, Vec f,
                                  Vec g, std::vector<char> mask);
  static ConvexBody symmetral(const ConvexBody& parent, const Vec& xi);

  BodyKind kind() const;
  int dim() const;
  double support(const Vec& u) const;  // u unit
  double radial(const Vec& u) const;   // u unit
  bool contains(const Vec& z) const;
  double volume(const QuadratureSpec& q = {}) const;
  double polar_volume(const QuadratureSpec& q = {}) const;
  bool analytic_jets() const;
  // catalog metadata: curvature bounded away from zero (psi-branch safe)
  bool positive_curvature() const;

  std::shared_ptr<const SectionBackend> section(const Mat& rotation, const QuadratureSpec& q) const;

  nlohmann::json to_json() const;
  static ConvexBody from_json(const nlohmann::json& j);

 private:
  explicit ConvexBody(std::shared_ptr<const detail::BodyImpl> impl);
  std::shared_ptr<const detail::BodyImpl> impl_;
};

GraphPair to_graph_pair(const ConvexBody& body, const Vec& xi, const QuadratureSpec& q);

// max over sampled directions of |h_K - h_L|
double hausdorff_distance(const ConvexBody& k, const ConvexBody& l, const QuadratureSpec& q);

}  // namespace affsurf
