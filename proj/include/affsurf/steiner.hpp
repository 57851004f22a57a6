// Steiner symmetrization: symmetral construction, grid materialization,
// midpoint planarity diagnostics, successive-symmetrization traces.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affsurf/body.hpp"
#include "affsurf/surface.hpp"

namespace affsurf {

// Semi-analytic wrapper when the parent has analytic jets, otherwise a grid
// body with f = g = (f+g)/2 in the xi frame.
ConvexBody steiner_symmetral(const ConvexBody& body, const Vec& xi,
                             const QuadratureSpec& q = {});

// Sample the symmetral onto a grid body in the xi frame (always materializes).
ConvexBody materialize_symmetral(const ConvexBody& body, const Vec& xi, const QuadratureSpec& q);

// Max absolute residual of an affine least-squares fit to the chord midpoints
// (f - g)/2 over the truncated projection domain. Near zero iff M(K, xi) lies
// in a hyperplane.
double midpoint_planarity(const ConvexBody& body, const Vec& xi, const QuadratureSpec& q);

struct TraceStep {
  int index = 0;
  Vec xi;
  double hausdorff_to_bk = 0.0;
  double volume = 0.0;
  std::vector<SurfaceResult> surface_values;  // parallel to generator list
};

struct SymmetrizationTrace {
  std::uint64_t seed = 0;
  std::string body_id;
  double bk_radius = 0.0;
  double initial_volume = 0.0;
  std::vector<std::string> generator_names;
  std::vector<TraceStep> steps;
};

// Draws directions from the seeded stream (every 5th step a coordinate
// direction), symmetrizes iteratively, materializing to a grid body at every
// step after the first, and records per-step diagnostics.
SymmetrizationTrace successive_symmetrization(const ConvexBody& body, int n_steps,
                                              std::uint64_t seed,
                                              const std::vector<Generator>& gens,
                                              const QuadratureSpec& q,
                                              ExecMode mode = ExecMode::Parallel,
                                              const std::string& body_id = "");

}  // namespace affsurf
