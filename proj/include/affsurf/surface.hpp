// L_phi / L_psi / L_p / L_{+-inf} affine surface areas via the graph-function
// integral, with boundary-truncated quadrature and divergence handling.
#pragma once

#include "affsurf/body.hpp"
#include "affsurf/generators.hpp"

namespace affsurf {

struct SurfaceResult {
  double value = 0.0;
  double estimated_error = 0.0;
  long n_samples = 0;
  bool diverged = false;
};

// Integral over K_0 of phi(|det d2f|/<f>^{n+1}) <f> + (same for g); the value
// is frame-independent, xi only selects the computational frame.
SurfaceResult affine_surface_area(const ConvexBody& body, const Generator& gen, const Vec& xi,
                                  const QuadratureSpec& q, ExecMode mode = ExecMode::Parallel);

// L_p dispatch: p > 0 -> PowerConc, -n < p < 0 -> PowerConv
SurfaceResult as_p(const ConvexBody& body, double p, const QuadratureSpec& q,
                   ExecMode mode = ExecMode::Parallel);

// phi(t) = t: integrand |det d2f| / <f>^n; equals n |K^polar| for smooth bodies
SurfaceResult as_infinity(const ConvexBody& body, const QuadratureSpec& q,
                          ExecMode mode = ExecMode::Parallel);

// raw truncated midpoint sum at a given eps (diagnostic; used by the
// eps-monotonicity property test)
double truncated_surface_sum(const ConvexBody& body, const Generator& gen, const Vec& xi,
                             const QuadratureSpec& q, double eps);

}  // namespace affsurf
