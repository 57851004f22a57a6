// Boundary-truncated midpoint quadrature over masked grids.
//
// Graph-integral integrands behave like A(x) * margin^sigma near relbd K_0
// (sigma = -1/2 for surface integrands, +1/2 for chord integrals). Each run
// evaluates active cells at their centers, integrates boundary-layer cells
// with sqrt-law weights, and imputes the excluded strip from the nearest
// active cell's amplitude. Runs are performed at eps and eps/2; the reported
// value comes from the eps/2 run and the difference feeds the error estimate.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "affsurf/common.hpp"
#include "affsurf/domain.hpp"

namespace affsurf {

struct QuadratureSpec {
  int grid_resolution = 256;     // cells per axis of the projection domain
  double boundary_margin = 0.005;  // eps: truncation as a fraction of the inradius
  int sphere_samples = 2048;
  double fd_step = 1e-4;  // relative FD step (times domain diameter)
  double tol_rel = 5e-3;
  void validate() const;
};

enum class ExecMode { Serial, Parallel };

// integrand value at a cell center; +inf = divergence sentinel, NaN = geometry error
using CellIntegrand = std::function<double(const Vec&)>;

struct CellGrid {
  int sdim = 1;
  Vec lo;
  std::array<int, 2> shape{1, 1};
  std::array<double, 2> step{0.0, 0.0};
  long count() const { return static_cast<long>(shape[0]) * shape[1]; }
  Vec center(long idx) const;
  double cell_area() const { return sdim == 1 ? step[0] : step[0] * step[1]; }
};

CellGrid make_grid(const SectionDomain& dom, int resolution);

struct StripParams {
  double boundary_exponent = -0.5;  // fallback local model s ~ A * m^sigma
  bool adaptive_exponent = true;    // estimate sigma per boundary cell from the data
  double eval_floor = 0.0;  // minimum margin at which the integrand may be evaluated
  int subcells = 12;        // margin subsamples per axis in layer/strip cells
};

struct RunPair {
  double value_full = 0.0;  // truncation at delta = eps * inradius
  double value_half = 0.0;  // truncation at delta / 2
  long n_evaluations = 0;
  bool diverged_full = false;
  bool diverged_half = false;
  bool geometry_error = false;
};

// Evaluates the integrand once over the union of both active sets (in
// parallel when requested; accumulation order is fixed either way) and
// assembles both truncated values.
RunPair truncated_pair(const SectionDomain& dom, int resolution, double eps,
                       const StripParams& params, const CellIntegrand& integrand,
                       ExecMode mode);

}  // namespace affsurf
