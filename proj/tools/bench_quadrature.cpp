// Compares the OpenMP quadrature kernel against the serial reference and
// checks that both produce bit-identical values.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "affsurf/explab.hpp"

using namespace affsurf;
using clock_type = std::chrono::steady_clock;

namespace {

double run_case(const ConvexBody& body, const Generator& gen, const QuadratureSpec& q,
                ExecMode mode, double* value) {
  Vec en = Vec::Zero(body.dim());
  en[body.dim() - 1] = 1.0;
  const auto t0 = clock_type::now();
  const SurfaceResult r = affine_surface_area(body, gen, en, q, mode);
  const auto t1 = clock_type::now();
  *value = r.value;
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; parallel mode falls back to serial\n");
#endif
  struct Case {
    const char* name;
    ConvexBody body;
    int dim;
    int resolution;
  };
  Mat e3 = Mat::Identity(3, 3);
  e3(0, 0) = 2.0;
  e3(2, 2) = 0.5;
  std::vector<Case> cases;
  cases.push_back({"pnorm_q3 n=2 res 4096", ConvexBody::pnorm_ball(2, 3.0, Vec::Ones(2)), 2, 4096});
  cases.push_back({"perturbed n=2 res 4096", ConvexBody::perturbed_ball(2, 1.0, 0.05, 3), 2, 4096});
  cases.push_back({"ellipsoid n=3 res 128", ConvexBody::ellipsoid(e3), 3, 128});
  cases.push_back({"pnorm_q3 n=3 res 96", ConvexBody::pnorm_ball(3, 3.0, Vec::Ones(3)), 3, 96});

  std::printf("%-26s %12s %12s %9s %s\n", "case", "serial ms", "parallel ms", "speedup",
              "bit-identical");
  for (const auto& c : cases) {
    QuadratureSpec q;
    q.grid_resolution = c.resolution;
    q.boundary_margin = 0.01;
    const Generator gen = Generator::power_conc(0.5, c.dim);
    double vs = 0.0, vp = 0.0;
    const double ts = run_case(c.body, gen, q, ExecMode::Serial, &vs);
    const double tp = run_case(c.body, gen, q, ExecMode::Parallel, &vp);
    std::printf("%-26s %12.1f %12.1f %8.2fx %s\n", c.name, ts, tp, ts / tp,
                vs == vp ? "yes" : "NO");
  }
  return 0;
}
