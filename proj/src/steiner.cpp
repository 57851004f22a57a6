#include "affsurf/steiner.hpp"

#include <cmath>

#include "affsurf/rng.hpp"
#include "affsurf/sphere.hpp"

namespace affsurf {

namespace {

ConvexBody materialize_1d(const GraphPair& gp, int resolution) {
  const auto& dom = gp.domain();
  const double lo = dom.bbox_lo()[0], hi = dom.bbox_hi()[0];
  const int n = resolution;
  const double dx = (hi - lo) / n;
  Vec h(n + 2);
  h[0] = 0.0;
  h[n + 1] = 0.0;
  Vec x(1);
  for (int i = 0; i < n; ++i) {
    x[0] = lo + (i + 0.5) * dx;
    double v = 0.0;
    if (dom.margin(x) > 0.0) {
      const double half = 0.5 * (gp.f(x) + gp.g(x));
      if (std::isfinite(half)) v = std::max(half, 0.0);
    }
    h[i + 1] = v;
  }
  return ConvexBody::graph_body_1d(gp.frame(), lo, hi, h, h);
}

ConvexBody materialize_2d(const GraphPair& gp, int resolution) {
  const auto& dom = gp.domain();
  const Vec lo = dom.bbox_lo(), hi = dom.bbox_hi();
  const int nx = resolution, ny = resolution;
  const double dx = (hi[0] - lo[0]) / nx, dy = (hi[1] - lo[1]) / ny;
  Vec h(static_cast<long>(nx) * ny);
  std::vector<char> mask(static_cast<std::size_t>(nx) * ny, 0);
  Vec x(2);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const long idx = static_cast<long>(i) * ny + j;
      x[0] = lo[0] + (i + 0.5) * dx;
      x[1] = lo[1] + (j + 0.5) * dy;
      double v = 0.0;
      char m = 0;
      if (dom.margin(x) > 0.0) {
        const double half = 0.5 * (gp.f(x) + gp.g(x));
        if (std::isfinite(half) && half >= 0.0) {
          v = half;
          m = 1;
        }
      }
      h[idx] = v;
      mask[idx] = m;
    }
  }
  return ConvexBody::graph_body_2d(gp.frame(), lo, hi, nx, ny, h, h, std::move(mask));
}

}  // namespace

ConvexBody materialize_symmetral(const ConvexBody& body, const Vec& xi, const QuadratureSpec& q) {
  const GraphPair gp = to_graph_pair(body, xi, q);
  return body.dim() == 2 ? materialize_1d(gp, q.grid_resolution)
                         : materialize_2d(gp, q.grid_resolution);
}

ConvexBody steiner_symmetral(const ConvexBody& body, const Vec& xi, const QuadratureSpec& q) {
  if (body.analytic_jets()) return ConvexBody::symmetral(body, xi);
  return materialize_symmetral(body, xi, q);
}

double midpoint_planarity(const ConvexBody& body, const Vec& xi, const QuadratureSpec& q) {
  const GraphPair gp = to_graph_pair(body, xi, q);
  const auto& dom = gp.domain();
  const CellGrid grid = make_grid(dom, q.grid_resolution);
  const double dcut = std::max(q.boundary_margin * dom.inradius(), gp.eval_floor());
  std::vector<Vec> xs;
  std::vector<double> ms;
  for (long i = 0; i < grid.count(); ++i) {
    const Vec x = grid.center(i);
    if (dom.margin(x) < dcut) continue;
    const double mid = 0.5 * (gp.f(x) - gp.g(x));
    if (!std::isfinite(mid)) continue;
    xs.push_back(x);
    ms.push_back(mid);
  }
  const int sd = dom.sdim();
  if (static_cast<int>(xs.size()) < body.dim())
    throw InputError("midpoint_planarity: fewer than n sample points");
  Mat a(xs.size(), sd + 1);
  Vec b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (int k = 0; k < sd; ++k) a(i, k) = xs[i][k];
    a(i, sd) = 1.0;
    b[i] = ms[i];
  }
  const Vec coef = a.colPivHouseholderQr().solve(b);
  return (a * coef - b).cwiseAbs().maxCoeff();
}

SymmetrizationTrace successive_symmetrization(const ConvexBody& body, int n_steps,
                                              std::uint64_t seed,
                                              const std::vector<Generator>& gens,
                                              const QuadratureSpec& q, ExecMode mode,
                                              const std::string& body_id) {
  if (n_steps < 1) throw InputError("successive_symmetrization: n_steps must be >= 1");
  q.validate();
  const int n = body.dim();
  SymmetrizationTrace trace;
  trace.seed = seed;
  trace.body_id = body_id;
  trace.initial_volume = body.volume(q);
  trace.bk_radius = std::pow(trace.initial_volume / unit_ball_volume(n), 1.0 / n);
  for (const auto& g : gens) trace.generator_names.push_back(g.name());
  const ConvexBody bk = ConvexBody::ball(n, trace.bk_radius);

  SeededRng rng(seed);
  ConvexBody current = body;
  for (int k = 1; k <= n_steps; ++k) {
    Vec xi;
    if (k % 5 == 0) {
      xi = Vec::Zero(n);
      xi[((k / 5) - 1) % n] = 1.0;
    } else {
      xi = rng.unit_vector(n);
    }
    current = (k == 1) ? steiner_symmetral(current, xi, q) : materialize_symmetral(current, xi, q);
    TraceStep step;
    step.index = k;
    step.xi = xi;
    step.hausdorff_to_bk = hausdorff_distance(current, bk, q);
    step.volume = current.volume(q);
    for (const auto& g : gens) step.surface_values.push_back(affine_surface_area(current, g, xi, q, mode));
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace affsurf
