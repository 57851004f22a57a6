#include "affsurf/surface.hpp"

#include <cmath>
#include <functional>

namespace affsurf {

namespace {

constexpr double kRatioFloor = 1e-14;  // psi(0) sentinel threshold

// phi applied to the curvature ratio; conv_sentinel marks the psi branch
struct GraphIntegrand {
  const GraphPair* gp;
  std::function<double(double)> phi;
  bool conv_sentinel = false;

  double operator()(const Vec& x) const {
    double total = 0.0;
    for (const Side side : {Side::Over, Side::Under}) {
      const JetEvaluation j = gp->jet(x, side);
      const double br = support_bracket(j, x);
      if (!(br > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      const int n = gp->dim();
      const double det = det_psd_clamped(Mat(-j.hessian));
      const double ratio = det / std::pow(br, n + 1);
      if (conv_sentinel && ratio < kRatioFloor) return kInf;
      total += phi(ratio) * br;
    }
    return total;
  }
};

SurfaceResult integrate_graph(const GraphPair& gp, const std::function<double(double)>& phi,
                              bool conv_sentinel, const QuadratureSpec& q, ExecMode mode) {
  q.validate();
  const SectionDomain& dom = gp.domain();
  GraphIntegrand integrand{&gp, phi, conv_sentinel};
  StripParams params;
  params.boundary_exponent = -0.5;
  params.eval_floor = gp.eval_floor();

  const RunPair base = truncated_pair(dom, q.grid_resolution, q.boundary_margin, params,
                                      std::cref(integrand), mode);
  if (base.geometry_error) throw GeometryError("support bracket nonpositive on the active mask");
  const RunPair refined = truncated_pair(dom, 2 * q.grid_resolution, q.boundary_margin, params,
                                         std::cref(integrand), mode);
  if (refined.geometry_error) throw GeometryError("support bracket nonpositive on the active mask");

  SurfaceResult out;
  out.n_samples = base.n_evaluations + refined.n_evaluations;
  bool diverged = base.diverged_full || base.diverged_half || refined.diverged_half;

  double err = std::abs(base.value_half - base.value_full) +
               std::abs(refined.value_half - base.value_half);
  if (gp.derivative_mode() == DerivativeMode::FiniteDifference) {
    // near-boundary jets on stored grids are the dominant noise source;
    // measure the sensitivity to the evaluation floor directly
    StripParams deeper = params;
    deeper.eval_floor = 1.75 * params.eval_floor;
    const RunPair fl = truncated_pair(dom, q.grid_resolution, q.boundary_margin, deeper,
                                      std::cref(integrand), mode);
    out.n_samples += fl.n_evaluations;
    diverged = diverged || fl.diverged_half;
    err += std::abs(fl.value_half - base.value_half);
  }
  if (diverged) {
    out.value = kInf;
    out.estimated_error = kInf;
    out.diverged = true;
    return out;
  }
  out.value = base.value_half;
  out.estimated_error = err;
  return out;
}

Vec axis_direction(int dim) {
  Vec e = Vec::Zero(dim);
  e[dim - 1] = 1.0;
  return e;
}

}  // namespace

SurfaceResult affine_surface_area(const ConvexBody& body, const Generator& gen, const Vec& xi,
                                  const QuadratureSpec& q, ExecMode mode) {
  const GraphPair gp = to_graph_pair(body, xi, q);
  const bool conv = gen.class_tag() == ClassTag::Conv && gen.family() != GeneratorFamily::Constant;
  return integrate_graph(gp, [&gen](double t) { return gen.eval(t); }, conv, q, mode);
}

SurfaceResult as_p(const ConvexBody& body, double p, const QuadratureSpec& q, ExecMode mode) {
  const int n = body.dim();
  if (p == 0.0 || p <= -n) throw InputError("as_p requires p in (-n,0) or (0,inf)");
  const Generator gen = p > 0.0 ? Generator::power_conc(p, n) : Generator::power_conv(p, n);
  return affine_surface_area(body, gen, axis_direction(n), q, mode);
}

SurfaceResult as_infinity(const ConvexBody& body, const QuadratureSpec& q, ExecMode mode) {
  const GraphPair gp = to_graph_pair(body, axis_direction(body.dim()), q);
  return integrate_graph(gp, [](double t) { return t; }, false, q, mode);
}

double truncated_surface_sum(const ConvexBody& body, const Generator& gen, const Vec& xi,
                             const QuadratureSpec& q, double eps) {
  const GraphPair gp = to_graph_pair(body, xi, q);
  const bool conv = gen.class_tag() == ClassTag::Conv && gen.family() != GeneratorFamily::Constant;
  GraphIntegrand integrand{&gp, [&gen](double t) { return gen.eval(t); }, conv};
  const SectionDomain& dom = gp.domain();
  const CellGrid grid = make_grid(dom, q.grid_resolution);
  const double dcut = std::max(eps * dom.inradius(), gp.eval_floor());
  std::vector<double> terms;
  terms.reserve(grid.count());
  for (long i = 0; i < grid.count(); ++i) {
    const Vec x = grid.center(i);
    if (dom.margin(x) < dcut) continue;
    terms.push_back(integrand(x) * grid.cell_area());
  }
  return pairwise_sum(terms);
}

}  // namespace affsurf
