#include "affsurf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace affsurf {

void QuadratureSpec::validate() const {
  if (grid_resolution < 16) throw InputError("grid_resolution must be >= 16");
  if (!(boundary_margin > 0.0 && boundary_margin < 0.1))
    throw InputError("boundary_margin must lie in (0, 0.1)");
  if (sphere_samples < 8) throw InputError("sphere_samples must be >= 8");
  if (!(fd_step > 0.0)) throw InputError("fd_step must be positive");
  if (!(tol_rel > 0.0)) throw InputError("tol_rel must be positive");
}

Vec CellGrid::center(long idx) const {
  Vec x(sdim);
  if (sdim == 1) {
    x[0] = lo[0] + (idx + 0.5) * step[0];
  } else {
    const long j = idx % shape[1];
    const long i = idx / shape[1];
    x[0] = lo[0] + (i + 0.5) * step[0];
    x[1] = lo[1] + (j + 0.5) * step[1];
  }
  return x;
}

CellGrid make_grid(const SectionDomain& dom, int resolution) {
  CellGrid g;
  g.sdim = dom.sdim();
  g.lo = dom.bbox_lo();
  const Vec hi = dom.bbox_hi();
  for (int a = 0; a < g.sdim; ++a) {
    g.shape[a] = resolution;
    g.step[a] = (hi[a] - g.lo[a]) / resolution;
  }
  if (g.sdim == 1) {
    g.shape[1] = 1;
    g.step[1] = 0.0;
  }
  return g;
}

namespace {

// integral of m^sigma over a subcell where the margin spans [ma, mb] linearly,
// restricted to the m > 0 part
double power_mass(double ma, double mb, double area, double sigma) {
  if (mb < ma) std::swap(ma, mb);
  if (mb <= 0.0) return 0.0;
  const double span = mb - ma;
  const double a = std::max(ma, 0.0);
  if (span < 1e-14 * std::max(1.0, std::abs(mb))) {
    const double m = 0.5 * (a + mb);
    return m > 0.0 ? area * std::pow(m, sigma) : 0.0;
  }
  const double s1 = sigma + 1.0;
  return area * (std::pow(mb, s1) - std::pow(a, s1)) / (s1 * span);
}

// integral of m^sigma over the positive-margin part of one cell,
// via subcell corner margins
double cell_mass(const SectionDomain& dom, const CellGrid& grid, long idx, double sigma,
                 int subcells) {
  const int k = std::max(subcells, 2);
  if (grid.sdim == 1) {
    const double x0 = grid.lo[0] + (idx + 0.0) * grid.step[0];
    const double h = grid.step[0] / k;
    Vec p(1);
    double total = 0.0;
    double mprev;
    p[0] = x0;
    mprev = dom.margin(p);
    for (int a = 1; a <= k; ++a) {
      p[0] = x0 + a * h;
      const double mnext = dom.margin(p);
      total += power_mass(mprev, mnext, h, sigma);
      mprev = mnext;
    }
    return total;
  }
  const long j = idx % grid.shape[1];
  const long i = idx / grid.shape[1];
  const double x0 = grid.lo[0] + i * grid.step[0];
  const double y0 = grid.lo[1] + j * grid.step[1];
  const double hx = grid.step[0] / k, hy = grid.step[1] / k;
  std::vector<double> row(k + 1), prev(k + 1);
  Vec p(2);
  for (int b = 0; b <= k; ++b) {
    p[0] = x0;
    p[1] = y0 + b * hy;
    prev[b] = dom.margin(p);
  }
  double total = 0.0;
  for (int a = 1; a <= k; ++a) {
    for (int b = 0; b <= k; ++b) {
      p[0] = x0 + a * hx;
      p[1] = y0 + b * hy;
      row[b] = dom.margin(p);
    }
    for (int b = 0; b < k; ++b) {
      const double mmin = std::min({prev[b], prev[b + 1], row[b], row[b + 1]});
      const double mmax = std::max({prev[b], prev[b + 1], row[b], row[b + 1]});
      total += power_mass(mmin, mmax, hx * hy, sigma);
    }
    std::swap(row, prev);
  }
  return total;
}

// multi-source BFS: nearest active cell index for every cell
std::vector<long> nearest_active(const CellGrid& grid, const std::vector<char>& active) {
  const long n = grid.count();
  std::vector<long> near(n, -1);
  std::deque<long> queue;
  for (long i = 0; i < n; ++i)
    if (active[i]) {
      near[i] = i;
      queue.push_back(i);
    }
  const long ny = grid.shape[1];
  auto push = [&](long from, long to) {
    if (to >= 0 && to < n && near[to] < 0) {
      near[to] = near[from];
      queue.push_back(to);
    }
  };
  while (!queue.empty()) {
    const long c = queue.front();
    queue.pop_front();
    if (grid.sdim == 1) {
      push(c, c - 1);
      push(c, c + 1);
    } else {
      const long j = c % ny;
      if (j > 0) push(c, c - 1);
      if (j + 1 < ny) push(c, c + 1);
      push(c, c - ny);
      push(c, c + ny);
    }
  }
  return near;
}

// grid index of the cell containing x, or -1
long cell_index_at(const CellGrid& grid, const Vec& x) {
  const long i = static_cast<long>(std::floor((x[0] - grid.lo[0]) / grid.step[0]));
  if (i < 0 || i >= grid.shape[0]) return -1;
  if (grid.sdim == 1) return i;
  const long j = static_cast<long>(std::floor((x[1] - grid.lo[1]) / grid.step[1]));
  if (j < 0 || j >= grid.shape[1]) return -1;
  return i * grid.shape[1] + j;
}

// Local boundary exponent of an active cell: compare its value against a
// reference cell deeper along the margin gradient. Flat boundary pieces
// (curvature -> 0) steepen or soften the m^sigma law, so sigma is measured
// rather than assumed.
double estimate_sigma(const SectionDomain& dom, const CellGrid& grid,
                      const std::vector<double>& margins, const std::vector<double>& values,
                      const std::vector<char>& active, long j, double fallback) {
  const double vj = values[j];
  if (!(vj > 0.0) || std::isinf(vj)) return fallback;
  const Vec xj = grid.center(j);
  const double h = std::max(grid.step[0], grid.step[1]);
  Vec g(grid.sdim);
  for (int a = 0; a < grid.sdim; ++a) {
    Vec xp = xj, xm = xj;
    xp[a] += 0.5 * h;
    xm[a] -= 0.5 * h;
    g[a] = dom.margin(xp) - dom.margin(xm);
  }
  const double gn = g.norm();
  if (gn < 1e-14) return fallback;
  g /= gn;
  double t = std::max(1.5 * h, 0.75 * margins[j]);
  for (int attempt = 0; attempt < 4; ++attempt) {
    const long p = cell_index_at(grid, Vec(xj + t * g));
    if (p >= 0 && active[p] && margins[p] >= 1.25 * margins[j]) {
      const double vp = values[p];
      if (vp > 0.0 && !std::isinf(vp)) {
        const double sigma = std::log(vj / vp) / std::log(margins[j] / margins[p]);
        return std::clamp(sigma, -0.95, 1.4);
      }
    }
    t *= 1.6;
  }
  return fallback;
}

struct Assembled {
  double value = 0.0;
  bool diverged = false;
};

Assembled assemble(const SectionDomain& dom, const CellGrid& grid,
                   const std::vector<double>& margins, const std::vector<double>& values,
                   double dcut, const StripParams& params) {
  const long n = grid.count();
  const double maxstep = std::max(grid.step[0], grid.step[1]);
  const double layer_bound = std::max(4.0 * dcut, 6.0 * maxstep);
  std::vector<char> active(n, 0);
  for (long i = 0; i < n; ++i) active[i] = margins[i] >= dcut ? 1 : 0;
  const auto near = nearest_active(grid, active);
  auto sigma_of = [&](long j) {
    if (!params.adaptive_exponent) return params.boundary_exponent;
    return estimate_sigma(dom, grid, margins, values, active, j, params.boundary_exponent);
  };
  std::vector<double> contrib(n, 0.0);
  Assembled out;
  for (long i = 0; i < n; ++i) {
    if (active[i]) {
      const double v = values[i];
      if (std::isinf(v)) {
        out.diverged = true;
        continue;
      }
      if (margins[i] >= layer_bound) {
        contrib[i] = v * grid.cell_area();
      } else {
        const double sigma = sigma_of(i);
        const double mass = cell_mass(dom, grid, i, sigma, params.subcells);
        contrib[i] = v * std::pow(margins[i], -sigma) * mass;
      }
    } else if (margins[i] > -2.0 * maxstep) {  // strip cell, possibly partially inside
      if (near[i] < 0) continue;
      const double v = values[near[i]];
      if (std::isinf(v)) {
        out.diverged = true;
        continue;
      }
      const double sigma = sigma_of(near[i]);
      const double mass = cell_mass(dom, grid, i, sigma, params.subcells);
      if (mass > 0.0) contrib[i] = v * std::pow(margins[near[i]], -sigma) * mass;
    }
  }
  out.value = pairwise_sum(contrib);
  return out;
}

}  // namespace

namespace {

// 1D domains: margins are exact, so the boundary bands are integrated by
// log-spaced segments keyed to absolute margin values (shared between the
// eps and eps/2 runs), and the sub-cutoff tail uses a drift-extrapolated
// power law fitted to the deepest segments.
RunPair truncated_pair_1d(const SectionDomain& dom, int resolution, double eps,
                          const StripParams& params, const CellIntegrand& integrand,
                          ExecMode mode) {
  const CellGrid grid = make_grid(dom, resolution);
  const long n = grid.count();
  const double dx = grid.step[0];
  const double lo = dom.bbox_lo()[0], hi = dom.bbox_hi()[0];
  const double delta = eps * dom.inradius();
  const double dcut_full = std::max(delta, params.eval_floor);
  const double dcut_half = std::max(0.5 * delta, params.eval_floor);
  const double layer = std::max(4.0 * dcut_full, 6.0 * dx);

  std::vector<double> margins(n);
  for (long i = 0; i < n; ++i) margins[i] = dom.margin(grid.center(i));

  // core cells, bulk-evaluated
  std::vector<long> core;
  for (long i = 0; i < n; ++i)
    if (margins[i] >= layer) core.push_back(i);
  std::vector<double> core_vals(core.size());
  const long m = static_cast<long>(core.size());
  if (mode == ExecMode::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long k = 0; k < m; ++k) core_vals[k] = integrand(grid.center(core[k]));
  } else {
    for (long k = 0; k < m; ++k) core_vals[k] = integrand(grid.center(core[k]));
  }

  RunPair out;
  out.n_evaluations = m;
  for (long k = 0; k < m; ++k)
    if (std::isnan(core_vals[k])) {
      out.geometry_error = true;
      return out;
    }

  // band edges: margin of the inner edge of the outermost core cell per side
  double edge_left = dom.inradius(), edge_right = dom.inradius();
  if (!core.empty()) {
    edge_left = (grid.center(core.front())[0] - 0.5 * dx) - lo;
    edge_right = hi - (grid.center(core.back())[0] + 0.5 * dx);
  }

  struct Seg {
    double m_hi, m_lo;
    double mg1, mg2;  // two-point Gauss margins, mg1 > mg2
    double v1, v2;
  };
  constexpr double kRatio = 0.72;
  constexpr double kGauss = 0.28867513459481287;  // 1/(2 sqrt(3))
  bool nan_flag = false;
  auto eval_at = [&](bool left_side, double margin, bool* flag) {
    Vec x(1);
    x[0] = left_side ? lo + margin : hi - margin;
    const double v = integrand(x);
    ++out.n_evaluations;
    if (std::isnan(v)) *flag = true;
    return v;
  };
  auto build_ladder = [&](bool left_side, double edge) {
    std::vector<Seg> segs;
    double mh = edge;
    while (mh > dcut_half && segs.size() < 200) {
      const double ml = std::max(mh * kRatio, dcut_half);
      Seg s;
      s.m_hi = mh;
      s.m_lo = ml;
      const double w = mh - ml, mid = 0.5 * (mh + ml);
      s.mg1 = mid + kGauss * w;
      s.mg2 = mid - kGauss * w;
      s.v1 = eval_at(left_side, s.mg1, &nan_flag);
      s.v2 = eval_at(left_side, s.mg2, &nan_flag);
      segs.push_back(s);
      mh = ml;
    }
    return segs;
  };
  const auto segs_left = build_ladder(true, edge_left);
  const auto segs_right = build_ladder(false, edge_right);
  if (nan_flag) {
    out.geometry_error = true;
    return out;
  }

  auto assemble_run = [&](bool left_side, double dcut, bool* diverged) {
    const auto& segs = left_side ? segs_left : segs_right;
    std::vector<double> contrib;
    contrib.reserve(segs.size() + 2);
    std::vector<std::pair<double, double>> nodes;  // (margin, value), deepest last
    for (const auto& s : segs) {
      if (std::isinf(s.v1) || std::isinf(s.v2)) {
        *diverged = true;
        continue;
      }
      if (s.m_lo >= dcut) {
        contrib.push_back(0.5 * (s.m_hi - s.m_lo) * (s.v1 + s.v2));
        nodes.emplace_back(s.mg1, s.v1);
        nodes.emplace_back(s.mg2, s.v2);
      } else if (s.m_hi > dcut) {  // straddles the cutoff: integrate the upper part
        const double w = s.m_hi - dcut, mid = 0.5 * (s.m_hi + dcut);
        bool flag = false;
        const double c1 = eval_at(left_side, mid + kGauss * w, &flag);
        const double c2 = eval_at(left_side, mid - kGauss * w, &flag);
        if (flag || std::isinf(c1) || std::isinf(c2)) {
          *diverged = *diverged || std::isinf(c1) || std::isinf(c2);
          continue;
        }
        contrib.push_back(0.5 * w * (c1 + c2));
        nodes.emplace_back(mid + kGauss * w, c1);
        nodes.emplace_back(mid - kGauss * w, c2);
      }
    }
    // sub-cutoff tail: power law fitted to the deepest nodes, with the
    // exponent drift extrapolated to the boundary
    double sigma = params.boundary_exponent;
    double tail = 0.0;
    if (nodes.size() >= 2) {
      const auto& p1 = nodes[nodes.size() - 1];
      const auto& p2 = nodes[nodes.size() - 2];
      if (p1.second > 0.0 && p2.second > 0.0 && p1.first < p2.first) {
        const double s12 = std::log(p1.second / p2.second) / std::log(p1.first / p2.first);
        sigma = s12;
        if (nodes.size() >= 4) {
          const auto& p3 = nodes[nodes.size() - 3];
          const auto& p4 = nodes[nodes.size() - 4];
          if (p3.second > 0.0 && p4.second > 0.0 && p3.first < p4.first) {
            const double s34 = std::log(p3.second / p4.second) / std::log(p3.first / p4.first);
            const double m12 = std::sqrt(p1.first * p2.first);
            const double m34 = std::sqrt(p3.first * p4.first);
            if (std::abs(s34 - s12) < 0.3 && m34 > m12)
              sigma = s12 - (s34 - s12) * m12 / (m34 - m12);
          }
        }
        sigma = std::clamp(sigma, -0.95, 1.4);
        tail = p1.second * std::pow(p1.first, -sigma) * std::pow(dcut, 1.0 + sigma) /
               (1.0 + sigma);
      }
    }
    contrib.push_back(tail);
    return pairwise_sum(contrib);
  };
  auto run_value = [&](double dcut, bool* diverged) {
    std::vector<double> parts;
    parts.reserve(core.size() + 2);
    for (long k = 0; k < m; ++k) {
      if (std::isinf(core_vals[k])) {
        *diverged = true;
        continue;
      }
      parts.push_back(core_vals[k] * dx);
    }
    parts.push_back(assemble_run(true, dcut, diverged));
    parts.push_back(assemble_run(false, dcut, diverged));
    return pairwise_sum(parts);
  };
  out.value_full = run_value(dcut_full, &out.diverged_full);
  out.value_half = run_value(dcut_half, &out.diverged_half);
  return out;
}

}  // namespace

RunPair truncated_pair(const SectionDomain& dom, int resolution, double eps,
                       const StripParams& params, const CellIntegrand& integrand,
                       ExecMode mode) {
  if (dom.sdim() == 1) return truncated_pair_1d(dom, resolution, eps, params, integrand, mode);
  const CellGrid grid = make_grid(dom, resolution);
  const long n = grid.count();
  std::vector<double> margins(n);
  for (long i = 0; i < n; ++i) margins[i] = dom.margin(grid.center(i));

  const double delta = eps * dom.inradius();
  const double dcut_full = std::max(delta, params.eval_floor);
  const double dcut_half = std::max(0.5 * delta, params.eval_floor);

  // evaluate once over the union of active sets (the half-cut set)
  std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<long> eval_idx;
  eval_idx.reserve(n);
  for (long i = 0; i < n; ++i)
    if (margins[i] >= dcut_half) eval_idx.push_back(i);

  const long m = static_cast<long>(eval_idx.size());
  if (mode == ExecMode::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long k = 0; k < m; ++k) values[eval_idx[k]] = integrand(grid.center(eval_idx[k]));
  } else {
    for (long k = 0; k < m; ++k) values[eval_idx[k]] = integrand(grid.center(eval_idx[k]));
  }

  RunPair out;
  out.n_evaluations = m;
  for (long k = 0; k < m; ++k) {
    if (std::isnan(values[eval_idx[k]])) {
      out.geometry_error = true;
      return out;
    }
  }
  const Assembled full = assemble(dom, grid, margins, values, dcut_full, params);
  const Assembled half = assemble(dom, grid, margins, values, dcut_half, params);
  out.value_full = full.value;
  out.value_half = half.value;
  out.diverged_full = full.diverged;
  out.diverged_half = half.diverged;
  return out;
}

}  // namespace affsurf
