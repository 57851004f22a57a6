// Overgraph/undergraph access for a convex body in a rotated frame.
#pragma once

#include <functional>
#include <memory>

#include "affsurf/domain.hpp"
#include "affsurf/jets.hpp"
#include "affsurf/quadrature.hpp"

namespace affsurf {

enum class Side { Over, Under };

// One body+frame section: f(x) = max{t : (x,t) in RK}, g(x) = -min{t : ...}.
class SectionBackend {
 public:
  virtual ~SectionBackend() = default;
  virtual int dim() const = 0;  // ambient n
  virtual const SectionDomain& domain() const = 0;
  virtual double f(const Vec& x) const = 0;
  virtual double g(const Vec& x) const = 0;
  virtual bool analytic() const = 0;
  // analytic jets; only called when analytic() is true
  virtual JetEvaluation jet(const Vec& x, Side side) const;
  // minimum margin at which evaluation is trustworthy
  virtual double eval_floor() const { return 0.0; }
};

class GraphPair {
 public:
  GraphPair(std::shared_ptr<const SectionBackend> backend, Mat frame, double fd_step_rel);

  int dim() const;
  const Mat& frame() const { return frame_; }
  const SectionDomain& domain() const;
  DerivativeMode derivative_mode() const;
  double eval_floor() const;
  double fd_step_abs() const { return fd_abs_; }

  double f(const Vec& x) const;
  double g(const Vec& x) const;
  JetEvaluation jet(const Vec& x, Side side) const;
  // forced finite differences (5-point gradients, nested central Hessian)
  JetEvaluation jet_fd(const Vec& x, Side side, double step_abs) const;

 private:
  std::shared_ptr<const SectionBackend> backend_;
  Mat frame_;
  double fd_abs_;
};

// --- section factories (used by body implementations) ---

// ellipsoid M*B^n + c in the rotated frame (M = R*A, c' = R*c)
std::unique_ptr<SectionBackend> make_ellipsoid_section(const Mat& rotated_map,
                                                       const Vec& rotated_center);

struct LevelSetFn {  // smooth convex membership: {z : value(z) <= level}
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  double level = 0.0;
};

std::unique_ptr<SectionBackend> make_levelset_section(const Mat& rotation, LevelSetFn fn,
                                                      double t_bound,
                                                      std::shared_ptr<const SectionDomain> dom);

// Steiner symmetral along the section frame: f = g = (f_parent + g_parent)/2
std::unique_ptr<SectionBackend> make_average_section(std::shared_ptr<const SectionBackend> parent);

// generic fallback: bisection on a membership test along frame-vertical lines
std::unique_ptr<SectionBackend> make_membership_section(
    const Mat& rotation, std::function<bool(const Vec&)> world_member, double t_bound,
    std::shared_ptr<const SectionDomain> dom, double eval_floor);

// stored 1D grid (n = 2): nodes are [lo, centers..., hi]
class ChordInterp1D;
std::unique_ptr<SectionBackend> make_grid1_section(std::shared_ptr<const ChordInterp1D> interp);

// stored 2D grid (n = 3)
class ChordInterp2D;
std::unique_ptr<SectionBackend> make_grid2_section(std::shared_ptr<const ChordInterp2D> interp,
                                                   std::shared_ptr<const SectionDomain> dom);

// Interpolants for grid bodies: midcurve (f-g)/2 and squared chord (f+g)^2 are
// the stored fields; the chord-square transform keeps the sqrt boundary
// behavior representable.
class ChordInterp1D {
 public:
  ChordInterp1D(double lo, double hi, Vec f_nodes, Vec g_nodes);
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int cells() const { return static_cast<int>(f_.size()) - 2; }
  double cell_width() const { return dx_; }
  const Vec& f_nodes() const { return f_; }
  const Vec& g_nodes() const { return g_; }
  double f(double x) const { return mid_at(x) + 0.5 * chord(x); }
  double g(double x) const { return -mid_at(x) + 0.5 * chord(x); }
  double chord(double x) const { return std::sqrt(std::max(c2_at(x), 0.0)); }

 private:
  double mid_at(double x) const;
  double c2_at(double x) const;
  double interp(const Vec& v, double x) const;
  double lo_, hi_, dx_;
  Vec f_, g_, mid_, c2_;
};

class ChordInterp2D {
 public:
  ChordInterp2D(Vec lo, Vec hi, int nx, int ny, Vec f_cells, Vec g_cells,
                std::vector<char> mask);
  const Vec& bbox_lo() const { return lo_; }
  const Vec& bbox_hi() const { return hi_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Vec& f_cells() const { return f_; }
  const Vec& g_cells() const { return g_; }
  const std::vector<char>& mask() const { return mask_; }
  double cell_step() const { return std::max(dx_, dy_); }
  double f(const Vec& x) const { return mid_at(x) + 0.5 * chord(x); }
  double g(const Vec& x) const { return -mid_at(x) + 0.5 * chord(x); }
  double chord(const Vec& x) const { return std::sqrt(std::max(c2_at(x), 0.0)); }

 private:
  double mid_at(const Vec& x) const;
  double c2_at(const Vec& x) const;
  double interp(const Vec& v, const Vec& x) const;
  Vec lo_, hi_;
  int nx_, ny_;
  double dx_, dy_;
  Vec f_, g_, mid_, c2_;
  std::vector<char> mask_;
};

}  // namespace affsurf
