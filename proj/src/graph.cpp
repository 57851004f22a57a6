#include "affsurf/graph.hpp"

#include <algorithm>
#include <cmath>

namespace affsurf {

JetEvaluation SectionBackend::jet(const Vec&, Side) const {
  throw std::logic_error("analytic jet requested from a non-analytic section");
}

// ---------------------------------------------------------------- GraphPair

GraphPair::GraphPair(std::shared_ptr<const SectionBackend> backend, Mat frame, double fd_step_rel)
    : backend_(std::move(backend)), frame_(std::move(frame)) {
  const Vec diag = backend_->domain().bbox_hi() - backend_->domain().bbox_lo();
  fd_abs_ = fd_step_rel * diag.norm();
}

int GraphPair::dim() const { return backend_->dim(); }
const SectionDomain& GraphPair::domain() const { return backend_->domain(); }
double GraphPair::f(const Vec& x) const { return backend_->f(x); }
double GraphPair::g(const Vec& x) const { return backend_->g(x); }

DerivativeMode GraphPair::derivative_mode() const {
  return backend_->analytic() ? DerivativeMode::Analytic : DerivativeMode::FiniteDifference;
}

double GraphPair::eval_floor() const {
  return std::max(backend_->eval_floor(), 3.0 * fd_abs_);
}

JetEvaluation GraphPair::jet(const Vec& x, Side side) const {
  if (backend_->analytic()) return backend_->jet(x, side);
  return jet_fd(x, side, fd_abs_);
}

JetEvaluation GraphPair::jet_fd(const Vec& x, Side side, double h) const {
  const int s = static_cast<int>(x.size());
  auto F = [&](const Vec& p) { return side == Side::Over ? backend_->f(p) : backend_->g(p); };
  JetEvaluation out;
  out.mode = DerivativeMode::FiniteDifference;
  out.value = F(x);
  out.gradient = Vec(s);
  out.hessian = Mat(s, s);
  Vec p = x;
  for (int i = 0; i < s; ++i) {
    const double xi = x[i];
    p[i] = xi + 2 * h;
    const double f2p = F(p);
    p[i] = xi + h;
    const double f1p = F(p);
    p[i] = xi - h;
    const double f1m = F(p);
    p[i] = xi - 2 * h;
    const double f2m = F(p);
    p[i] = xi;
    out.gradient[i] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
    out.hessian(i, i) = (f1p - 2.0 * out.value + f1m) / (h * h);
  }
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      Vec pp = x;
      pp[i] += h;
      pp[j] += h;
      const double fpp = F(pp);
      pp[j] -= 2 * h;
      const double fpm = F(pp);
      pp[i] -= 2 * h;
      const double fmm = F(pp);
      pp[j] += 2 * h;
      const double fmp = F(pp);
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      out.hessian(i, j) = v;
      out.hessian(j, i) = v;
    }
  }
  out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
  return out;
}

// ------------------------------------------------------- ellipsoid sections

namespace {

class EllipsoidSection final : public SectionBackend {
 public:
  EllipsoidSection(const Mat& rotated_map, const Vec& rotated_center)
      : n_(static_cast<int>(rotated_center.size())), c_(rotated_center) {
    const Mat q = (rotated_map * rotated_map.transpose()).inverse();
    const int s = n_ - 1;
    q11_ = q.topLeftCorner(s, s);
    qv_ = q.topRightCorner(s, 1);
    qnn_ = q(s, s);
    qt_ = q11_ - qv_ * qv_.transpose() / qnn_;
    const Vec cp = c_.head(s);
    if (s == 1) {
      const double w = 1.0 / std::sqrt(qt_(0, 0));
      dom_ = std::make_shared<IntervalDomain>(cp[0] - w, cp[0] + w);
    } else {
      dom_ = std::make_shared<EllipseDomain>(cp, qt_);
    }
    scale_ = (dom_->bbox_hi() - dom_->bbox_lo()).norm();
  }
  int dim() const override { return n_; }
  const SectionDomain& domain() const override { return *dom_; }
  bool analytic() const override { return true; }
  double eval_floor() const override { return 1e-12 * scale_; }

  double f(const Vec& x) const override { return value(x, Side::Over); }
  double g(const Vec& x) const override { return value(x, Side::Under); }

  JetEvaluation jet(const Vec& x, Side side) const override {
    const int s = n_ - 1;
    const Vec u = x - c_.head(s);
    const double qu = qv_.col(0).dot(u);
    const double d = qu * qu - qnn_ * (u.dot(q11_ * u) - 1.0);
    const double sd = std::sqrt(std::max(d, 1e-300));
    const Vec m = qv_ * qu - qnn_ * (q11_ * u);
    const Mat dm = qv_ * qv_.transpose() - qnn_ * q11_;
    const Mat d2sqrt = dm / sd - m * m.transpose() / (sd * sd * sd);
    JetEvaluation out;
    out.mode = DerivativeMode::Analytic;
    out.hessian = d2sqrt / qnn_;  // d^2 f = d^2 g for ellipsoids
    if (side == Side::Over) {
      out.value = c_[s] + (-qu + sd) / qnn_;
      out.gradient = (-qv_.col(0) + m / sd) / qnn_;
    } else {
      out.value = -c_[s] + (qu + sd) / qnn_;
      out.gradient = (qv_.col(0) + m / sd) / qnn_;
    }
    return out;
  }

 private:
  double value(const Vec& x, Side side) const {
    const int s = n_ - 1;
    const Vec u = x - c_.head(s);
    const double qu = qv_.col(0).dot(u);
    const double d = qu * qu - qnn_ * (u.dot(q11_ * u) - 1.0);
    const double sd = std::sqrt(std::max(d, 0.0));
    if (side == Side::Over) return c_[s] + (-qu + sd) / qnn_;
    return -c_[s] + (qu + sd) / qnn_;
  }

  int n_;
  Vec c_;
  Mat q11_, qt_;
  Eigen::MatrixXd qv_;
  double qnn_ = 1.0;
  std::shared_ptr<const SectionDomain> dom_;
  double scale_ = 1.0;
};

// ------------------------------------------------------- level-set sections

class LevelSetSection final : public SectionBackend {
 public:
  LevelSetSection(const Mat& rotation, LevelSetFn fn, double t_bound,
                  std::shared_ptr<const SectionDomain> dom)
      : n_(static_cast<int>(rotation.rows())),
        rt_(rotation.transpose()),
        r_(rotation),
        fn_(std::move(fn)),
        tb_(t_bound),
        dom_(std::move(dom)) {}

  int dim() const override { return n_; }
  const SectionDomain& domain() const override { return *dom_; }
  bool analytic() const override { return true; }
  double eval_floor() const override { return 1e-10 * tb_; }

  double f(const Vec& x) const override { return roots(x).second; }
  double g(const Vec& x) const override { return -roots(x).first; }

  JetEvaluation jet(const Vec& x, Side side) const override {
    const auto [tlo, thi] = roots(x);
    const double t = side == Side::Over ? thi : tlo;
    const int s = n_ - 1;
    Vec zeta(n_);
    zeta.head(s) = x;
    zeta[s] = t;
    const Vec z = rt_ * zeta;
    const Vec gw = r_ * fn_.grad(z);
    const Mat hw = r_ * fn_.hess(z) * rt_;
    const Vec gx = gw.head(s);
    const double gt = gw[s];
    const Mat hxx = hw.topLeftCorner(s, s);
    const Vec hxt = hw.topRightCorner(s, 1).col(0);
    const double htt = hw(s, s);
    const Vec grad = -gx / gt;
    Mat hess = -(hxx + hxt * grad.transpose() + grad * hxt.transpose() +
                 htt * grad * grad.transpose()) / gt;
    hess = 0.5 * (hess + hess.transpose()).eval();
    JetEvaluation out;
    out.mode = DerivativeMode::Analytic;
    if (side == Side::Over) {
      out.value = t;
      out.gradient = grad;
      out.hessian = hess;
    } else {  // g = -lower graph
      out.value = -t;
      out.gradient = -grad;
      out.hessian = -hess;
    }
    return out;
  }

 private:
  double phi_line(const Vec& x, double t) const {
    Vec zeta(n_);
    zeta.head(n_ - 1) = x;
    zeta[n_ - 1] = t;
    return fn_.value(rt_ * zeta) - fn_.level;
  }
  double dphi_line(const Vec& x, double t) const {
    Vec zeta(n_);
    zeta.head(n_ - 1) = x;
    zeta[n_ - 1] = t;
    return (r_ * fn_.grad(rt_ * zeta))[n_ - 1];
  }

  std::pair<double, double> roots(const Vec& x) const {
    // convex along the line: ternary search locates an interior point
    double a = -tb_, b = tb_;
    for (int it = 0; it < 90; ++it) {
      const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (phi_line(x, m1) < phi_line(x, m2))
        b = m2;
      else
        a = m1;
    }
    const double tmid = 0.5 * (a + b);
    if (!(phi_line(x, tmid) < 0.0))
      return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    auto bisect = [&](double inside, double outside) {
      for (int it = 0; it < 90; ++it) {
        const double m = 0.5 * (inside + outside);
        if (phi_line(x, m) <= 0.0)
          inside = m;
        else
          outside = m;
      }
      double t = inside;
      for (int it = 0; it < 3; ++it) {  // Newton polish
        const double dp = dphi_line(x, t);
        if (std::abs(dp) < 1e-300) break;
        const double step = phi_line(x, t) / dp;
        const double tn = t - step;
        if (tn > std::min(inside, outside) && tn < std::max(inside, outside)) t = tn;
      }
      return t;
    };
    return {bisect(tmid, -tb_), bisect(tmid, tb_)};
  }

  int n_;
  Mat rt_, r_;
  LevelSetFn fn_;
  double tb_;
  std::shared_ptr<const SectionDomain> dom_;
};

// --------------------------------------------------------- average section

class AverageSection final : public SectionBackend {
 public:
  explicit AverageSection(std::shared_ptr<const SectionBackend> parent)
      : parent_(std::move(parent)) {}
  int dim() const override { return parent_->dim(); }
  const SectionDomain& domain() const override { return parent_->domain(); }
  bool analytic() const override { return parent_->analytic(); }
  double eval_floor() const override { return parent_->eval_floor(); }
  double f(const Vec& x) const override { return 0.5 * (parent_->f(x) + parent_->g(x)); }
  double g(const Vec& x) const override { return f(x); }
  JetEvaluation jet(const Vec& x, Side) const override {
    const JetEvaluation jf = parent_->jet(x, Side::Over);
    const JetEvaluation jg = parent_->jet(x, Side::Under);
    JetEvaluation out;
    out.mode = jf.mode;
    out.value = 0.5 * (jf.value + jg.value);
    out.gradient = 0.5 * (jf.gradient + jg.gradient);
    out.hessian = 0.5 * (jf.hessian + jg.hessian);
    return out;
  }

 private:
  std::shared_ptr<const SectionBackend> parent_;
};

// ------------------------------------------------------ membership section

class MembershipSection final : public SectionBackend {
 public:
  MembershipSection(const Mat& rotation, std::function<bool(const Vec&)> member, double t_bound,
                    std::shared_ptr<const SectionDomain> dom, double eval_floor)
      : n_(static_cast<int>(rotation.rows())),
        rt_(rotation.transpose()),
        member_(std::move(member)),
        tb_(t_bound),
        dom_(std::move(dom)),
        floor_(eval_floor) {}

  int dim() const override { return n_; }
  const SectionDomain& domain() const override { return *dom_; }
  bool analytic() const override { return false; }
  double eval_floor() const override { return floor_; }
  double f(const Vec& x) const override { return chord_ends(x).second; }
  double g(const Vec& x) const override { return -chord_ends(x).first; }

 private:
  bool inside(const Vec& x, double t) const {
    Vec zeta(n_);
    zeta.head(n_ - 1) = x;
    zeta[n_ - 1] = t;
    return member_(rt_ * zeta);
  }

  std::pair<double, double> chord_ends(const Vec& x) const {
    constexpr int kScan = 48;
    double t_in = std::numeric_limits<double>::quiet_NaN();
    double lo_in = 0.0, hi_in = 0.0;
    bool found = false;
    for (int k = 0; k <= kScan; ++k) {
      const double t = -tb_ + 2.0 * tb_ * k / kScan;
      if (inside(x, t)) {
        if (!found) {
          lo_in = hi_in = t;
          found = true;
        } else {
          hi_in = t;
        }
      }
    }
    if (!found) {
      return {t_in, t_in};  // NaN pair: the line misses the body
    }
    auto bisect = [&](double in, double out) {
      const double tol = 1e-12 * std::max(1.0, tb_);
      while (std::abs(out - in) > tol) {
        const double m = 0.5 * (in + out);
        if (inside(x, m))
          in = m;
        else
          out = m;
      }
      return in;
    };
    return {bisect(lo_in, -tb_), bisect(hi_in, tb_)};
  }

  int n_;
  Mat rt_;
  std::function<bool(const Vec&)> member_;
  double tb_;
  std::shared_ptr<const SectionDomain> dom_;
  double floor_;
};

// ------------------------------------------------------------ grid sections

class Grid1DSection final : public SectionBackend {
 public:
  explicit Grid1DSection(std::shared_ptr<const ChordInterp1D> interp)
      : interp_(std::move(interp)),
        dom_(std::make_shared<IntervalDomain>(interp_->lo(), interp_->hi())) {}
  int dim() const override { return 2; }
  const SectionDomain& domain() const override { return *dom_; }
  bool analytic() const override { return false; }
  double eval_floor() const override { return 3.0 * interp_->cell_width(); }
  double f(const Vec& x) const override { return interp_->f(x[0]); }
  double g(const Vec& x) const override { return interp_->g(x[0]); }

 private:
  std::shared_ptr<const ChordInterp1D> interp_;
  std::shared_ptr<const SectionDomain> dom_;
};

class Grid2DSection final : public SectionBackend {
 public:
  Grid2DSection(std::shared_ptr<const ChordInterp2D> interp,
                std::shared_ptr<const SectionDomain> dom)
      : interp_(std::move(interp)), dom_(std::move(dom)) {}
  int dim() const override { return 3; }
  const SectionDomain& domain() const override { return *dom_; }
  bool analytic() const override { return false; }
  double eval_floor() const override { return 3.0 * interp_->cell_step(); }
  double f(const Vec& x) const override { return interp_->f(x); }
  double g(const Vec& x) const override { return interp_->g(x); }

 private:
  std::shared_ptr<const ChordInterp2D> interp_;
  std::shared_ptr<const SectionDomain> dom_;
};

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  return 0.5 * (2.0 * p1 + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}

}  // namespace

// ------------------------------------------------------------ interpolants

ChordInterp1D::ChordInterp1D(double lo, double hi, Vec f_nodes, Vec g_nodes)
    : lo_(lo), hi_(hi), f_(std::move(f_nodes)), g_(std::move(g_nodes)) {
  if (f_.size() != g_.size() || f_.size() < 6) throw InputError("grid body: need >= 4 cells");
  const int n = cells();
  dx_ = (hi_ - lo_) / n;
  mid_ = 0.5 * (f_ - g_);
  c2_ = (f_ + g_).array().square();
}

double ChordInterp1D::interp(const Vec& v, double x) const {
  const int n = cells();
  const double c0 = lo_ + 0.5 * dx_;
  const double clast = lo_ + (n - 0.5) * dx_;
  x = std::clamp(x, lo_, hi_);
  if (x <= c0) {
    const double t = (x - lo_) / (0.5 * dx_);
    return v[0] * (1.0 - t) + v[1] * t;
  }
  if (x >= clast) {
    const double t = (x - clast) / (0.5 * dx_);
    return v[n] * (1.0 - t) + v[n + 1] * t;
  }
  int j = static_cast<int>((x - c0) / dx_);
  j = std::clamp(j, 0, n - 2);
  const double t = (x - (c0 + j * dx_)) / dx_;
  const double p1 = v[1 + j], p2 = v[2 + j];
  const double p0 = j >= 1 ? v[j] : 2.0 * p1 - p2;
  const double p3 = j + 2 < n ? v[3 + j] : 2.0 * p2 - p1;
  return catmull_rom(p0, p1, p2, p3, t);
}

double ChordInterp1D::mid_at(double x) const { return interp(mid_, x); }
double ChordInterp1D::c2_at(double x) const { return interp(c2_, x); }

ChordInterp2D::ChordInterp2D(Vec lo, Vec hi, int nx, int ny, Vec f_cells, Vec g_cells,
                             std::vector<char> mask)
    : lo_(std::move(lo)), hi_(std::move(hi)), nx_(nx), ny_(ny), f_(std::move(f_cells)),
      g_(std::move(g_cells)), mask_(std::move(mask)) {
  if (f_.size() != g_.size() || f_.size() != static_cast<long>(nx_) * ny_ ||
      static_cast<long>(mask_.size()) != f_.size())
    throw InputError("grid body: inconsistent array sizes");
  dx_ = (hi_[0] - lo_[0]) / nx_;
  dy_ = (hi_[1] - lo_[1]) / ny_;
  mid_ = 0.5 * (f_ - g_);
  c2_ = (f_ + g_).array().square();
}

double ChordInterp2D::interp(const Vec& v, const Vec& x) const {
  const double sx = std::clamp((x[0] - lo_[0]) / dx_ - 0.5, 0.0, nx_ - 1.0);
  const double sy = std::clamp((x[1] - lo_[1]) / dy_ - 0.5, 0.0, ny_ - 1.0);
  const int i = std::clamp(static_cast<int>(sx), 0, nx_ - 2);
  const int j = std::clamp(static_cast<int>(sy), 0, ny_ - 2);
  const double tx = sx - i, ty = sy - j;
  auto at = [&](int a, int b) {
    a = std::clamp(a, 0, nx_ - 1);
    b = std::clamp(b, 0, ny_ - 1);
    return v[static_cast<long>(a) * ny_ + b];
  };
  double rows[4];
  for (int a = -1; a <= 2; ++a)
    rows[a + 1] = catmull_rom(at(i + a, j - 1), at(i + a, j), at(i + a, j + 1), at(i + a, j + 2), ty);
  return catmull_rom(rows[0], rows[1], rows[2], rows[3], tx);
}

double ChordInterp2D::mid_at(const Vec& x) const { return interp(mid_, x); }
double ChordInterp2D::c2_at(const Vec& x) const { return interp(c2_, x); }

// -------------------------------------------------------------- factories

std::unique_ptr<SectionBackend> make_ellipsoid_section(const Mat& rotated_map,
                                                       const Vec& rotated_center) {
  return std::make_unique<EllipsoidSection>(rotated_map, rotated_center);
}

std::unique_ptr<SectionBackend> make_levelset_section(const Mat& rotation, LevelSetFn fn,
                                                      double t_bound,
                                                      std::shared_ptr<const SectionDomain> dom) {
  return std::make_unique<LevelSetSection>(rotation, std::move(fn), t_bound, std::move(dom));
}

std::unique_ptr<SectionBackend> make_average_section(std::shared_ptr<const SectionBackend> parent) {
  return std::make_unique<AverageSection>(std::move(parent));
}

std::unique_ptr<SectionBackend> make_membership_section(
    const Mat& rotation, std::function<bool(const Vec&)> world_member, double t_bound,
    std::shared_ptr<const SectionDomain> dom, double eval_floor) {
  return std::make_unique<MembershipSection>(rotation, std::move(world_member), t_bound,
                                             std::move(dom), eval_floor);
}

std::unique_ptr<SectionBackend> make_grid1_section(std::shared_ptr<const ChordInterp1D> interp) {
  return std::make_unique<Grid1DSection>(std::move(interp));
}

std::unique_ptr<SectionBackend> make_grid2_section(std::shared_ptr<const ChordInterp2D> interp,
                                                   std::shared_ptr<const SectionDomain> dom) {
  return std::make_unique<Grid2DSection>(std::move(interp), std::move(dom));
}

}  // namespace affsurf
