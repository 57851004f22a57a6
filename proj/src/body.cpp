#include "affsurf/body.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "affsurf/rng.hpp"
#include "affsurf/sphere.hpp"

namespace affsurf {

std::string body_kind_name(BodyKind k) {
  switch (k) {
    case BodyKind::Ball: return "Ball";
    case BodyKind::Ellipsoid: return "Ellipsoid";
    case BodyKind::PNormBall: return "PNormBall";
    case BodyKind::PerturbedBall: return "PerturbedBall";
    case BodyKind::GraphBody: return "GraphBody";
    case BodyKind::Symmetral: return "Symmetral";
  }
  return "?";
}

namespace detail {

class BodyImpl {
 public:
  virtual ~BodyImpl() = default;
  virtual BodyKind kind() const = 0;
  virtual int dim() const = 0;
  virtual double support(const Vec& u) const = 0;
  virtual double radial(const Vec& u) const = 0;
  virtual bool contains(const Vec& z) const = 0;
  virtual double volume(const QuadratureSpec& q) const = 0;
  virtual bool analytic_jets() const = 0;
  virtual bool positive_curvature() const = 0;
  virtual std::unique_ptr<SectionBackend> section(const Mat& rotation,
                                                  const QuadratureSpec& q) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

}  // namespace detail

namespace {

using detail::BodyImpl;

nlohmann::json mat_to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Mat mat_from_json(const nlohmann::json& j) {
  const int r = static_cast<int>(j.size());
  const int c = static_cast<int>(j.at(0).size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const nlohmann::json& j) {
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

// dense scan plus golden refinement of a 1D objective on [a, b]
double max_1d(const std::function<double(double)>& fn, double a, double b, int scan = 720) {
  double best = -kInf, tbest = a;
  for (int i = 0; i <= scan; ++i) {
    const double t = a + (b - a) * i / scan;
    const double v = fn(t);
    if (v > best) {
      best = v;
      tbest = t;
    }
  }
  const double w = (b - a) / scan;
  double lo = std::max(a, tbest - w), hi = std::min(b, tbest + w);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = fn(x1);
    }
  }
  return std::max(f1, f2);
}

// projected-domain builder for a body with support function h (world frame)
std::shared_ptr<const SectionDomain> support_domain(
    int dim, const Mat& rotation, const std::function<double(const Vec&)>& support_world) {
  const Mat rt = rotation.transpose();
  if (dim == 2) {
    Vec d(2);
    d << 1.0, 0.0;
    const double hi = support_world(rt * d);
    const double lo = -support_world(rt * (-d));
    return std::make_shared<IntervalDomain>(lo, hi);
  }
  const int M = 128;
  std::vector<double> h(M);
  for (int k = 0; k < M; ++k) {
    const double th = 2.0 * M_PI * k / M;
    Vec d(3);
    d << std::cos(th), std::sin(th), 0.0;
    h[k] = support_world(rt * d);
  }
  return std::make_shared<SupportFanDomain>(Vec::Zero(2), std::move(h));
}

// ----------------------------------------------------------------- Ball

class BallImpl final : public BodyImpl {
 public:
  BallImpl(int dim, double r, Vec c) : n_(dim), r_(r), c_(std::move(c)) {
    if (n_ < 2) throw InputError("dim must be >= 2");
    if (!(r_ > 0.0)) throw InputError("ball radius must be positive");
    if (c_.size() == 0) c_ = Vec::Zero(n_);
    if (c_.size() != n_) throw InputError("ball center dimension mismatch");
    if (!(c_.norm() < r_)) throw GeometryError("origin not interior to ball");
  }
  BodyKind kind() const override { return BodyKind::Ball; }
  int dim() const override { return n_; }
  double support(const Vec& u) const override { return c_.dot(u) + r_; }
  double radial(const Vec& u) const override {
    const double cu = c_.dot(u);
    return cu + std::sqrt(cu * cu - c_.squaredNorm() + r_ * r_);
  }
  bool contains(const Vec& z) const override { return (z - c_).norm() <= r_; }
  double volume(const QuadratureSpec&) const override {
    return unit_ball_volume(n_) * std::pow(r_, n_);
  }
  bool analytic_jets() const override { return true; }
  bool positive_curvature() const override { return true; }
  std::unique_ptr<SectionBackend> section(const Mat& rot, const QuadratureSpec&) const override {
    return make_ellipsoid_section(r_ * rot, rot * c_);
  }
  nlohmann::json to_json() const override {
    return {{"kind", "Ball"}, {"dim", n_}, {"radius", r_}, {"center", vec_to_json(c_)}};
  }
  double r() const { return r_; }
  const Vec& c() const { return c_; }

 private:
  int n_;
  double r_;
  Vec c_;
};

// ------------------------------------------------------------- Ellipsoid

class EllipsoidImpl final : public BodyImpl {
 public:
  EllipsoidImpl(Mat a, Vec c) : n_(static_cast<int>(a.rows())), a_(std::move(a)), c_(std::move(c)) {
    if (n_ < 2 || a_.cols() != n_) throw InputError("ellipsoid map must be square, dim >= 2");
    if (c_.size() == 0) c_ = Vec::Zero(n_);
    if (c_.size() != n_) throw InputError("ellipsoid center dimension mismatch");
    const double da = std::abs(a_.determinant());
    const double scale = a_.cwiseAbs().maxCoeff();
    if (!(da > 1e-12 * std::pow(scale, n_))) throw InputError("ellipsoid map singular");
    q_ = (a_ * a_.transpose()).inverse();
    if (!(c_.dot(q_ * c_) < 1.0)) throw GeometryError("origin not interior to ellipsoid");
  }
  BodyKind kind() const override { return BodyKind::Ellipsoid; }
  int dim() const override { return n_; }
  double support(const Vec& u) const override { return c_.dot(u) + (a_.transpose() * u).norm(); }
  double radial(const Vec& u) const override {
    const double qa = u.dot(q_ * u);
    const double qb = -2.0 * u.dot(q_ * c_);
    const double qc = c_.dot(q_ * c_) - 1.0;
    return (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
  }
  bool contains(const Vec& z) const override { return (z - c_).dot(q_ * (z - c_)) <= 1.0; }
  double volume(const QuadratureSpec&) const override {
    return unit_ball_volume(n_) * std::abs(a_.determinant());
  }
  bool analytic_jets() const override { return true; }
  bool positive_curvature() const override { return true; }
  std::unique_ptr<SectionBackend> section(const Mat& rot, const QuadratureSpec&) const override {
    return make_ellipsoid_section(rot * a_, rot * c_);
  }
  nlohmann::json to_json() const override {
    return {{"kind", "Ellipsoid"}, {"dim", n_}, {"map", mat_to_json(a_)}, {"center", vec_to_json(c_)}};
  }

 private:
  int n_;
  Mat a_;
  Vec c_;
  Mat q_;
};

// ------------------------------------------------------------- PNormBall

class PNormBallImpl final : public BodyImpl {
 public:
  PNormBallImpl(int dim, double q, Vec a) : n_(dim), q_(q), a_(std::move(a)) {
    if (n_ < 2) throw InputError("dim must be >= 2");
    if (!(q_ > 1.0) || !std::isfinite(q_)) throw InputError("p-norm exponent must lie in (1, inf)");
    if (a_.size() != n_) throw InputError("semi-axes dimension mismatch");
    if (a_.minCoeff() <= 0.0) throw InputError("semi-axes must be positive");
  }
  BodyKind kind() const override { return BodyKind::PNormBall; }
  int dim() const override { return n_; }
  double support(const Vec& u) const override {
    const double qs = q_ / (q_ - 1.0);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::pow(std::abs(a_[i] * u[i]), qs);
    return std::pow(s, 1.0 / qs);
  }
  double radial(const Vec& u) const override {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::pow(std::abs(u[i] / a_[i]), q_);
    return std::pow(s, -1.0 / q_);
  }
  bool contains(const Vec& z) const override { return gauge_pow(z) <= 1.0; }
  double volume(const QuadratureSpec&) const override {
    double v = std::pow(2.0, n_) * std::pow(std::tgamma(1.0 + 1.0 / q_), n_) /
               std::tgamma(1.0 + static_cast<double>(n_) / q_);
    for (int i = 0; i < n_; ++i) v *= a_[i];
    return v;
  }
  bool analytic_jets() const override { return true; }
  bool positive_curvature() const override { return q_ < 2.0; }
  std::unique_ptr<SectionBackend> section(const Mat& rot, const QuadratureSpec&) const override {
    LevelSetFn fn;
    const Vec a = a_;
    const double q = q_;
    const int n = n_;
    fn.level = 1.0;
    fn.value = [a, q, n](const Vec& z) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::pow(std::abs(z[i] / a[i]), q);
      return s;
    };
    fn.grad = [a, q, n](const Vec& z) {
      Vec g(n);
      for (int i = 0; i < n; ++i) {
        const double t = z[i] / a[i];
        g[i] = q * std::copysign(std::pow(std::abs(t), q - 1.0), t) / a[i];
      }
      return g;
    };
    fn.hess = [a, q, n](const Vec& z) {
      Mat h = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        const double t = std::max(std::abs(z[i] / a[i]), 1e-9);  // a.e.-defined for q < 2
        h(i, i) = q * (q - 1.0) * std::pow(t, q - 2.0) / (a[i] * a[i]);
      }
      return h;
    };
    auto sup = [this](const Vec& u) { return support(u); };
    auto dom = support_domain(n_, rot, sup);
    Vec en = Vec::Zero(n_);
    en[n_ - 1] = 1.0;
    const double tb = 1.01 * support(rot.transpose() * en) + 1e-9;
    return make_levelset_section(rot, std::move(fn), tb, std::move(dom));
  }
  nlohmann::json to_json() const override {
    return {{"kind", "PNormBall"}, {"dim", n_}, {"exponent", q_}, {"semi_axes", vec_to_json(a_)}};
  }

 private:
  double gauge_pow(const Vec& z) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += std::pow(std::abs(z[i] / a_[i]), q_);
    return s;
  }
  int n_;
  double q_;
  Vec a_;
};

// --------------------------------------------------------- PerturbedBall

class PerturbedBallImpl final : public BodyImpl {
 public:
  PerturbedBallImpl(int dim, double r, double delta, int freq)
      : n_(dim), r_(r), delta_(delta), k_(freq) {
    if (n_ != 2 && n_ != 3) throw InputError("perturbed ball supports dim 2 or 3");
    if (!(r_ > 0.0)) throw InputError("radius must be positive");
    if (!(std::abs(delta_) < 0.5)) throw InputError("perturbation amplitude too large");
    if (n_ == 2 && k_ < 1) throw InputError("frequency must be >= 1");
    validate_convexity();
  }
  BodyKind kind() const override { return BodyKind::PerturbedBall; }
  int dim() const override { return n_; }
  double radial(const Vec& u) const override { return rho(u); }
  bool contains(const Vec& z) const override {
    const double nz = z.norm();
    if (nz == 0.0) return true;
    return nz <= rho(z / nz);
  }
  double support(const Vec& u) const override {
    if (n_ == 2) {
      const double alpha = std::atan2(u[1], u[0]);
      return max_1d(
          [&](double th) { return rho_angle(th) * std::cos(th - alpha); }, alpha - M_PI,
          alpha + M_PI);
    }
    const double uperp = std::hypot(u[0], u[1]);
    const double uz = u[2];
    return max_1d(
        [&](double beta) {
          return rho_polar(std::cos(beta)) * (std::sin(beta) * uperp + std::cos(beta) * uz);
        },
        0.0, M_PI);
  }
  double volume(const QuadratureSpec&) const override {
    const int m = 8192;
    if (n_ == 2) {  // (1/2) integral of rho^2 over the circle
      double s = 0.0;
      for (int i = 0; i < m; ++i) {
        const double th = 2.0 * M_PI * i / m;
        const double r = rho_angle(th);
        s += r * r;
      }
      return 0.5 * s * (2.0 * M_PI / m);
    }
    double s = 0.0;  // (2*pi/3) integral of rho^3 sin(beta)
    for (int i = 0; i < m; ++i) {
      const double beta = M_PI * (i + 0.5) / m;
      const double r = rho_polar(std::cos(beta));
      s += r * r * r * std::sin(beta);
    }
    return (2.0 * M_PI / 3.0) * s * (M_PI / m);
  }
  bool analytic_jets() const override { return true; }
  bool positive_curvature() const override { return true; }
  std::unique_ptr<SectionBackend> section(const Mat& rot, const QuadratureSpec&) const override {
    LevelSetFn fn;
    fn.level = 0.0;
    fn.value = [this](const Vec& z) { return z.norm() - rho_ext(z); };
    fn.grad = [this](const Vec& z) { return Vec(z / z.norm() - grad_rho(z)); };
    fn.hess = [this](const Vec& z) {
      const double nz = z.norm();
      const Vec u = z / nz;
      return Mat((Mat::Identity(n_, n_) - u * u.transpose()) / nz - hess_rho(z));
    };
    auto sup = [this](const Vec& u) { return support(u); };
    auto dom = support_domain(n_, rot, sup);
    const double tb = 1.05 * r_ * (1.0 + std::abs(delta_)) + 1e-9;
    return make_levelset_section(rot, std::move(fn), tb, std::move(dom));
  }
  nlohmann::json to_json() const override {
    return {{"kind", "PerturbedBall"}, {"dim", n_}, {"radius", r_}, {"amplitude", delta_},
            {"frequency", k_}};
  }

 private:
  double rho_angle(double th) const { return r_ * (1.0 + delta_ * std::cos(k_ * th)); }
  double rho_polar(double cos_beta) const {  // zonal P2 profile
    return r_ * (1.0 + delta_ * 0.5 * (3.0 * cos_beta * cos_beta - 1.0));
  }
  double rho(const Vec& u) const {
    if (n_ == 2) return rho_angle(std::atan2(u[1], u[0]));
    return rho_polar(u[2]);
  }
  double rho_ext(const Vec& z) const {  // 0-homogeneous extension
    return rho(Vec(z / z.norm()));
  }

  // gradient and Hessian of the 0-homogeneous rho extension
  Vec grad_rho(const Vec& z) const {
    const double nz = z.norm();
    if (n_ == 2) {
      // s(z) = Re((z0 + i z1)^k) / |z|^k
      const std::complex<double> w(z[0], z[1]);
      const std::complex<double> c1 = std::pow(w, k_ - 1);
      Vec gp(2);
      gp << k_ * c1.real(), -k_ * c1.imag();
      const double wk = std::pow(nz, -static_cast<double>(k_));
      const Vec gw = -static_cast<double>(k_) * std::pow(nz, -k_ - 2.0) * z;
      const double pv = std::pow(w, k_).real() * 1.0;
      return Vec(r_ * delta_ * (wk * gp + pv * gw));
    }
    // s(z) = (3 z2^2 / |z|^2 - 1)/2
    Vec gw(3);
    const double n2 = nz * nz;
    gw << -2.0 * z[2] * z[2] * z[0] / (n2 * n2), -2.0 * z[2] * z[2] * z[1] / (n2 * n2),
        2.0 * z[2] / n2 - 2.0 * z[2] * z[2] * z[2] / (n2 * n2);
    return Vec(r_ * delta_ * 1.5 * gw);
  }

  Mat hess_rho(const Vec& z) const {
    const double nz = z.norm();
    if (n_ == 2) {
      const std::complex<double> w(z[0], z[1]);
      const std::complex<double> c1 = std::pow(w, k_ - 1);
      const std::complex<double> c2 = k_ >= 2 ? std::pow(w, k_ - 2) : std::complex<double>(0, 0);
      const double pv = std::pow(w, k_).real();
      Vec gp(2);
      gp << k_ * c1.real(), -k_ * c1.imag();
      Mat hp(2, 2);
      hp << k_ * (k_ - 1.0) * c2.real(), -k_ * (k_ - 1.0) * c2.imag(),
          -k_ * (k_ - 1.0) * c2.imag(), -k_ * (k_ - 1.0) * c2.real();
      const double wk = std::pow(nz, -static_cast<double>(k_));
      const Vec gw = -static_cast<double>(k_) * std::pow(nz, -k_ - 2.0) * z;
      const Mat hw = -static_cast<double>(k_) * std::pow(nz, -k_ - 2.0) * Mat::Identity(2, 2) +
                     k_ * (k_ + 2.0) * std::pow(nz, -k_ - 4.0) * z * z.transpose();
      Mat h = wk * hp + gp * gw.transpose() + gw * gp.transpose() + pv * hw;
      return Mat(r_ * delta_ * h);
    }
    const double n2 = nz * nz;
    Vec e2 = Vec::Zero(3);
    e2[2] = 1.0;
    const double z2 = z[2];
    Mat h = 2.0 / n2 * e2 * e2.transpose() -
            4.0 * z2 / (n2 * n2) * (e2 * z.transpose() + z * e2.transpose()) -
            2.0 * z2 * z2 / (n2 * n2) * Mat::Identity(3, 3) +
            8.0 * z2 * z2 / (n2 * n2 * n2) * z * z.transpose();
    return Mat(r_ * delta_ * 1.5 * h);
  }

  void validate_convexity() const {
    SeededRng rng(0xC0FFEE);
    const int npts = 1024, npairs = 4096;
    std::vector<Vec> pts;
    pts.reserve(npts);
    for (int i = 0; i < npts; ++i) {
      const Vec u = rng.unit_vector(n_);
      pts.push_back(Vec(rho(u) * u));
    }
    for (int i = 0; i < npairs; ++i) {
      const auto& a = pts[rng.raw() % npts];
      const auto& b = pts[rng.raw() % npts];
      const Vec m = 0.5 * (a + b);
      const double nm = m.norm();
      if (nm > 1e-12 && nm > rho(Vec(m / nm)) * (1.0 + 1e-9))
        throw InputError("perturbation breaks convexity (sampled midpoint check)");
    }
  }

  int n_;
  double r_, delta_;
  int k_;
};

// ---------------------------------------------------------- grid bodies

class Grid1DImpl final : public BodyImpl {
 public:
  Grid1DImpl(Mat frame, double lo, double hi, Vec f, Vec g)
      : frame_(std::move(frame)),
        interp_(std::make_shared<ChordInterp1D>(lo, hi, std::move(f), std::move(g))) {
    if (frame_.rows() != 2 || frame_.cols() != 2) throw InputError("grid body frame must be 2x2");
    validate();
  }
  BodyKind kind() const override { return BodyKind::GraphBody; }
  int dim() const override { return 2; }
  bool analytic_jets() const override { return false; }
  bool positive_curvature() const override { return false; }
  bool contains(const Vec& z) const override {
    const Vec zeta = frame_ * z;
    const double x = zeta[0];
    if (x < interp_->lo() || x > interp_->hi()) return false;
    return zeta[1] >= -interp_->g(x) - 1e-13 && zeta[1] <= interp_->f(x) + 1e-13;
  }
  double support(const Vec& u) const override {
    const Vec w = frame_ * u;
    const auto& f = interp_->f_nodes();
    const auto& g = interp_->g_nodes();
    const int nn = static_cast<int>(f.size());
    double best = -kInf;
    for (int i = 0; i < nn; ++i) {
      const double x = node_x(i);
      best = std::max(best, x * w[0] + f[i] * w[1]);
      best = std::max(best, x * w[0] - g[i] * w[1]);
    }
    return best;
  }
  double radial(const Vec& u) const override {
    double lo = 0.0, hi = support(u) + 1e-9;
    if (!contains(Vec(1e-12 * u))) throw GeometryError("origin not interior");
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (lo + hi);
      if (contains(Vec(m * u)))
        lo = m;
      else
        hi = m;
    }
    return lo;
  }
  double volume(const QuadratureSpec&) const override {
    const int n = interp_->cells();
    const double c0 = interp_->lo() + 0.5 * interp_->cell_width();
    double total = 0.0;
    // end gaps: chord^2 is linear there, integrate sqrt exactly
    auto sqrt_lin = [](double c2a, double c2b, double len) {
      c2a = std::max(c2a, 0.0);
      c2b = std::max(c2b, 0.0);
      if (std::abs(c2b - c2a) < 1e-300) return len * std::sqrt(0.5 * (c2a + c2b));
      return len * (std::pow(c2b, 1.5) - std::pow(c2a, 1.5)) / (1.5 * (c2b - c2a));
    };
    const auto& f = interp_->f_nodes();
    const auto& g = interp_->g_nodes();
    auto c2node = [&](int i) {
      const double c = f[i] + g[i];
      return c * c;
    };
    total += sqrt_lin(c2node(0), c2node(1), 0.5 * interp_->cell_width());
    total += sqrt_lin(c2node(n), c2node(n + 1), 0.5 * interp_->cell_width());
    const int sub = 16;
    for (int i = 0; i + 1 < n; ++i) {
      const double a = c0 + i * interp_->cell_width();
      const double h = interp_->cell_width() / sub;
      for (int s = 0; s < sub; ++s) total += h * interp_->chord(a + (s + 0.5) * h);
    }
    return total;
  }
  std::unique_ptr<SectionBackend> section(const Mat& rot, const QuadratureSpec&) const override {
    if ((rot - frame_).cwiseAbs().maxCoeff() < 1e-9) return make_grid1_section(interp_);
    auto self = interp_;
    const Mat fr = frame_;
    auto member = [self, fr](const Vec& z) {
      const Vec zeta = fr * z;
      const double x = zeta[0];
      if (x < self->lo() || x > self->hi()) return false;
      return zeta[1] >= -self->g(x) - 1e-13 && zeta[1] <= self->f(x) + 1e-13;
    };
    auto sup = [this](const Vec& u) { return support(u); };
    auto dom = support_domain(2, rot, sup);
    Vec en(2);
    en << 0.0, 1.0;
    const double tb = 1.01 * std::max(support(rot.transpose() * en),
                                      support(Vec(-(rot.transpose() * en)))) + 1e-9;
    return make_membership_section(rot, member, tb, std::move(dom),
                                   1.5 * interp_->cell_width());
  }
  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = "GraphBody";
    j["dim"] = 2;
    j["frame"] = mat_to_json(frame_);
    j["lo"] = interp_->lo();
    j["hi"] = interp_->hi();
    j["f_values"] = std::vector<double>(interp_->f_nodes().begin(), interp_->f_nodes().end());
    j["g_values"] = std::vector<double>(interp_->g_nodes().begin(), interp_->g_nodes().end());
    return j;
  }

 private:
  double node_x(int i) const {
    const int n = interp_->cells();
    if (i == 0) return interp_->lo();
    if (i == n + 1) return interp_->hi();
    return interp_->lo() + (i - 0.5) * interp_->cell_width();
  }
  void validate() const {
    if (!(interp_->lo() < 0.0 && interp_->hi() > 0.0))
      throw GeometryError("origin not interior (projection)");
    Vec x0(1);
    x0[0] = 0.0;
    if (!(interp_->f(0.0) > 0.0 && interp_->g(0.0) > 0.0))
      throw GeometryError("origin not interior to grid body");
    const auto& f = interp_->f_nodes();
    const auto& g = interp_->g_nodes();
    const double scale = std::max(f.cwiseAbs().maxCoeff(), g.cwiseAbs().maxCoeff());
    const int n = interp_->cells();
    for (int i = 2; i + 1 < n; ++i) {  // uniform interior triples
      if (f[i - 1] + f[i + 1] - 2.0 * f[i] > 1e-6 * scale ||
          g[i - 1] + g[i + 1] - 2.0 * g[i] > 1e-6 * scale)
        throw GeometryError("grid body graphs not concave (sampled)");
    }
    for (int i = 0; i < static_cast<int>(f.size()); ++i)
      if (f[i] + g[i] < -1e-9 * scale) throw GeometryError("grid body has negative chords");
  }

  Mat frame_;
  std::shared_ptr<const ChordInterp1D> interp_;
};

class Grid2DImpl final : public BodyImpl {
 public:
  Grid2DImpl(Mat frame, Vec lo, Vec hi, int nx, int ny, Vec f, Vec g, std::vector<char> mask)
      : frame_(std::move(frame)),
        interp_(std::make_shared<ChordInterp2D>(std::move(lo), std::move(hi), nx, ny,
                                                std::move(f), std::move(g), std::move(mask))) {
    if (frame_.rows() != 3 || frame_.cols() != 3) throw InputError("grid body frame must be 3x3");
    build_domain();
    Vec zero = Vec::Zero(3);
    if (!contains(zero)) throw GeometryError("origin not interior to grid body");
  }
  BodyKind kind() const override { return BodyKind::GraphBody; }
  int dim() const override { return 3; }
  bool analytic_jets() const override { return false; }
  bool positive_curvature() const override { return false; }
  bool contains(const Vec& z) const override {
    const Vec zeta = frame_ * z;
    Vec x(2);
    x << zeta[0], zeta[1];
    if (dom_->margin(x) <= 0.0) return false;
    return zeta[2] >= -interp_->g(x) - 1e-13 && zeta[2] <= interp_->f(x) + 1e-13;
  }
  double support(const Vec& u) const override {
    const Vec w = frame_ * u;
    const auto& f = interp_->f_cells();
    const auto& g = interp_->g_cells();
    const auto& mask = interp_->mask();
    const int nx = interp_->nx(), ny = interp_->ny();
    const Vec lo = interp_->bbox_lo(), hi = interp_->bbox_hi();
    const double dx = (hi[0] - lo[0]) / nx, dy = (hi[1] - lo[1]) / ny;
    double best = -kInf;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const long idx = static_cast<long>(i) * ny + j;
        if (!mask[idx]) continue;
        const double px = lo[0] + (i + 0.5) * dx, py = lo[1] + (j + 0.5) * dy;
        const double base = px * w[0] + py * w[1];
        best = std::max(best, base + f[idx] * w[2]);
        best = std::max(best, base - g[idx] * w[2]);
      }
    }
    return best;
  }
  double radial(const Vec& u) const override {
    double lo = 0.0, hi = support(u) + 1e-9;
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (lo + hi);
      if (contains(Vec(m * u)))
        lo = m;
      else
        hi = m;
    }
    return lo;
  }
  double volume(const QuadratureSpec& q) const override {
    StripParams params;
    params.boundary_exponent = 0.5;  // chords vanish like sqrt(margin)
    params.eval_floor = 1.5 * interp_->cell_step();
    auto self = interp_;
    CellIntegrand chord = [self](const Vec& x) { return self->chord(x); };
    const auto run = truncated_pair(*dom_, q.grid_resolution, q.boundary_margin, params, chord,
                                    ExecMode::Serial);
    return run.value_half;
  }
  std::unique_ptr<SectionBackend> section(const Mat& rot, const QuadratureSpec&) const override {
    if ((rot - frame_).cwiseAbs().maxCoeff() < 1e-9) return make_grid2_section(interp_, dom_);
    auto self = interp_;
    auto dptr = dom_;
    const Mat fr = frame_;
    auto member = [self, dptr, fr](const Vec& z) {
      const Vec zeta = fr * z;
      Vec x(2);
      x << zeta[0], zeta[1];
      if (dptr->margin(x) <= 0.0) return false;
      return zeta[2] >= -self->g(x) - 1e-13 && zeta[2] <= self->f(x) + 1e-13;
    };
    auto sup = [this](const Vec& u) { return support(u); };
    auto dom = support_domain(3, rot, sup);
    Vec en = Vec::Zero(3);
    en[2] = 1.0;
    const double tb = 1.01 * std::max(support(rot.transpose() * en),
                                      support(Vec(-(rot.transpose() * en)))) + 1e-9;
    return make_membership_section(rot, member, tb, std::move(dom), 1.5 * interp_->cell_step());
  }
  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = "GraphBody";
    j["dim"] = 3;
    j["frame"] = mat_to_json(frame_);
    j["bbox_lo"] = vec_to_json(interp_->bbox_lo());
    j["bbox_hi"] = vec_to_json(interp_->bbox_hi());
    j["shape"] = {interp_->nx(), interp_->ny()};
    j["f_values"] = std::vector<double>(interp_->f_cells().begin(), interp_->f_cells().end());
    j["g_values"] = std::vector<double>(interp_->g_cells().begin(), interp_->g_cells().end());
    std::vector<int> m(interp_->mask().begin(), interp_->mask().end());
    j["mask"] = m;
    return j;
  }

 private:
  void build_domain() {
    const int M = 128;
    const auto& mask = interp_->mask();
    const int nx = interp_->nx(), ny = interp_->ny();
    const Vec lo = interp_->bbox_lo(), hi = interp_->bbox_hi();
    const double dx = (hi[0] - lo[0]) / nx, dy = (hi[1] - lo[1]) / ny;
    std::vector<double> h(M, -kInf);
    for (int k = 0; k < M; ++k) {
      const double th = 2.0 * M_PI * k / M;
      const double cx = std::cos(th), cy = std::sin(th);
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
          if (mask[static_cast<long>(i) * ny + j]) {
            const double px = lo[0] + (i + 0.5) * dx, py = lo[1] + (j + 0.5) * dy;
            h[k] = std::max(h[k], px * cx + py * cy);
          }
    }
    dom_ = std::make_shared<SupportFanDomain>(Vec::Zero(2), std::move(h));
  }

  Mat frame_;
  std::shared_ptr<const ChordInterp2D> interp_;
  std::shared_ptr<const SectionDomain> dom_;
};

// ------------------------------------------------------------- Symmetral

class SymmetralImpl final : public BodyImpl {
 public:
  SymmetralImpl(ConvexBody parent, Vec xi)
      : parent_(std::move(parent)), xi_(std::move(xi)), frame_(frame_rotation(xi_)) {
    base_ = parent_.section(frame_, QuadratureSpec{});
    avg_ = std::shared_ptr<const SectionBackend>(make_average_section(base_));
    build_cloud();
  }
  BodyKind kind() const override { return BodyKind::Symmetral; }
  int dim() const override { return static_cast<int>(xi_.size()); }
  bool analytic_jets() const override { return parent_.analytic_jets(); }
  bool positive_curvature() const override { return parent_.positive_curvature(); }
  bool contains(const Vec& z) const override {
    const Vec zeta = frame_ * z;
    const int s = dim() - 1;
    const Vec x = zeta.head(s);
    if (avg_->domain().margin(x) <= 0.0) return false;
    return std::abs(zeta[s]) <= avg_->f(x) + 1e-13;
  }
  double support(const Vec& u) const override {
    double best = -kInf;
    for (const auto& p : cloud_) best = std::max(best, p.dot(u));
    return best;
  }
  double radial(const Vec& u) const override {
    double lo = 0.0, hi = support(u) + 1e-9;
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (lo + hi);
      if (contains(Vec(m * u)))
        lo = m;
      else
        hi = m;
    }
    return lo;
  }
  double volume(const QuadratureSpec& q) const override {
    StripParams params;
    params.boundary_exponent = 0.5;
    params.eval_floor = std::max(avg_->eval_floor(), 1e-9);
    auto sec = avg_;
    CellIntegrand chord = [sec](const Vec& x) { return 2.0 * sec->f(x); };
    const auto run = truncated_pair(avg_->domain(), q.grid_resolution, q.boundary_margin, params,
                                    chord, ExecMode::Serial);
    return run.value_half;
  }
  std::unique_ptr<SectionBackend> section(const Mat& rot, const QuadratureSpec& q) const override {
    if ((rot - frame_).cwiseAbs().maxCoeff() < 1e-9)
      return make_average_section(parent_.section(frame_, q));
    auto self_avg = avg_;
    const Mat fr = frame_;
    const int sd = dim() - 1;
    auto member = [self_avg, fr, sd](const Vec& z) {
      const Vec zeta = fr * z;
      const Vec x = zeta.head(sd);
      if (self_avg->domain().margin(x) <= 0.0) return false;
      return std::abs(zeta[sd]) <= self_avg->f(x) + 1e-13;
    };
    auto sup = [this](const Vec& u) { return support(u); };
    auto dom = support_domain(dim(), rot, sup);
    Vec en = Vec::Zero(dim());
    en[dim() - 1] = 1.0;
    const double tb = 1.01 * std::max(support(rot.transpose() * en),
                                      support(Vec(-(rot.transpose() * en)))) + 1e-9;
    return make_membership_section(rot, member, tb, std::move(dom),
                                   std::max(avg_->eval_floor(), 1e-9));
  }
  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = "Symmetral";
    j["dim"] = dim();
    j["direction"] = vec_to_json(xi_);
    j["parent"] = parent_.to_json();
    return j;
  }
  const ConvexBody& parent() const { return parent_; }

 private:
  void build_cloud() {
    const auto& dom = avg_->domain();
    const Mat rt = frame_.transpose();
    const int s = dim() - 1;
    auto add = [&](const Vec& x, double t) {
      Vec zeta(dim());
      zeta.head(s) = x;
      zeta[s] = t;
      cloud_.push_back(Vec(rt * zeta));
    };
    if (s == 1) {
      const double lo = dom.bbox_lo()[0], hi = dom.bbox_hi()[0];
      const int K = 1024;
      Vec x(1);
      for (int i = 0; i <= K; ++i) {
        x[0] = lo + (hi - lo) * i / K;
        if (dom.margin(x) <= 0.0) {
          add(x, 0.0);
          continue;
        }
        const double h = avg_->f(x);
        add(x, h);
        add(x, -h);
      }
    } else {
      const Vec lo = dom.bbox_lo(), hi = dom.bbox_hi();
      const int K = 48;
      Vec x(2);
      for (int i = 0; i <= K; ++i) {
        for (int j = 0; j <= K; ++j) {
          x[0] = lo[0] + (hi[0] - lo[0]) * i / K;
          x[1] = lo[1] + (hi[1] - lo[1]) * j / K;
          if (dom.margin(x) <= 1e-12) continue;
          const double h = avg_->f(x);
          add(x, h);
          add(x, -h);
        }
      }
      // boundary ring at chord 0
      const Vec anchor = dom.anchor();
      const int M = 96;
      for (int k = 0; k < M; ++k) {
        const double th = 2.0 * M_PI * k / M;
        Vec d(2);
        d << std::cos(th), std::sin(th);
        double a = 0.0, b = 4.0 * (hi - lo).norm();
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          if (dom.margin(Vec(anchor + m * d)) > 0.0)
            a = m;
          else
            b = m;
        }
        add(Vec(anchor + a * d), 0.0);
      }
    }
  }

  ConvexBody parent_;
  Vec xi_;
  Mat frame_;
  std::shared_ptr<const SectionBackend> base_, avg_;
  std::vector<Vec> cloud_;
};

}  // namespace

// -------------------------------------------------------------- ConvexBody

ConvexBody::ConvexBody(std::shared_ptr<const detail::BodyImpl> impl) : impl_(std::move(impl)) {}

ConvexBody ConvexBody::ball(int dim, double radius, Vec center) {
  return ConvexBody(std::make_shared<BallImpl>(dim, radius, std::move(center)));
}
ConvexBody ConvexBody::ball(int dim, double radius) { return ball(dim, radius, Vec::Zero(dim)); }
ConvexBody ConvexBody::ellipsoid(Mat map, Vec center) {
  return ConvexBody(std::make_shared<EllipsoidImpl>(std::move(map), std::move(center)));
}
ConvexBody ConvexBody::ellipsoid(Mat map) {
  const int n = static_cast<int>(map.rows());
  return ellipsoid(std::move(map), Vec::Zero(n));
}
ConvexBody ConvexBody::pnorm_ball(int dim, double exponent, Vec semi_axes) {
  return ConvexBody(std::make_shared<PNormBallImpl>(dim, exponent, std::move(semi_axes)));
}
ConvexBody ConvexBody::perturbed_ball(int dim, double radius, double amplitude, int frequency) {
  return ConvexBody(std::make_shared<PerturbedBallImpl>(dim, radius, amplitude, frequency));
}
ConvexBody ConvexBody::graph_body_1d(Mat frame, double lo, double hi, Vec f, Vec g) {
  return ConvexBody(std::make_shared<Grid1DImpl>(std::move(frame), lo, hi, std::move(f), std::move(g)));
}
ConvexBody ConvexBody::graph_body_2d(Mat frame, Vec lo, Vec hi, int nx, int ny, Vec f, Vec g,
                                     std::vector<char> mask) {
  return ConvexBody(std::make_shared<Grid2DImpl>(std::move(frame), std::move(lo), std::move(hi), nx,
                                                 ny, std::move(f), std::move(g), std::move(mask)));
}
ConvexBody ConvexBody::symmetral(const ConvexBody& parent, const Vec& xi) {
  require_unit(xi, "steiner_symmetral");
  if (static_cast<int>(xi.size()) != parent.dim()) throw InputError("direction dimension mismatch");
  return ConvexBody(std::make_shared<SymmetralImpl>(parent, xi));
}

BodyKind ConvexBody::kind() const { return impl_->kind(); }
int ConvexBody::dim() const { return impl_->dim(); }

double ConvexBody::support(const Vec& u) const {
  require_unit(u, "support");
  if (static_cast<int>(u.size()) != dim()) throw InputError("support: dimension mismatch");
  return impl_->support(u);
}

double ConvexBody::radial(const Vec& u) const {
  require_unit(u, "radial");
  if (static_cast<int>(u.size()) != dim()) throw InputError("radial: dimension mismatch");
  return impl_->radial(u);
}

bool ConvexBody::contains(const Vec& z) const { return impl_->contains(z); }
double ConvexBody::volume(const QuadratureSpec& q) const { return impl_->volume(q); }
bool ConvexBody::analytic_jets() const { return impl_->analytic_jets(); }
bool ConvexBody::positive_curvature() const { return impl_->positive_curvature(); }

std::shared_ptr<const SectionBackend> ConvexBody::section(const Mat& rotation,
                                                          const QuadratureSpec& q) const {
  return std::shared_ptr<const SectionBackend>(impl_->section(rotation, q));
}

double ConvexBody::polar_volume(const QuadratureSpec& q) const {
  const int n = dim();
  if (n == 2) {
    const int m = std::max(q.sphere_samples, 1024);
    std::vector<double> terms(m);
    for (int i = 0; i < m; ++i) {
      const double th = 2.0 * M_PI * i / m;
      Vec u(2);
      u << std::cos(th), std::sin(th);
      const double h = impl_->support(u);
      if (!(h > 0.0)) throw GeometryError("polar volume: nonpositive support (origin not interior)");
      terms[i] = std::pow(h, -n);
    }
    return pairwise_sum(terms) * (2.0 * M_PI / m) / n;
  }
  if (n == 3) {
    const int level = q.sphere_samples > 1280 ? 4 : 3;
    const SphereRule rule = icosphere_rule(level);
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double h = impl_->support(rule.nodes[i]);
      if (!(h > 0.0)) throw GeometryError("polar volume: nonpositive support (origin not interior)");
      terms[i] = rule.weights[i] * std::pow(h, -n);
    }
    return pairwise_sum(terms) / n;
  }
  throw InputError("polar_volume: quadrature supports dim 2 or 3");
}

nlohmann::json ConvexBody::to_json() const { return impl_->to_json(); }

ConvexBody ConvexBody::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("dim").get<int>();
  if (kind == "Ball") return ball(n, j.at("radius").get<double>(), vec_from_json(j.at("center")));
  if (kind == "Ellipsoid")
    return ellipsoid(mat_from_json(j.at("map")), vec_from_json(j.at("center")));
  if (kind == "PNormBall")
    return pnorm_ball(n, j.at("exponent").get<double>(), vec_from_json(j.at("semi_axes")));
  if (kind == "PerturbedBall")
    return perturbed_ball(n, j.at("radius").get<double>(), j.at("amplitude").get<double>(),
                          j.value("frequency", 3));
  if (kind == "GraphBody") {
    if (n == 2) {
      return graph_body_1d(mat_from_json(j.at("frame")), j.at("lo").get<double>(),
                           j.at("hi").get<double>(), vec_from_json(j.at("f_values")),
                           vec_from_json(j.at("g_values")));
    }
    const auto shape = j.at("shape");
    std::vector<char> mask;
    for (const auto& v : j.at("mask")) mask.push_back(static_cast<char>(v.get<int>() != 0));
    return graph_body_2d(mat_from_json(j.at("frame")), vec_from_json(j.at("bbox_lo")),
                         vec_from_json(j.at("bbox_hi")), shape.at(0).get<int>(),
                         shape.at(1).get<int>(), vec_from_json(j.at("f_values")),
                         vec_from_json(j.at("g_values")), std::move(mask));
  }
  if (kind == "Symmetral")
    return symmetral(from_json(j.at("parent")), vec_from_json(j.at("direction")));
  throw ConfigError("unknown body kind: " + kind);
}

GraphPair to_graph_pair(const ConvexBody& body, const Vec& xi, const QuadratureSpec& q) {
  require_unit(xi, "to_graph_pair");
  if (static_cast<int>(xi.size()) != body.dim()) throw InputError("direction dimension mismatch");
  const Mat rot = frame_rotation(xi);
  return GraphPair(body.section(rot, q), rot, q.fd_step);
}

double hausdorff_distance(const ConvexBody& k, const ConvexBody& l, const QuadratureSpec& q) {
  if (k.dim() != l.dim()) throw InputError("hausdorff_distance: dimension mismatch");
  const auto dirs = direction_set(k.dim(), q.sphere_samples);
  double best = 0.0;
  for (const auto& u : dirs) best = std::max(best, std::abs(k.support(u) - l.support(u)));
  return best;
}

}  // namespace affsurf
