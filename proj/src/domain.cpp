#include "affsurf/domain.hpp"

#include <algorithm>
#include <cmath>

namespace affsurf {

IntervalDomain::IntervalDomain(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(hi > lo)) throw GeometryError("empty projection interval");
}

Vec IntervalDomain::bbox_lo() const {
  Vec v(1);
  v[0] = lo_;
  return v;
}

Vec IntervalDomain::bbox_hi() const {
  Vec v(1);
  v[0] = hi_;
  return v;
}

Vec IntervalDomain::anchor() const {
  Vec v(1);
  v[0] = 0.5 * (lo_ + hi_);
  return v;
}

EllipseDomain::EllipseDomain(Vec center, Mat quad_form) : c_(std::move(center)), Q_(std::move(quad_form)) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Q_);
  if (es.eigenvalues().minCoeff() <= 0.0) throw GeometryError("projected quadratic form not positive definite");
  scale_ = 1.0 / std::sqrt(es.eigenvalues().maxCoeff());
  // bbox half-widths: sqrt of diagonal of Q^{-1}
  const Mat Qi = Q_.inverse();
  lo_ = c_;
  hi_ = c_;
  for (int i = 0; i < 2; ++i) {
    const double w = std::sqrt(Qi(i, i));
    lo_[i] -= w;
    hi_[i] += w;
  }
}

double EllipseDomain::margin(const Vec& x) const {
  const Vec u = x - c_;
  const double gauge = std::sqrt(std::max(u.dot(Q_ * u), 0.0));
  return (1.0 - gauge) * scale_;
}

SupportFanDomain::SupportFanDomain(Vec anchor, std::vector<double> support_values)
    : anchor_(std::move(anchor)), h_(std::move(support_values)) {
  const int M = static_cast<int>(h_.size());
  if (M < 16 || M % 4 != 0) throw GeometryError("support fan needs >= 16 directions, divisible by 4");
  dx_.resize(M);
  dy_.resize(M);
  for (int k = 0; k < M; ++k) {
    const double th = 2.0 * M_PI * k / M;
    dx_[k] = std::cos(th);
    dy_[k] = std::sin(th);
  }
  lo_ = Vec(2);
  hi_ = Vec(2);
  hi_[0] = h_[0];
  hi_[1] = h_[M / 4];
  lo_[0] = -h_[M / 2];
  lo_[1] = -h_[3 * M / 4];
  scale_ = margin(anchor_);
  if (!(scale_ > 0.0)) throw GeometryError("support fan: anchor not interior");
}

double SupportFanDomain::margin(const Vec& x) const {
  double m = kInf;
  const int M = static_cast<int>(h_.size());
  for (int k = 0; k < M; ++k) m = std::min(m, h_[k] - x[0] * dx_[k] - x[1] * dy_[k]);
  return m;
}

}  // namespace affsurf
