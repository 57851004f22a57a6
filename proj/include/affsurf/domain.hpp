// Projection domains K_0 of a convex body onto the rotated frame's e_n^perp,
// with a margin function that vanishes linearly at relbd K_0.
#pragma once

#include <memory>
#include <vector>

#include "affsurf/common.hpp"

namespace affsurf {

class SectionDomain {
 public:
  virtual ~SectionDomain() = default;
  virtual int sdim() const = 0;  // n-1: 1 or 2
  virtual Vec bbox_lo() const = 0;
  virtual Vec bbox_hi() const = 0;
  // > 0 inside; behaves like a distance to relbd K_0 near the boundary
  virtual double margin(const Vec& x) const = 0;
  virtual double inradius() const = 0;
  virtual Vec anchor() const = 0;
};

// n = 2: K_0 is an interval, margins exact.
class IntervalDomain final : public SectionDomain {
 public:
  IntervalDomain(double lo, double hi);
  int sdim() const override { return 1; }
  Vec bbox_lo() const override;
  Vec bbox_hi() const override;
  double margin(const Vec& x) const override { return std::min(x[0] - lo_, hi_ - x[0]); }
  double inradius() const override { return 0.5 * (hi_ - lo_); }
  Vec anchor() const override;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_;
};

// n = 3, analytic case: projected ellipse {x : (x-c)^T Q (x-c) <= 1}.
class EllipseDomain final : public SectionDomain {
 public:
  EllipseDomain(Vec center, Mat quad_form);
  int sdim() const override { return 2; }
  Vec bbox_lo() const override { return lo_; }
  Vec bbox_hi() const override { return hi_; }
  double margin(const Vec& x) const override;
  double inradius() const override { return scale_; }
  Vec anchor() const override { return c_; }

 private:
  Vec c_;
  Mat Q_;
  Vec lo_, hi_;
  double scale_;  // shortest semi-axis
};

// n = 3, generic case: the projected body described by support values over a
// uniform fan of plane directions; margin(x) = min_k (h_k - <x, d_k>).
class SupportFanDomain final : public SectionDomain {
 public:
  // support_values[k] = support of K_0 along angle 2*pi*k/M; M divisible by 4
  SupportFanDomain(Vec anchor, std::vector<double> support_values);
  int sdim() const override { return 2; }
  Vec bbox_lo() const override { return lo_; }
  Vec bbox_hi() const override { return hi_; }
  double margin(const Vec& x) const override;
  double inradius() const override { return scale_; }
  Vec anchor() const override { return anchor_; }

 private:
  Vec anchor_;
  std::vector<double> h_, dx_, dy_;
  Vec lo_, hi_;
  double scale_;
};

}  // namespace affsurf
