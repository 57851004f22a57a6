#include "affsurf/jets.hpp"

#include <cmath>

namespace affsurf {

double support_bracket(const JetEvaluation& j, const Vec& x) {
  return j.value - x.dot(j.gradient);
}

double det_psd_clamped(const Mat& s) {
  const int d = static_cast<int>(s.rows());
  if (d == 1) return std::max(s(0, 0), 0.0);
  if (d == 2) {
    const double tr = s(0, 0) + s(1, 1);
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double l1 = std::max(0.5 * (tr + disc), 0.0);
    const double l2 = std::max(0.5 * (tr - disc), 0.0);
    return l1 * l2;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  double det = 1.0;
  for (int i = 0; i < d; ++i) det *= std::max(es.eigenvalues()[i], 0.0);
  return det;
}

double curvature_ratio(const JetEvaluation& j, const Vec& x) {
  const double br = support_bracket(j, x);
  if (!(br > 0.0)) throw GeometryError("support bracket nonpositive (origin not interior?)");
  const int n = static_cast<int>(x.size()) + 1;
  const double det = det_psd_clamped(Mat(-j.hessian));
  return det / std::pow(br, n + 1);
}

double gauss_curvature(const JetEvaluation& j) {
  const int n = static_cast<int>(j.gradient.size()) + 1;
  const double det = det_psd_clamped(Mat(-j.hessian));
  const double denom = std::pow(1.0 + j.gradient.squaredNorm(), 0.5 * (n + 1));
  return det / denom;
}

double det_root_gap(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw InputError("det_root_gap: matrices must be square and equal size");
  const double sa = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1.0});
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sa ||
      (b - b.transpose()).cwiseAbs().maxCoeff() > 1e-10 * sa)
    throw InputError("det_root_gap: matrices must be symmetric");
  auto clamped_det = [](const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    double det = 1.0;
    for (int i = 0; i < m.rows(); ++i) {
      const double l = es.eigenvalues()[i];
      if (l < -1e-10) throw InputError("det_root_gap: matrix not PSD");
      det *= std::max(l, 0.0);
    }
    return det;
  };
  const int s = static_cast<int>(a.rows());
  const double root = 1.0 / (s + 2.0);  // matrices are (n-1)x(n-1), exponent 1/(n+1)
  const Mat mid = 0.5 * (a + b);
  // grouped so the result is exactly symmetric in (a, b)
  return 2.0 * std::pow(clamped_det(mid), root) -
         (std::pow(clamped_det(a), root) + std::pow(clamped_det(b), root));
}

}  // namespace affsurf
