// Graph-function jets and the pointwise quantities built from them.
#pragma once

#include "affsurf/common.hpp"

namespace affsurf {

enum class DerivativeMode { Analytic, FiniteDifference };

struct JetEvaluation {
  double value = 0.0;
  Vec gradient;  // dimension n-1
  Mat hessian;   // (n-1) x (n-1), symmetric
  DerivativeMode mode = DerivativeMode::Analytic;
};

// <f>(x) = f(x) - <x, grad f(x)>
double support_bracket(const JetEvaluation& j, const Vec& x);

// |det d^2 f| / <f>^{n+1}, computed as det(-d^2 f) with eigenvalues clamped to
// [0, inf). Throws GeometryError when the support bracket is nonpositive.
double curvature_ratio(const JetEvaluation& j, const Vec& x);

// kappa = |det d^2 f| / (1 + |grad f|^2)^{(n+1)/2}
double gauss_curvature(const JetEvaluation& j);

// det of a symmetric matrix after clamping small negative eigenvalues to zero
double det_psd_clamped(const Mat& s);

// 2 det((A+B)/2)^{1/(n+1)} - det(A)^{1/(n+1)} - det(B)^{1/(n+1)} for
// (n-1)x(n-1) symmetric PSD matrices; nonnegative, zero iff A = B when one of
// them is positive definite.
double det_root_gap(const Mat& a, const Mat& b);

}  // namespace affsurf
