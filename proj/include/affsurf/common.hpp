// Shared types, errors, and small numeric helpers.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace affsurf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error("input error: " + msg) {}
};

struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& msg) : std::runtime_error("geometry error: " + msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// volume of the n-dimensional Euclidean unit ball
inline double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

inline void require_unit(const Vec& u, const char* what) {
  if (std::abs(u.norm() - 1.0) > 1e-9) throw InputError(std::string(what) + ": direction must be a unit vector");
}

// Fixed-shape pairwise reduction keyed by index; result is independent of how
// the values were produced (serial or parallel fill).
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

// Round-trippable decimal form; used by every writer so outputs are
// byte-stable for a given build.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

}  // namespace affsurf
