#include "affsurf/sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace affsurf {

namespace {

struct IcoMesh {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
};

IcoMesh base_icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoMesh m;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : raw) m.verts.push_back(Eigen::Vector3d(v[0], v[1], v[2]).normalized());
  const int f[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& ff : f) m.faces.push_back({ff[0], ff[1], ff[2]});
  return m;
}

IcoMesh subdivide(const IcoMesh& in) {
  IcoMesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> midpoints;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    Eigen::Vector3d v = (out.verts[a] + out.verts[b]).normalized();
    out.verts.push_back(v);
    int idx = static_cast<int>(out.verts.size()) - 1;
    midpoints.emplace(key, idx);
    return idx;
  };
  for (const auto& f : in.faces) {
    int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
    out.faces.push_back({f[0], a, c});
    out.faces.push_back({f[1], b, a});
    out.faces.push_back({f[2], c, b});
    out.faces.push_back({a, b, c});
  }
  return out;
}

IcoMesh icosphere(int level) {
  IcoMesh m = base_icosahedron();
  for (int i = 0; i < level; ++i) m = subdivide(m);
  return m;
}

// spherical triangle area (L'Huilier)
double spherical_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  auto arc = [](const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * (u - v).norm()));
  };
  const double la = arc(b, c), lb = arc(c, a), lc = arc(a, b);
  const double s = 0.5 * (la + lb + lc);
  const double t = std::tan(0.5 * s) * std::tan(0.5 * (s - la)) * std::tan(0.5 * (s - lb)) *
                   std::tan(0.5 * (s - lc));
  return 4.0 * std::atan(std::sqrt(std::max(t, 0.0)));
}

}  // namespace

std::vector<Vec> direction_set(int dim, int count) {
  std::vector<Vec> dirs;
  if (dim == 2) {
    count = std::max(count, 8);
    dirs.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * M_PI * i / count;
      Vec u(2);
      u << std::cos(th), std::sin(th);
      dirs.push_back(u);
    }
    return dirs;
  }
  if (dim == 3) {
    int level = 0;
    auto verts_at = [](int lv) { return lv == 0 ? 12 : 10 * (1 << (2 * lv)) + 2; };
    while (verts_at(level) < count && level < 4) ++level;
    IcoMesh m = icosphere(level);
    for (const auto& v : m.verts) {
      Vec u(3);
      u << v[0], v[1], v[2];
      dirs.push_back(u);
    }
    return dirs;
  }
  throw InputError("direction_set: dim must be 2 or 3");
}

SphereRule icosphere_rule(int level) {
  IcoMesh m = icosphere(level);
  SphereRule rule;
  rule.nodes.reserve(m.faces.size());
  rule.weights.reserve(m.faces.size());
  for (const auto& f : m.faces) {
    const auto &a = m.verts[f[0]], &b = m.verts[f[1]], &c = m.verts[f[2]];
    Eigen::Vector3d ctr = (a + b + c).normalized();
    Vec u(3);
    u << ctr[0], ctr[1], ctr[2];
    rule.nodes.push_back(u);
    rule.weights.push_back(spherical_area(a, b, c));
  }
  return rule;
}

Mat frame_rotation(const Vec& xi) {
  require_unit(xi, "frame_rotation");
  const int n = static_cast<int>(xi.size());
  Vec en = Vec::Zero(n);
  en[n - 1] = 1.0;
  Mat flip = Mat::Identity(n, n);
  flip(n - 1, n - 1) = -1.0;
  Vec v = xi + en;
  if (v.norm() < 1e-8) {  // xi == -e_n: reflect through e_1
    v = Vec::Zero(n);
    v[0] = 1.0;
  }
  v.normalize();
  const Mat householder = Mat::Identity(n, n) - 2.0 * v * v.transpose();
  return flip * householder;  // maps xi -> e_n, det = +1
}

}  // namespace affsurf
