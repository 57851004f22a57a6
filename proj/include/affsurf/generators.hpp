// Generator functions phi in Conc(0,inf) / psi in Conv(0,inf), their
// transforms F(t)=phi(t^{n+1}) / G(t)=psi(t^{n+1}), and numeric class checks.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "affsurf/common.hpp"

namespace affsurf {

enum class GeneratorFamily { PowerConc, PowerConv, Constant, Tabulated };
enum class ClassTag { Conc, Conv };

struct ClassReport {
  bool in_class = false;      // phi in Conc / psi in Conv
  bool transform_ok = false;  // F concave / G convex
  bool strict = false;        // transform second difference bounded away from 0
  std::string detail;
};

class Generator {
 public:
  static Generator power_conc(double p, int dim_n);   // phi(t) = t^{p/(n+p)}, p > 0
  static Generator power_conv(double p, int dim_n);   // psi(t) = t^{p/(n+p)}, p in (-n, 0)
  static Generator constant(double c, int dim_n, ClassTag tag = ClassTag::Conc);
  static Generator tabulated(std::vector<double> knots_t, std::vector<double> knots_v,
                             int dim_n, ClassTag tag, std::string name);

  GeneratorFamily family() const { return family_; }
  ClassTag class_tag() const { return tag_; }
  int dim_n() const { return n_; }
  double power() const { return p_; }  // PowerConc/PowerConv only

  // phi(t) or psi(t); t = 0 gives 0 for Conc, +inf for Conv (constants give c)
  double eval(double t) const;
  // F(t) = phi(t^{n+1}) or G(t) = psi(t^{n+1})
  double transform_eval(double t) const;

  ClassReport validate_class() const;

  std::string name() const { return name_; }
  std::string to_json_string() const;
  static Generator from_json_string(const std::string& js);

 private:
  Generator() = default;
  GeneratorFamily family_ = GeneratorFamily::Constant;
  ClassTag tag_ = ClassTag::Conc;
  int n_ = 2;
  double p_ = 0.0;  // exponent parameter or constant value
  std::vector<double> kt_, kv_;  // tabulated knots
  std::vector<double> slopes_;   // PCHIP slopes in (ln t, v)
  std::string name_;
};

}  // namespace affsurf
