#include "affsurf/generators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace affsurf {

namespace {

std::string trim_num(double x) {
  std::string s = format_double(x);
  return s;
}

// Fritsch-Carlson monotone slopes for samples (s_i, v_i)
std::vector<double> pchip_slopes(const std::vector<double>& s, const std::vector<double>& v) {
  const int n = static_cast<int>(s.size());
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> delta(n - 1);
  for (int i = 0; i + 1 < n; ++i) delta[i] = (v[i + 1] - v[i]) / (s[i + 1] - s[i]);
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (int i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * (s[i + 1] - s[i]) + (s[i] - s[i - 1]);
      const double w2 = (s[i + 1] - s[i]) + 2.0 * (s[i] - s[i - 1]);
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  return d;
}

double pchip_eval(const std::vector<double>& s, const std::vector<double>& v,
                  const std::vector<double>& d, double x) {
  const int n = static_cast<int>(s.size());
  int j = static_cast<int>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) - 1;
  j = std::clamp(j, 0, n - 2);
  const double h = s[j + 1] - s[j];
  const double t = (x - s[j]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * v[j] + h10 * h * d[j] + h01 * v[j + 1] + h11 * h * d[j + 1];
}

std::vector<double> log_probe_grid(int count = 200, double lo = 1e-6, double hi = 1e6) {
  std::vector<double> ts(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i) ts[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  return ts;
}

// normalized second divided differences over consecutive probe triples
std::vector<double> second_differences(const std::vector<double>& ts,
                                       const std::vector<double>& vs) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 2 < ts.size(); ++i) {
    const double d01 = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i]);
    const double d12 = (vs[i + 2] - vs[i + 1]) / (ts[i + 2] - ts[i + 1]);
    const double dd = (d12 - d01) / (ts[i + 2] - ts[i]);
    const double scale = std::max(std::abs(vs[i + 1]), 1e-300);
    out.push_back(dd * ts[i + 1] * ts[i + 1] / scale);
  }
  return out;
}

}  // namespace

Generator Generator::power_conc(double p, int dim_n) {
  if (!(p > 0.0)) throw InputError("PowerConc requires p > 0");
  Generator g;
  g.family_ = GeneratorFamily::PowerConc;
  g.tag_ = ClassTag::Conc;
  g.n_ = dim_n;
  g.p_ = p;
  g.name_ = "conc:" + trim_num(p);
  return g;
}

Generator Generator::power_conv(double p, int dim_n) {
  if (!(p > -dim_n && p < 0.0)) throw InputError("PowerConv requires p in (-n, 0)");
  Generator g;
  g.family_ = GeneratorFamily::PowerConv;
  g.tag_ = ClassTag::Conv;
  g.n_ = dim_n;
  g.p_ = p;
  g.name_ = "conv:" + trim_num(p);
  return g;
}

Generator Generator::constant(double c, int dim_n, ClassTag tag) {
  if (!(c > 0.0)) throw InputError("Constant generator requires c > 0");
  Generator g;
  g.family_ = GeneratorFamily::Constant;
  g.tag_ = tag;
  g.n_ = dim_n;
  g.p_ = c;
  g.name_ = "const:" + trim_num(c);
  return g;
}

Generator Generator::tabulated(std::vector<double> kt, std::vector<double> kv, int dim_n,
                               ClassTag tag, std::string name) {
  if (kt.size() != kv.size() || kt.size() < 4) throw InputError("Tabulated: need >= 4 knots");
  for (std::size_t i = 0; i < kt.size(); ++i) {
    if (!(kt[i] > 0.0) || !(kv[i] > 0.0)) throw InputError("Tabulated: knots must be positive");
    if (i && kt[i] <= kt[i - 1]) throw InputError("Tabulated: knot abscissae must increase");
  }
  Generator g;
  g.family_ = GeneratorFamily::Tabulated;
  g.tag_ = tag;
  g.n_ = dim_n;
  g.kt_ = std::move(kt);
  g.kv_ = std::move(kv);
  std::vector<double> s(g.kt_.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::log(g.kt_[i]);
  g.slopes_ = pchip_slopes(s, g.kv_);
  g.name_ = "tab:" + name;
  return g;
}

double Generator::eval(double t) const {
  if (t < 0.0) throw InputError("generator argument must be nonnegative");
  switch (family_) {
    case GeneratorFamily::Constant:
      return p_;
    case GeneratorFamily::PowerConc: {
      if (t == 0.0) return 0.0;
      return std::pow(t, p_ / (n_ + p_));
    }
    case GeneratorFamily::PowerConv: {
      if (t == 0.0) return kInf;
      return std::pow(t, p_ / (n_ + p_));
    }
    case GeneratorFamily::Tabulated: {
      if (t == 0.0) return tag_ == ClassTag::Conc ? 0.0 : kInf;
      const double tlo = kt_.front(), thi = kt_.back();
      std::vector<double> s(kt_.size());
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::log(kt_[i]);
      if (t < tlo) {  // power-law continuation from the end slope in log-log
        const double sl = (std::log(kv_[1]) - std::log(kv_[0])) / (s[1] - s[0]);
        return kv_.front() * std::pow(t / tlo, sl);
      }
      if (t > thi) {
        const std::size_t m = kv_.size();
        const double sl = (std::log(kv_[m - 1]) - std::log(kv_[m - 2])) / (s[m - 1] - s[m - 2]);
        return kv_.back() * std::pow(t / thi, sl);
      }
      return std::max(pchip_eval(s, kv_, slopes_, std::log(t)), 1e-300);
    }
  }
  return 0.0;
}

double Generator::transform_eval(double t) const {
  if (t < 0.0) throw InputError("generator argument must be nonnegative");
  if (family_ == GeneratorFamily::PowerConc || family_ == GeneratorFamily::PowerConv) {
    // direct power avoids overflow of t^{n+1} at probe extremes
    if (t == 0.0) return eval(0.0);
    return std::pow(t, (n_ + 1.0) * p_ / (n_ + p_));
  }
  return eval(std::pow(t, n_ + 1.0));
}

ClassReport Generator::validate_class() const {
  ClassReport rep;
  if (family_ == GeneratorFamily::Constant) {
    rep.in_class = true;       // nonzero constants belong to both classes
    rep.transform_ok = true;   // constant transform is concave and convex
    rep.strict = false;
    rep.detail = "constant";
    return rep;
  }
  // For tabulated generators the checks run on the knot data itself: F at
  // s = t^{1/(n+1)} equals phi(t) exactly, so no interpolation error enters.
  const auto ts = family_ == GeneratorFamily::Tabulated ? kt_ : log_probe_grid();
  std::vector<double> phi(ts.size()), F(ts.size()), ss(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    phi[i] = eval(ts[i]);
    F[i] = phi[i];
    ss[i] = std::pow(ts[i], 1.0 / (n_ + 1.0));
  }
  const auto dd_phi = second_differences(ts, phi);
  const auto dd_F = second_differences(ss, F);
  constexpr double kCurveTol = 1e-9;
  constexpr double kStrictTol = 1e-6;
  std::ostringstream detail;
  if (tag_ == ClassTag::Conc) {
    bool increasing = true;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i)
      if (phi[i + 1] < phi[i] * (1.0 - 1e-12)) increasing = false;
    const double slope_proxy = phi.front() / ts.front();
    const bool vanishing_ratio = phi.back() / ts.back() <= 1e-3 * slope_proxy;
    bool concave = true;
    for (double d : dd_phi)
      if (d > kCurveTol) concave = false;
    rep.in_class = increasing && vanishing_ratio && concave;
    bool F_concave = true, F_increasing = true, strict = true;
    for (double d : dd_F) {
      if (d > kCurveTol) F_concave = false;
      if (d > -kStrictTol) strict = false;
    }
    for (std::size_t i = 0; i + 1 < F.size(); ++i)
      if (F[i + 1] < F[i] * (1.0 - 1e-12)) F_increasing = false;
    rep.transform_ok = F_concave && F_increasing;
    rep.strict = rep.transform_ok && strict;
    if (!increasing) detail << "phi not increasing;";
    if (!vanishing_ratio) detail << "phi(t)/t does not vanish;";
    if (!concave) detail << "phi not concave;";
    if (!F_concave) detail << "F not concave;";
  } else {
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i)
      if (phi[i + 1] > phi[i] * (1.0 + 1e-12)) decreasing = false;
    const double mid = eval(1.0);
    const bool blows_up = eval(1e-6) >= 10.0 * mid;
    const bool vanishes = eval(1e6) <= 0.1 * mid;
    bool convex = true;
    for (double d : dd_phi)
      if (d < -kCurveTol) convex = false;
    rep.in_class = decreasing && blows_up && vanishes && convex;
    bool G_convex = true, G_decreasing = true, strict = true;
    for (double d : dd_F) {
      if (d < -kCurveTol) G_convex = false;
      if (d < kStrictTol) strict = false;
    }
    for (std::size_t i = 0; i + 1 < F.size(); ++i)
      if (F[i + 1] > F[i] * (1.0 + 1e-12)) G_decreasing = false;
    rep.transform_ok = G_convex && G_decreasing;
    rep.strict = rep.transform_ok && strict;
    if (!decreasing) detail << "psi not decreasing;";
    if (!blows_up) detail << "psi(0+) not large;";
    if (!vanishes) detail << "psi(inf) not small;";
    if (!convex) detail << "psi not convex;";
    if (!G_convex) detail << "G not convex;";
  }
  rep.detail = detail.str();
  return rep;
}

std::string Generator::to_json_string() const {
  nlohmann::json j;
  j["n"] = n_;
  switch (family_) {
    case GeneratorFamily::PowerConc:
      j["family"] = "PowerConc";
      j["p"] = p_;
      break;
    case GeneratorFamily::PowerConv:
      j["family"] = "PowerConv";
      j["p"] = p_;
      break;
    case GeneratorFamily::Constant:
      j["family"] = "Constant";
      j["c"] = p_;
      j["class"] = tag_ == ClassTag::Conc ? "Conc" : "Conv";
      break;
    case GeneratorFamily::Tabulated:
      j["family"] = "Tabulated";
      j["knots_t"] = kt_;
      j["knots_v"] = kv_;
      j["class"] = tag_ == ClassTag::Conc ? "Conc" : "Conv";
      j["name"] = name_.substr(4);
      break;
  }
  return j.dump();
}

Generator Generator::from_json_string(const std::string& js) {
  const auto j = nlohmann::json::parse(js);
  const std::string fam = j.at("family").get<std::string>();
  const int n = j.at("n").get<int>();
  if (fam == "PowerConc") return power_conc(j.at("p").get<double>(), n);
  if (fam == "PowerConv") return power_conv(j.at("p").get<double>(), n);
  if (fam == "Constant") {
    const auto tag = j.value("class", "Conc") == std::string("Conv") ? ClassTag::Conv : ClassTag::Conc;
    return constant(j.at("c").get<double>(), n, tag);
  }
  if (fam == "Tabulated") {
    const auto tag = j.value("class", "Conc") == std::string("Conv") ? ClassTag::Conv : ClassTag::Conc;
    return tabulated(j.at("knots_t").get<std::vector<double>>(),
                     j.at("knots_v").get<std::vector<double>>(), n, tag,
                     j.value("name", "unnamed"));
  }
  throw ConfigError("unknown generator family: " + fam);
}

}  // namespace affsurf
