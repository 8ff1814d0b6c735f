#pragma once

// Decision rules on the LS-tuple and the quantile functions they need.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "depthgate/ls_core.hpp"
#include "depthgate/model.hpp"
#include "depthgate/numfmt.hpp"

namespace depthgate {

// ---------------------------------------------------------------------------
// Distributions

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail of chi-squared with one degree of freedom.
inline double chi2_1_sf(double x) { return x <= 0.0 ? 1.0 : std::erfc(std::sqrt(0.5 * x)); }

/// Two-sided Gaussian tail 2(1 - Phi(|z|)).
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

/// Standard normal quantile: Acklam's rational approximation plus one Halley step.
inline double inv_norm(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DataError(ErrorKind::invalid_argument, "inv_norm needs p in (0,1)");
  if (p > 0.5) return -inv_norm(1.0 - p);
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  if (x == 0.0) return 0.0;
  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

inline double inv_chi2_1(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DataError(ErrorKind::invalid_argument, "inv_chi2_1 needs p in (0,1)");
  const double z = inv_norm(0.5 * (1.0 + p));
  return z * z;
}

// ---------------------------------------------------------------------------
// Contraction values

inline double gamma1(std::size_t m, std::size_t n) {
  const double mm = static_cast<double>(m), nn = static_cast<double>(n);
  return std::sqrt(inv_chi2_1(0.95) * (mm + nn) / (12.0 * mm * nn));
}

inline double contraction_xi(std::size_t m, std::size_t n, ContractionRule::Xi rule) {
  const double mm = static_cast<double>(m), nn = static_cast<double>(n);
  switch (rule) {
    case ContractionRule::Xi::exp_neg_100: return std::exp(-100.0 * (mm + nn) / (mm * nn));
    case ContractionRule::Xi::zero: return 0.0;
    case ContractionRule::Xi::one: return 1.0;
  }
  return 0.0;
}

inline double contraction_delta(std::size_t m, std::size_t n, ContractionRule::Delta rule) {
  const double mm = static_cast<double>(m), nn = static_cast<double>(n);
  const double rate = std::pow((mm + nn) / (mm * nn), 0.75);
  if (rule == ContractionRule::Delta::rate_three_quarters) return rate;
  return std::min(rate * std::log(mm * nn / (mm + nn)), gamma1(m, n));
}

inline double gamma2(std::size_t m, std::size_t n, ContractionRule rule = {}) {
  const double xi = contraction_xi(m, n, rule.xi);
  return (1.0 - xi) * contraction_delta(m, n, rule.delta) + xi * gamma1(m, n);
}

// ---------------------------------------------------------------------------
// Names

inline const char* to_string(Method m) {
  switch (m) {
    case Method::proj_pq: return "proj-pq";
    case Method::proj_qp: return "proj-qp";
    case Method::difference: return "difference";
    case Method::maximum: return "maximum";
    case Method::ellipsoid: return "ellipsoid";
    case Method::joint_tp: return "joint-tp";
    case Method::joint_cc: return "joint-cc";
  }
  return "unknown";
}

/// "ellipsoid:0.3" style name; weight shown only for the ellipsoid.
inline std::string format_method(const TestConfig& c) {
  if (c.method == Method::ellipsoid) return "ellipsoid:" + format_double(c.weight);
  return to_string(c.method);
}

inline TestConfig parse_method(std::string_view text, double alpha = 0.05) {
  TestConfig c;
  c.alpha = alpha;
  if (text == "proj-pq") c.method = Method::proj_pq;
  else if (text == "proj-qp") c.method = Method::proj_qp;
  else if (text == "difference") c.method = Method::difference;
  else if (text == "maximum") c.method = Method::maximum;
  else if (text == "joint-tp") c.method = Method::joint_tp;
  else if (text == "joint-cc") c.method = Method::joint_cc;
  else if (text == "ellipsoid") c.method = Method::ellipsoid;
  else if (text.starts_with("ellipsoid:")) {
    c.method = Method::ellipsoid;
    c.weight = parse_double(text.substr(10), "ellipsoid weight");
  } else {
    throw DataError(ErrorKind::parse, "unknown method '" + std::string(text) + "'");
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Decisions

struct Thresholds {
  double z = 0.0;        // z_{1-alpha/2}
  double chi2 = 0.0;     // chi2_1 quantile at 1-alpha
  double chi2_95 = 0.0;  // chi2_1 quantile at 0.95
  double gamma = 0.0;    // contraction of the active joint rule
  double bound_I = 0.0;  // half-width of the joint rectangle along the difference axis
};

/// The (I) half-width is sqrt(2)*z*sqrt((m+n)/(12mn)) = z*sqrt((m+n)/(6mn)), which
/// makes (I) equivalent to |diff_std| > z and puts the rectangle's lower corners
/// on the LS-maximum triangle.
inline Thresholds thresholds(std::size_t m, std::size_t n, const TestConfig& cfg) {
  cfg.validate();
  const double mm = static_cast<double>(m), nn = static_cast<double>(n);
  Thresholds th;
  th.z = inv_norm(1.0 - cfg.alpha / 2.0);
  th.chi2 = inv_chi2_1(1.0 - cfg.alpha);
  th.chi2_95 = inv_chi2_1(0.95);
  th.gamma = cfg.method == Method::joint_cc ? gamma2(m, n, cfg.rule) : gamma1(m, n);
  th.bound_I = th.z * std::sqrt((mm + nn) / (6.0 * mm * nn));
  return th;
}

inline TestOutcome decide(const LSTuple& t, const TestConfig& cfg) {
  t.validate();
  const Thresholds th = thresholds(t.m, t.n, cfg);
  const ScaledStatistics s = scaled_stats(t);
  const double u = t.ls_pq - 0.5, v = t.ls_qp - 0.5;

  TestOutcome out;
  out.method = cfg.method;
  out.alpha = cfg.alpha;
  auto& st = out.statistics;
  st["ls_pq"] = t.ls_pq;
  st["ls_qp"] = t.ls_qp;
  st["diff_std"] = s.diff_std;
  st["sum_centered"] = s.sum_centered;
  st["scale"] = s.scale;
  st["z"] = th.z;
  st["chi2"] = th.chi2;

  switch (cfg.method) {
    case Method::proj_pq:
    case Method::proj_qp: {
      const double stat = s.scale * (cfg.method == Method::proj_pq ? u : v);
      st["statistic"] = stat;
      out.reject = std::abs(stat) > th.z;
      out.p_value = two_sided_p(stat);
      break;
    }
    case Method::difference:
      st["statistic"] = s.diff_std;
      out.reject = std::abs(s.diff_std) > th.z;
      out.p_value = two_sided_p(s.diff_std);
      break;
    case Method::maximum:
    case Method::ellipsoid: {
      const double stat = cfg.method == Method::maximum
                              ? s.scale * s.scale * std::max(u * u, v * v)
                              : s.scale * s.scale * (cfg.weight * u * u + (1.0 - cfg.weight) * v * v);
      st["statistic"] = stat;
      if (cfg.method == Method::ellipsoid) st["weight"] = cfg.weight;
      out.reject = stat > th.chi2;
      out.p_value = chi2_1_sf(stat);
      break;
    }
    case Method::joint_tp:
    case Method::joint_cc: {
      const double along_sum = (t.ls_pq + t.ls_qp) / std::numbers::sqrt2;
      const double lower = std::numbers::sqrt2 * (0.5 - th.gamma);
      const double upper = std::numbers::sqrt2 * (0.5 + th.gamma);
      st["statistic"] = s.diff_std;
      st["gamma"] = th.gamma;
      st["gamma1"] = gamma1(t.m, t.n);
      st["chi2_95"] = th.chi2_95;
      st["bound_I"] = th.bound_I;
      st["sum_projection"] = along_sum;
      st["bound_II"] = lower;
      if (cfg.symmetric_cutoff) st["bound_II_upper"] = upper;
      const bool sum_ok = along_sum >= lower && (!cfg.symmetric_cutoff || along_sum <= upper);
      if (!sum_ok) {
        out.reject = true;
        out.below_resolution = true;
        out.p_value = 0.0;
      } else {
        out.reject = std::abs(s.diff_std) > th.z;
        out.p_value = two_sided_p(s.diff_std);
      }
      break;
    }
  }
  return out;
}

inline double p_value(const LSTuple& t, const TestConfig& cfg) { return decide(t, cfg).p_value; }

}  // namespace depthgate
