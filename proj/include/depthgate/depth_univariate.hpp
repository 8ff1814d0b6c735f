#pragma once

// Exact univariate depths. Both depths are ratios of integer counts; the
// counting helpers operate on any sorted span so the integrated functional
// depths can reuse them column by column.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "depthgate/error.hpp"

namespace depthgate {

/// Exact ratio num/den of two integer counts.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

inline std::int64_t choose2(std::int64_t k) noexcept { return k * (k - 1) / 2; }

/// Sorted, finite univariate sample.
class SortedSample1D {
 public:
  explicit SortedSample1D(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DataError(ErrorKind::empty_sample, "univariate sample is empty");
    for (double v : values_)
      if (!std::isfinite(v)) throw DataError(ErrorKind::non_finite, "univariate sample contains a non-finite value");
    std::sort(values_.begin(), values_.end());
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

namespace univariate {

/// #{v < x} in a sorted span.
inline std::size_t count_below(std::span<const double> sorted, double x) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

/// #{v > x} in a sorted span.
inline std::size_t count_above(std::span<const double> sorted, double x) {
  return static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x));
}

/// min(#{v <= x}, #{v >= x}) over m.
inline Ratio tukey(std::span<const double> sorted, double x) {
  const auto m = static_cast<std::int64_t>(sorted.size());
  const auto below = static_cast<std::int64_t>(count_below(sorted, x));
  const auto above = static_cast<std::int64_t>(count_above(sorted, x));
  return {std::min(m - below, m - above), m};
}

/// Fraction of the C(m,2) closed intervals [X_i, X_j] that contain x.
inline Ratio simplicial(std::span<const double> sorted, double x) {
  const auto m = static_cast<std::int64_t>(sorted.size());
  const auto b = static_cast<std::int64_t>(count_below(sorted, x));
  const auto a = static_cast<std::int64_t>(count_above(sorted, x));
  return {choose2(m) - choose2(b) - choose2(a), choose2(m)};
}

}  // namespace univariate

inline Ratio tukey1d_ratio(double x, const SortedSample1D& s) {
  if (s.size() == 0) throw ComputeError(ErrorKind::empty_sample, "Tukey depth needs a nonempty sample");
  if (!std::isfinite(x)) throw DataError(ErrorKind::non_finite, "query is not finite");
  return univariate::tukey(s.values(), x);
}

/// Univariate halfspace depth min(#{X_i <= x}, #{X_i >= x}) / m.
inline double tukey1d(double x, const SortedSample1D& s) { return tukey1d_ratio(x, s).value(); }

inline Ratio simplicial1d_ratio(double x, const SortedSample1D& s) {
  if (s.size() < 2) throw ComputeError(ErrorKind::invalid_argument, "simplicial depth needs m >= 2");
  if (!std::isfinite(x)) throw DataError(ErrorKind::non_finite, "query is not finite");
  return univariate::simplicial(s.values(), x);
}

/// Univariate simplicial depth over closed intervals, from the counts of
/// sample values strictly below and strictly above x.
inline double simplicial1d(double x, const SortedSample1D& s) { return simplicial1d_ratio(x, s).value(); }

/// Kernel of the univariate simplicial depth: x in [min(a,b), max(a,b)].
struct IntervalKernel {
  bool operator()(double x, double a, double b) const noexcept { return std::min(a, b) <= x && x <= std::max(a, b); }
};

/// Order-2 U-statistic by full enumeration of all pairs.
template <class PairKernel = IntervalKernel>
Ratio brute_ustat_1d_ratio(double x, const SortedSample1D& s, PairKernel kernel = {}) {
  if (s.size() < 2) throw ComputeError(ErrorKind::invalid_argument, "pair U-statistic needs m >= 2");
  const auto v = s.values();
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (kernel(x, v[i], v[j])) ++hits;
  return {hits, choose2(static_cast<std::int64_t>(v.size()))};
}

template <class PairKernel = IntervalKernel>
double brute_ustat_1d(double x, const SortedSample1D& s, PairKernel kernel = {}) {
  return brute_ustat_1d_ratio(x, s, kernel).value();
}

}  // namespace depthgate
