#pragma once

// Functional depths on grid-sampled curves. Each depth is a small evaluator
// object built once per reference sample; the constructor does the per-sample
// work (sorted pointwise columns, pairwise distances, bandwidth, projections)
// and the call operator is const and thread-safe.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "depthgate/depth_univariate.hpp"
#include "depthgate/model.hpp"
#include "depthgate/rng.hpp"

namespace depthgate {

/// Discretised L2[0,1] distance: root mean squared difference over jointly observed points.
inline double l2_distance(CurveView f, CurveView g) {
  if (f.size() != g.size()) throw DataError(ErrorKind::grid_mismatch, "curves have different lengths");
  const std::size_t n = f.size();
  if (f.fully_observed() && g.fully_observed()) {
    // Four partial sums keep the dependency chain short; the order is fixed.
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4)
      for (std::size_t k = 0; k < 4; ++k) {
        const double d = f.values[t + k] - g.values[t + k];
        acc[k] += d * d;
      }
    for (; t < n; ++t) {
      const double d = f.values[t] - g.values[t];
      acc[0] += d * d;
    }
    return std::sqrt(((acc[0] + acc[1]) + (acc[2] + acc[3])) / static_cast<double>(n));
  }
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (!f.observed(t) || !g.observed(t)) continue;
    const double d = f.values[t] - g.values[t];
    acc += d * d;
    ++count;
  }
  if (count == 0) throw ComputeError(ErrorKind::degenerate, "curves share no observed grid point");
  return std::sqrt(acc / static_cast<double>(count));
}

inline double gaussian_kernel(double u) noexcept { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }

/// Linear-interpolation quantile of unsorted data.
inline double quantile_linear(std::vector<double> v, double q) {
  if (v.empty()) throw ComputeError(ErrorKind::empty_sample, "quantile of an empty set");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace detail {

inline void require_query(CurveView x, const FunctionalSample& s) {
  if (x.size() != s.grid_size())
    throw DataError(ErrorKind::grid_mismatch, "query curve has length " + std::to_string(x.size()) + ", grid has " +
                                                  std::to_string(s.grid_size()));
}

inline void require_unmasked(const FunctionalSample& s, const char* what) {
  if (s.has_missing())
    throw ComputeError(ErrorKind::unsupported, std::string(what) + " does not support partially observed curves");
}

inline void require_unmasked(CurveView x, const char* what) {
  if (!x.fully_observed())
    throw ComputeError(ErrorKind::unsupported, std::string(what) + " does not support partially observed curves");
}

/// Symmetric matrix of pairwise L2 distances, row-major.
inline std::vector<double> pairwise_l2(const FunctionalSample& s) {
  const std::size_t m = s.size();
  std::vector<double> d(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) d[i * m + j] = d[j * m + i] = l2_distance(s.curve(i), s.curve(j));
  return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Integrated depth

class IntegratedDepth {
 public:
  IntegratedDepth(const FunctionalSample& ref, InnerDepth inner, double jitter_sd = 1e-8, std::uint64_t seed = 0)
      : inner_(inner), grid_size_(ref.grid_size()), m_(ref.size()), full_(!ref.has_missing()) {
    const std::size_t T = grid_size_;
    offsets_.assign(T + 1, 0);
    for (std::size_t t = 0; t < T; ++t) {
      std::size_t c = 0;
      for (std::size_t i = 0; i < m_; ++i) c += ref.observed(i, t) ? 1 : 0;
      offsets_[t + 1] = offsets_[t] + c;
    }
    columns_.resize(offsets_[T]);
    Stream rng(derive_seed(hash_combine(fingerprint(ref), seed), 0, StreamTag::jitter));
    const bool jitter = inner_ == InnerDepth::simplicial_jittered && jitter_sd > 0.0;
    // Jitter is drawn in curve-major order so it does not depend on the column layout.
    std::vector<double> noise;
    if (jitter) {
      noise.resize(m_ * T);
      for (double& e : noise) e = rng.normal(0.0, jitter_sd);
    }
    for (std::size_t t = 0; t < T; ++t) {
      std::size_t k = offsets_[t];
      for (std::size_t i = 0; i < m_; ++i)
        if (ref.observed(i, t)) columns_[k++] = ref.value(i, t) + (jitter ? noise[i * T + t] : 0.0);
      std::sort(columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[t]),
                columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[t + 1]));
    }
  }

  double operator()(CurveView x) const {
    if (x.size() != grid_size_) throw DataError(ErrorKind::grid_mismatch, "query curve has wrong length");
    const std::size_t need = inner_ == InnerDepth::tukey ? 1 : 2;
    if (full_ && x.fully_observed()) {
      if (m_ < need) throw ComputeError(ErrorKind::degenerate, "no usable grid points for the integrated depth");
      // Exact: every grid point shares one denominator.
      std::int64_t num = 0;
      std::int64_t den = 1;
      for (std::size_t t = 0; t < grid_size_; ++t) {
        const Ratio r = pointwise(t, x.values[t]);
        num += r.num;
        den = r.den;
      }
      return static_cast<double>(num) / (static_cast<double>(den) * static_cast<double>(grid_size_));
    }
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t t = 0; t < grid_size_; ++t) {
      if (!x.observed(t)) continue;
      if (offsets_[t + 1] - offsets_[t] < need) continue;
      acc += pointwise(t, x.values[t]).value();
      ++used;
    }
    if (used == 0) throw ComputeError(ErrorKind::degenerate, "no usable grid points for the integrated depth");
    return acc / static_cast<double>(used);
  }

  double operator()(std::span<const double> values) const { return (*this)(CurveView{values, {}}); }

  std::span<const double> column(std::size_t t) const {
    return std::span<const double>(columns_).subspan(offsets_[t], offsets_[t + 1] - offsets_[t]);
  }

 private:
  Ratio pointwise(std::size_t t, double v) const {
    const auto col = column(t);
    return inner_ == InnerDepth::tukey ? univariate::tukey(col, v) : univariate::simplicial(col, v);
  }

  InnerDepth inner_;
  std::size_t grid_size_;
  std::size_t m_;
  bool full_;
  std::vector<std::size_t> offsets_;
  std::vector<double> columns_;
};

inline double integrated_depth(CurveView x, const FunctionalSample& s, InnerDepth inner, double jitter_sd = 1e-8,
                               std::uint64_t seed = 0) {
  detail::require_query(x, s);
  return IntegratedDepth(s, inner, jitter_sd, seed)(x);
}

// ---------------------------------------------------------------------------
// h-depth

/// Resolves a bandwidth against a reference sample.
inline double resolve_bandwidth(const Bandwidth& bw, std::span<const double> pairwise, std::size_t m) {
  if (bw.mode == Bandwidth::Mode::fixed) {
    if (!(bw.h > 0.0)) throw DataError(ErrorKind::invalid_argument, "bandwidth must be positive");
    return bw.h;
  }
  if (m < 2) throw ComputeError(ErrorKind::degenerate, "adaptive bandwidth needs m >= 2");
  std::vector<double> d;
  d.reserve(m * (m - 1) / 2);
  bool any_positive = false;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      d.push_back(pairwise[i * m + j]);
      any_positive |= pairwise[i * m + j] > 0.0;
    }
  if (!any_positive) throw ComputeError(ErrorKind::degenerate, "all pairwise distances are zero; adaptive bandwidth undefined");
  const double h = std::max(quantile_linear(std::move(d), bw.q), bw.floor);
  if (!(h > 0.0)) throw ComputeError(ErrorKind::degenerate, "adaptive bandwidth resolved to 0");
  return h;
}

class HDepth {
 public:
  HDepth(const FunctionalSample& ref, Bandwidth bw) : ref_(&ref), pairwise_(detail::pairwise_l2(ref)) {
    h_ = resolve_bandwidth(bw, pairwise_, ref.size());
  }

  double bandwidth() const noexcept { return h_; }

  double operator()(CurveView x) const {
    detail::require_query(x, *ref_);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref_->size(); ++i) acc += gaussian_kernel(l2_distance(x, ref_->curve(i)) / h_);
    return acc / (static_cast<double>(ref_->size()) * h_);
  }

  /// Depth of reference curve i, from the cached distances (same value as operator()(curve(i))).
  double self_depth(std::size_t i) const {
    const std::size_t m = ref_->size();
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += gaussian_kernel(pairwise_[i * m + j] / h_);
    return acc / (static_cast<double>(m) * h_);
  }

 private:
  const FunctionalSample* ref_;
  std::vector<double> pairwise_;
  double h_ = 1.0;
};

inline double h_depth(CurveView x, const FunctionalSample& s, Bandwidth bw) { return HDepth(s, bw)(x); }

// ---------------------------------------------------------------------------
// Spatial depth

inline double spatial_depth(CurveView x, const FunctionalSample& s) {
  detail::require_query(x, s);
  detail::require_unmasked(s, "spatial depth");
  detail::require_unmasked(x, "spatial depth");
  const std::size_t T = s.grid_size();
  std::vector<double> resultant(T, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const CurveView c = s.curve(i);
    const double d = l2_distance(x, c);
    if (d == 0.0) continue;
    for (std::size_t t = 0; t < T; ++t) resultant[t] += (x.values[t] - c.values[t]) / d;
  }
  double acc = 0.0;
  const double m = static_cast<double>(s.size());
  for (double r : resultant) acc += (r / m) * (r / m);
  return std::max(0.0, 1.0 - std::sqrt(acc / static_cast<double>(T)));
}

// ---------------------------------------------------------------------------
// Lens metric depth

class LensMetricDepth {
 public:
  explicit LensMetricDepth(const FunctionalSample& ref) : ref_(&ref), pairwise_(detail::pairwise_l2(ref)) {
    if (ref.size() < 2) throw ComputeError(ErrorKind::invalid_argument, "lens metric depth needs m >= 2");
  }

  double operator()(CurveView x) const {
    detail::require_query(x, *ref_);
    const std::size_t m = ref_->size();
    std::vector<double> to_x(m);
    for (std::size_t i = 0; i < m; ++i) to_x[i] = l2_distance(x, ref_->curve(i));
    return from_distances(to_x);
  }

  double self_depth(std::size_t k) const {
    const std::size_t m = ref_->size();
    return from_distances(std::span<const double>(pairwise_).subspan(k * m, m));
  }

 private:
  double from_distances(std::span<const double> to_x) const {
    const std::size_t m = ref_->size();
    std::int64_t hits = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (pairwise_[i * m + j] >= std::max(to_x[i], to_x[j])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(choose2(static_cast<std::int64_t>(m)));
  }

  const FunctionalSample* ref_;
  std::vector<double> pairwise_;
};

inline double lens_metric_depth(CurveView x, const FunctionalSample& s) { return LensMetricDepth(s)(x); }

// ---------------------------------------------------------------------------
// Random projections

/// Brownian paths on the grid, each scaled to unit discretised L2 norm.
inline std::vector<std::vector<double>> brownian_directions(const Grid& grid, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw DataError(ErrorKind::invalid_argument, "projection count must be >= 1");
  Stream rng(derive_seed(seed, grid.size(), StreamTag::directions));
  std::vector<std::vector<double>> dirs;
  dirs.reserve(k);
  const std::size_t T = grid.size();
  while (dirs.size() < k) {
    std::vector<double> v(T);
    double level = 0.0, prev = 0.0, norm2 = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      level += std::sqrt(grid[t] - prev) * rng.normal();
      prev = grid[t];
      v[t] = level;
      norm2 += level * level;
    }
    const double norm = std::sqrt(norm2 / static_cast<double>(T));
    if (!(norm > 0.0)) continue;
    for (double& e : v) e /= norm;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

inline double project(std::span<const double> x, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) acc += x[t] * v[t];
  return acc / static_cast<double>(x.size());
}

/// Random Tukey depth (minimum over projections) or random projection depth (mean).
class RandomProjectionDepth {
 public:
  enum class Aggregate { minimum, mean };

  RandomProjectionDepth(const FunctionalSample& ref, std::size_t k, std::uint64_t seed, Aggregate agg)
      : agg_(agg), m_(ref.size()), grid_size_(ref.grid_size()) {
    detail::require_unmasked(ref, "random projection depth");
    dirs_ = brownian_directions(ref.grid(), k, seed);
    projected_.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      projected_[j].resize(m_);
      for (std::size_t i = 0; i < m_; ++i) projected_[j][i] = project(ref.curve(i).values, dirs_[j]);
      std::sort(projected_[j].begin(), projected_[j].end());
    }
  }

  double operator()(CurveView x) const {
    if (x.size() != grid_size_) throw DataError(ErrorKind::grid_mismatch, "query curve has wrong length");
    detail::require_unmasked(x, "random projection depth");
    std::int64_t best = static_cast<std::int64_t>(m_), total = 0;
    for (std::size_t j = 0; j < dirs_.size(); ++j) {
      const Ratio r = univariate::tukey(projected_[j], project(x.values, dirs_[j]));
      best = std::min(best, r.num);
      total += r.num;
    }
    if (agg_ == Aggregate::minimum) return static_cast<double>(best) / static_cast<double>(m_);
    return static_cast<double>(total) / (static_cast<double>(m_) * static_cast<double>(dirs_.size()));
  }

  const std::vector<std::vector<double>>& directions() const noexcept { return dirs_; }

 private:
  Aggregate agg_;
  std::size_t m_;
  std::size_t grid_size_;
  std::vector<std::vector<double>> dirs_;
  std::vector<std::vector<double>> projected_;
};

inline double random_tukey_functional(CurveView x, const FunctionalSample& s, std::size_t k, std::uint64_t seed) {
  return RandomProjectionDepth(s, k, seed, RandomProjectionDepth::Aggregate::minimum)(x);
}

inline double random_projection_depth(CurveView x, const FunctionalSample& s, std::size_t k, std::uint64_t seed) {
  return RandomProjectionDepth(s, k, seed, RandomProjectionDepth::Aggregate::mean)(x);
}

}  // namespace depthgate
