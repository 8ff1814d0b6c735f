#pragma once

// Domain types shared by every module: grids, samples, depth and test
// configuration, tuples and outcomes. All types are immutable after
// construction and can be shared freely between threads.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "depthgate/error.hpp"

namespace depthgate {

// ---------------------------------------------------------------------------
// Grid

class Grid {
 public:
  explicit Grid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw DataError(ErrorKind::invalid_grid, "grid needs at least 2 points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double t = points_[i];
      if (!std::isfinite(t)) throw DataError(ErrorKind::invalid_grid, "grid point " + std::to_string(i) + " is not finite");
      if (t < 0.0 || t > 1.0) throw DataError(ErrorKind::invalid_grid, "grid point " + std::to_string(i) + " outside [0,1]");
      if (i > 0 && !(t > points_[i - 1]))
        throw DataError(ErrorKind::invalid_grid, "grid is not strictly increasing at index " + std::to_string(i));
    }
  }

  /// n equidistant points on [0,1], t_i = i/(n-1).
  static Grid equidistant(std::size_t n) {
    if (n < 2) throw DataError(ErrorKind::invalid_grid, "grid needs at least 2 points");
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    return Grid(std::move(pts));
  }

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

  bool is_equidistant(double tol = 1e-9) const {
    const double step = (points_.back() - points_.front()) / static_cast<double>(points_.size() - 1);
    for (std::size_t i = 1; i < points_.size(); ++i)
      if (std::abs(points_[i] - points_[i - 1] - step) > tol) return false;
    return true;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<double> points_;
};

// ---------------------------------------------------------------------------
// Curves

/// Non-owning view of one curve. An empty mask means fully observed.
struct CurveView {
  std::span<const double> values;
  std::span<const std::uint8_t> mask;

  bool observed(std::size_t t) const noexcept { return mask.empty() || mask[t] != 0; }
  bool fully_observed() const noexcept { return mask.empty(); }
  std::size_t size() const noexcept { return values.size(); }
};

/// Curves sampled on a shared grid, with optional per-point observation masks.
/// Masked-out values are stored as 0 and never read by mask-aware depths.
class FunctionalSample {
 public:
  FunctionalSample(Grid grid, std::vector<std::vector<double>> curves,
                   std::vector<std::vector<bool>> masks = {})
      : grid_(std::move(grid)), count_(curves.size()) {
    if (curves.empty()) throw DataError(ErrorKind::empty_sample, "functional sample has no curves");
    if (!masks.empty() && masks.size() != curves.size())
      throw DataError(ErrorKind::invalid_sample, "mask count differs from curve count");
    const std::size_t len = grid_.size();
    values_.reserve(count_ * len);
    bool any_missing = false;
    for (const auto& m : masks)
      for (bool b : m) any_missing |= !b;
    if (any_missing) mask_.reserve(count_ * len);
    for (std::size_t i = 0; i < count_; ++i) {
      if (curves[i].size() != len)
        throw DataError(ErrorKind::invalid_sample, "curve " + std::to_string(i) + " has length " +
                                                       std::to_string(curves[i].size()) + ", grid has " +
                                                       std::to_string(len));
      if (!masks.empty() && masks[i].size() != len)
        throw DataError(ErrorKind::invalid_sample, "mask " + std::to_string(i) + " has wrong length");
      std::size_t observed = 0;
      for (std::size_t t = 0; t < len; ++t) {
        const bool obs = masks.empty() || masks[i][t];
        if (obs) {
          if (!std::isfinite(curves[i][t]))
            throw DataError(ErrorKind::non_finite, "curve " + std::to_string(i) + " has a non-finite value at grid index " +
                                                       std::to_string(t));
          ++observed;
          values_.push_back(curves[i][t]);
        } else {
          values_.push_back(0.0);
        }
        if (any_missing) mask_.push_back(obs ? 1 : 0);
      }
      if (observed == 0)
        throw DataError(ErrorKind::invalid_sample, "curve " + std::to_string(i) + " has no observed points");
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return count_; }
  std::size_t grid_size() const noexcept { return grid_.size(); }
  bool has_missing() const noexcept { return !mask_.empty(); }

  CurveView curve(std::size_t i) const {
    const std::size_t len = grid_.size();
    CurveView v{std::span<const double>(values_).subspan(i * len, len), {}};
    if (!mask_.empty()) v.mask = std::span<const std::uint8_t>(mask_).subspan(i * len, len);
    return v;
  }

  double value(std::size_t i, std::size_t t) const { return values_[i * grid_.size() + t]; }
  bool observed(std::size_t i, std::size_t t) const { return mask_.empty() || mask_[i * grid_.size() + t] != 0; }

  std::span<const double> raw_values() const noexcept { return values_; }
  std::span<const std::uint8_t> raw_mask() const noexcept { return mask_; }

 private:
  Grid grid_;
  std::size_t count_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

// ---------------------------------------------------------------------------
// Points

class MultivariateSample {
 public:
  MultivariateSample(std::size_t dim, std::vector<std::vector<double>> points) : dim_(dim) {
    if (dim_ == 0) throw DataError(ErrorKind::invalid_sample, "dimension must be positive");
    if (points.empty()) throw DataError(ErrorKind::empty_sample, "multivariate sample has no points");
    values_.reserve(points.size() * dim_);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != dim_)
        throw DataError(ErrorKind::dimension_mismatch, "point " + std::to_string(i) + " has dimension " +
                                                           std::to_string(points[i].size()) + ", expected " +
                                                           std::to_string(dim_));
      for (double v : points[i]) {
        if (!std::isfinite(v)) throw DataError(ErrorKind::non_finite, "point " + std::to_string(i) + " is not finite");
        values_.push_back(v);
      }
    }
    count_ = points.size();
  }

  /// Univariate sample from plain values.
  static MultivariateSample univariate(std::span<const double> xs) {
    std::vector<std::vector<double>> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.push_back({x});
    return MultivariateSample(1, std::move(pts));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return count_; }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * dim_, dim_);
  }
  double coord(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }
  std::span<const double> raw_values() const noexcept { return values_; }

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> values_;
};

using Sample = std::variant<FunctionalSample, MultivariateSample>;

inline std::size_t sample_size(const Sample& s) {
  return std::visit([](const auto& x) { return x.size(); }, s);
}

/// Checks that two samples can be compared: same kind, identical grids or
/// identical dimension. Throws DataError otherwise.
inline void validate_pair(const FunctionalSample& a, const FunctionalSample& b) {
  if (a.grid().size() != b.grid().size())
    throw DataError(ErrorKind::grid_mismatch, "grids have different lengths (" + std::to_string(a.grid().size()) +
                                                  " vs " + std::to_string(b.grid().size()) + ")");
  if (!(a.grid() == b.grid())) throw DataError(ErrorKind::grid_mismatch, "grids differ");
}

inline void validate_pair(const MultivariateSample& a, const MultivariateSample& b) {
  if (a.dim() != b.dim())
    throw DataError(ErrorKind::dimension_mismatch,
                    "dimensions differ (" + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

inline void validate_pair(const Sample& a, const Sample& b) {
  if (a.index() != b.index()) throw DataError(ErrorKind::kind_mismatch, "cannot compare curves with points");
  if (const auto* fa = std::get_if<FunctionalSample>(&a))
    validate_pair(*fa, std::get<FunctionalSample>(b));
  else
    validate_pair(std::get<MultivariateSample>(a), std::get<MultivariateSample>(b));
}

// ---------------------------------------------------------------------------
// Depth specification

enum class DepthFamily {
  tukey,
  simplicial,
  simplicial_modified,
  spherical,
  lens,
  band,
  band_sum,
  integrated,
  h_depth,
  spatial,
  lens_metric,
  random_tukey,
  random_projection,
};

/// Pointwise univariate depth inside an integrated functional depth.
enum class InnerDepth { tukey, simplicial, simplicial_jittered };

enum class Kernel { gaussian };

struct Bandwidth {
  enum class Mode { fixed, adaptive };
  Mode mode = Mode::fixed;
  double h = 1.0;
  double q = 0.15;
  double floor = 1e-12;

  static Bandwidth fixed(double h) { return {Mode::fixed, h, 0.15, 1e-12}; }
  static Bandwidth adaptive(double q, double floor = 1e-12) { return {Mode::adaptive, 1.0, q, floor}; }

  friend bool operator==(const Bandwidth&, const Bandwidth&) = default;
};

/// Closed description of one depth function and its parameters.
struct DepthSpec {
  DepthFamily family = DepthFamily::tukey;
  InnerDepth inner = InnerDepth::tukey;
  Kernel kernel = Kernel::gaussian;
  Bandwidth bandwidth{};
  int order = 2;                 // band k, band-sum K, projection count
  double jitter_sd = 1e-8;       // variance 1e-16
  std::uint64_t seed = 0;
  std::size_t enumeration_cap = 2'000'000;

  static DepthSpec tukey() { return {DepthFamily::tukey}; }
  static DepthSpec simplicial() { return {DepthFamily::simplicial}; }
  static DepthSpec simplicial_modified(std::uint64_t seed = 0) {
    DepthSpec s{DepthFamily::simplicial_modified};
    s.seed = seed;
    return s;
  }
  static DepthSpec spherical() { return {DepthFamily::spherical}; }
  static DepthSpec lens() { return {DepthFamily::lens}; }
  static DepthSpec band(int k) {
    DepthSpec s{DepthFamily::band};
    s.order = k;
    return s;
  }
  static DepthSpec band_sum(int K) {
    DepthSpec s{DepthFamily::band_sum};
    s.order = K;
    return s;
  }
  static DepthSpec integrated(InnerDepth inner, std::uint64_t seed = 0) {
    DepthSpec s{DepthFamily::integrated};
    s.inner = inner;
    s.seed = seed;
    return s;
  }
  static DepthSpec h_depth(Bandwidth bw) {
    DepthSpec s{DepthFamily::h_depth};
    s.bandwidth = bw;
    return s;
  }
  static DepthSpec spatial() { return {DepthFamily::spatial}; }
  static DepthSpec lens_metric() { return {DepthFamily::lens_metric}; }
  static DepthSpec random_tukey(int k, std::uint64_t seed) {
    DepthSpec s{DepthFamily::random_tukey};
    s.order = k;
    s.seed = seed;
    return s;
  }
  static DepthSpec random_projection(int k, std::uint64_t seed) {
    DepthSpec s{DepthFamily::random_projection};
    s.order = k;
    s.seed = seed;
    return s;
  }

  bool randomized() const noexcept {
    return family == DepthFamily::random_tukey || family == DepthFamily::random_projection ||
           family == DepthFamily::simplicial_modified ||
           (family == DepthFamily::integrated && inner == InnerDepth::simplicial_jittered);
  }

  /// Families defined on curves only.
  bool functional_only() const noexcept {
    return family == DepthFamily::integrated || family == DepthFamily::h_depth || family == DepthFamily::spatial ||
           family == DepthFamily::lens_metric;
  }

  /// Families defined on points only.
  bool multivariate_only() const noexcept {
    return family == DepthFamily::tukey || family == DepthFamily::simplicial ||
           family == DepthFamily::simplicial_modified || family == DepthFamily::spherical ||
           family == DepthFamily::lens || family == DepthFamily::band || family == DepthFamily::band_sum;
  }

  void validate() const {
    if ((family == DepthFamily::band || family == DepthFamily::band_sum) && order < 2)
      throw DataError(ErrorKind::invalid_argument, "band depth needs k >= 2");
    if ((family == DepthFamily::random_tukey || family == DepthFamily::random_projection) && order < 1)
      throw DataError(ErrorKind::invalid_argument, "projection count must be >= 1");
    if (family == DepthFamily::h_depth) {
      if (bandwidth.mode == Bandwidth::Mode::fixed && !(bandwidth.h > 0.0 && std::isfinite(bandwidth.h)))
        throw DataError(ErrorKind::invalid_argument, "bandwidth h must be positive");
      if (bandwidth.mode == Bandwidth::Mode::adaptive && !(bandwidth.q > 0.0 && bandwidth.q < 1.0))
        throw DataError(ErrorKind::invalid_argument, "adaptive bandwidth quantile must lie in (0,1)");
      if (bandwidth.mode == Bandwidth::Mode::adaptive && !(bandwidth.floor >= 0.0))
        throw DataError(ErrorKind::invalid_argument, "bandwidth floor must be >= 0");
    }
    if (!(jitter_sd >= 0.0 && std::isfinite(jitter_sd)))
      throw DataError(ErrorKind::invalid_argument, "jitter standard deviation must be >= 0");
    if (enumeration_cap == 0) throw DataError(ErrorKind::invalid_argument, "enumeration cap must be positive");
  }

  friend bool operator==(const DepthSpec&, const DepthSpec&) = default;
};

/// Depth values of a batch of queries with respect to one reference sample.
struct DepthVector {
  std::vector<double> values;
  DepthSpec spec;
  std::uint64_t reference_id = 0;
};

// ---------------------------------------------------------------------------
// LS tuple and tests

/// (LS(P_m, Q_n), LS(Q_n, P_m)) with the sample sizes that produced it.
struct LSTuple {
  double ls_pq = 0.5;
  double ls_qp = 0.5;
  std::size_t m = 1;
  std::size_t n = 1;

  void validate() const {
    if (!(ls_pq >= 0.0 && ls_pq <= 1.0) || !(ls_qp >= 0.0 && ls_qp <= 1.0))
      throw DataError(ErrorKind::invalid_argument, "LS values must lie in [0,1]");
    if (m < 1 || n < 1) throw DataError(ErrorKind::invalid_argument, "sample sizes must be >= 1");
  }

  LSTuple swapped() const { return {ls_qp, ls_pq, n, m}; }

  friend bool operator==(const LSTuple&, const LSTuple&) = default;
};

enum class Method { proj_pq, proj_qp, difference, maximum, ellipsoid, joint_tp, joint_cc };

/// Strategy for the contraction of the second-order joint rule.
struct ContractionRule {
  enum class Xi { exp_neg_100, zero, one };
  enum class Delta { rate_three_quarters, log_enlarged };
  Xi xi = Xi::exp_neg_100;
  Delta delta = Delta::rate_three_quarters;

  friend bool operator==(const ContractionRule&, const ContractionRule&) = default;
};

struct TestConfig {
  Method method = Method::joint_tp;
  double alpha = 0.05;
  double weight = 0.5;  // ellipsoid only
  ContractionRule rule{};
  bool symmetric_cutoff = false;

  static TestConfig of(Method m, double alpha = 0.05) {
    TestConfig c;
    c.method = m;
    c.alpha = alpha;
    return c;
  }
  static TestConfig ellipsoid(double w, double alpha = 0.05) {
    TestConfig c;
    c.method = Method::ellipsoid;
    c.weight = w;
    c.alpha = alpha;
    return c;
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError(ErrorKind::invalid_argument, "alpha must lie in (0,1)");
    if (method == Method::ellipsoid && !(weight > 0.0 && weight < 1.0))
      throw DataError(ErrorKind::invalid_argument, "ellipsoid weight must lie strictly inside (0,1)");
  }

  friend bool operator==(const TestConfig&, const TestConfig&) = default;
};

struct TestOutcome {
  Method method = Method::joint_tp;
  double alpha = 0.05;
  bool reject = false;
  double p_value = 1.0;             // 0 when below_resolution
  bool below_resolution = false;    // joint rules rejected by the sum bound
  std::map<std::string, double> statistics;
};

}  // namespace depthgate
