#pragma once

// Depths on R^d. Tukey and simplicial depth are exact for d <= 2 (angular
// sweeps around the query); the pair-based depths are O(m^2) U-statistics and
// everything else is enumerated under an explicit size cap.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "depthgate/depth_univariate.hpp"
#include "depthgate/model.hpp"
#include "depthgate/rng.hpp"

namespace depthgate {

inline constexpr std::size_t kDefaultEnumerationCap = 2'000'000;

/// C(m, k) as a double (exact well beyond any cap we enforce).
inline double binomial(std::size_t m, std::size_t k) {
  if (k > m) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(m - k + i) / static_cast<double>(i);
  return std::round(r);
}

namespace planar {

struct Vec {
  double x = 0.0;
  double y = 0.0;
};

inline double cross(Vec a, Vec b) noexcept { return a.x * b.y - a.y * b.x; }
inline double dot(Vec a, Vec b) noexcept { return a.x * b.x + a.y * b.y; }

/// 0 for angles in [0, pi), 1 for [pi, 2pi).
inline int half(Vec v) noexcept { return (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) ? 1 : 0; }

inline bool angle_less(Vec a, Vec b) noexcept {
  const int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0.0;
}

/// Angle from a to b (counter-clockwise) lies in [0, pi).
inline bool within_half_open(Vec a, Vec b) noexcept {
  const double c = cross(a, b);
  return c > 0.0 || (c == 0.0 && dot(a, b) > 0.0);
}

/// Directions from x to every sample point not equal to x, sorted by angle.
struct Star {
  std::vector<Vec> dirs;
  std::int64_t coincident = 0;
};

inline Star star_around(std::span<const double> x, const MultivariateSample& s) {
  Star st;
  st.dirs.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec v{s.coord(i, 0) - x[0], s.coord(i, 1) - x[1]};
    if (v.x == 0.0 && v.y == 0.0)
      ++st.coincident;
    else
      st.dirs.push_back(v);
  }
  std::sort(st.dirs.begin(), st.dirs.end(), angle_less);
  return st;
}

/// Minimum number of sample points in a closed halfplane whose boundary passes through x.
inline std::int64_t tukey_count(std::span<const double> x, const MultivariateSample& s) {
  const Star st = star_around(x, s);
  const std::size_t n = st.dirs.size();
  if (n == 0) return st.coincident;
  // min closed half-plane = n - max open half-plane; an open half-plane that
  // starts just before direction i holds exactly the directions in [theta_i, theta_i + pi).
  std::size_t best = 0;
  std::size_t end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max(end, i + 1);
    while (end < i + n && within_half_open(st.dirs[i], st.dirs[end % n])) ++end;
    best = std::max(best, end - i);
  }
  return st.coincident + static_cast<std::int64_t>(n - best);
}

/// Number of closed triangles spanned by sample points that contain x.
inline std::int64_t simplicial_count(std::span<const double> x, const MultivariateSample& s) {
  const Star st = star_around(x, s);
  const std::size_t n = st.dirs.size();
  const auto m = static_cast<std::int64_t>(s.size());
  const std::int64_t total = m * (m - 1) * (m - 2) / 6;
  // A closed triangle misses x iff its three directions fit in an open
  // half-plane. Count those once, by the vertex that starts the arc.
  auto follows = [&](std::size_t p, std::size_t q) {
    if (q < n) return within_half_open(st.dirs[p], st.dirs[q]);
    return cross(st.dirs[p], st.dirs[q - n]) > 0.0;
  };
  std::int64_t missing = 0;
  std::size_t end = 0;
  for (std::size_t p = 0; p < n; ++p) {
    end = std::max(end, p + 1);
    while (end < p + n && follows(p, end)) ++end;
    missing += choose2(static_cast<std::int64_t>(end - p - 1));
  }
  return total - missing;
}

}  // namespace planar

namespace detail {

inline void require_dim(std::span<const double> x, const MultivariateSample& s) {
  if (x.size() != s.dim())
    throw DataError(ErrorKind::dimension_mismatch, "query dimension " + std::to_string(x.size()) +
                                                       " differs from sample dimension " + std::to_string(s.dim()));
  for (double v : x)
    if (!std::isfinite(v)) throw DataError(ErrorKind::non_finite, "query is not finite");
}

inline std::vector<double> column(const MultivariateSample& s, std::size_t j) {
  std::vector<double> c(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) c[i] = s.coord(i, j);
  return c;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return acc;
}

inline void check_cap(double combos, std::size_t cap, const char* what) {
  if (combos > static_cast<double>(cap))
    throw ComputeError(ErrorKind::size_cap, std::string(what) + " needs " + std::to_string(combos) +
                                                " kernel evaluations per query, cap is " + std::to_string(cap));
}

/// Closed-simplex containment by barycentric coordinates.
inline bool simplex_contains(std::span<const double> x, const MultivariateSample& s, std::span<const std::size_t> idx) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  Eigen::MatrixXd a(d + 1, d + 1);
  Eigen::VectorXd rhs(d + 1);
  for (Eigen::Index c = 0; c <= d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) a(r, c) = s.coord(idx[static_cast<std::size_t>(c)], static_cast<std::size_t>(r));
    a(d, c) = 1.0;
  }
  for (Eigen::Index r = 0; r < d; ++r) rhs(r) = x[static_cast<std::size_t>(r)];
  rhs(d) = 1.0;
  constexpr double tol = 1e-12;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd lambda;
  if (lu.isInvertible()) {
    lambda = lu.solve(rhs);
  } else {
    // Degenerate simplex: use the minimum-norm solution and require it to be exact.
    lambda = a.completeOrthogonalDecomposition().solve(rhs);
    if ((a * lambda - rhs).norm() > 1e-9) return false;
  }
  return (lambda.array() >= -tol).all();
}

template <class Visit>
void for_each_combination(std::size_t m, std::size_t k, Visit&& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    visit(std::span<const std::size_t>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Halfspace depth: exact for d = 1 and d = 2 (angular sweep, O(m log m)).
inline double tukey_md(std::span<const double> x, const MultivariateSample& s) {
  detail::require_dim(x, s);
  if (s.dim() == 1) return tukey1d(x[0], SortedSample1D(detail::column(s, 0)));
  if (s.dim() == 2)
    return static_cast<double>(planar::tukey_count(x, s)) / static_cast<double>(s.size());
  throw ComputeError(ErrorKind::unsupported, "exact Tukey depth is only available for d <= 2; use random-tukey");
}

/// Simplicial depth as the fraction of C(m, d+1) closed simplices containing x.
inline double simplicial_md(std::span<const double> x, const MultivariateSample& s,
                            std::size_t cap = kDefaultEnumerationCap) {
  detail::require_dim(x, s);
  const std::size_t d = s.dim();
  if (s.size() < d + 1)
    throw ComputeError(ErrorKind::invalid_argument, "simplicial depth needs m >= d+1");
  if (d == 1) return simplicial1d(x[0], SortedSample1D(detail::column(s, 0)));
  if (d == 2) {
    const auto m = static_cast<std::int64_t>(s.size());
    return static_cast<double>(planar::simplicial_count(x, s)) / static_cast<double>(m * (m - 1) * (m - 2) / 6);
  }
  const double combos = binomial(s.size(), d + 1);
  detail::check_cap(combos, cap, "simplicial depth");
  std::int64_t hits = 0;
  detail::for_each_combination(s.size(), d + 1, [&](std::span<const std::size_t> idx) {
    if (detail::simplex_contains(x, s, idx)) ++hits;
  });
  return static_cast<double>(hits) / combos;
}

/// Spherical depth: pairs with (X_i - x)'(X_j - x) <= 0.
inline double spherical_md(std::span<const double> x, const MultivariateSample& s) {
  detail::require_dim(x, s);
  const std::size_t m = s.size();
  if (m < 2) throw ComputeError(ErrorKind::invalid_argument, "spherical depth needs m >= 2");
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto a = s.point(i);
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto b = s.point(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < s.dim(); ++k) acc += (a[k] - x[k]) * (b[k] - x[k]);
      if (acc <= 0.0) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(choose2(static_cast<std::int64_t>(m)));
}

/// Euclidean metric, compared through squared distances.
struct EuclideanMetric {
  double operator()(std::span<const double> a, std::span<const double> b) const {
    return detail::squared_distance(a, b);
  }
};

/// Lens depth: pairs with d(X_i, X_j) >= max(d(x, X_i), d(x, X_j)). The
/// metric may return any strictly increasing transform of a true metric.
template <class Metric = EuclideanMetric>
double lens_md(std::span<const double> x, const MultivariateSample& s, Metric metric = {}) {
  detail::require_dim(x, s);
  const std::size_t m = s.size();
  if (m < 2) throw ComputeError(ErrorKind::invalid_argument, "lens depth needs m >= 2");
  std::vector<double> to_x(m);
  for (std::size_t i = 0; i < m; ++i) to_x[i] = metric(x, s.point(i));
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (metric(s.point(i), s.point(j)) >= std::max(to_x[i], to_x[j])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(choose2(static_cast<std::int64_t>(m)));
}

/// Band depth of order k: fraction of k-subsets whose coordinate-wise bounding box contains x.
inline double band_md(std::span<const double> x, const MultivariateSample& s, int k,
                      std::size_t cap = kDefaultEnumerationCap) {
  detail::require_dim(x, s);
  if (k < 2) throw DataError(ErrorKind::invalid_argument, "band depth needs k >= 2");
  const std::size_t m = s.size();
  const auto kk = static_cast<std::size_t>(k);
  if (m < kk) throw ComputeError(ErrorKind::invalid_argument, "band depth needs m >= k");
  const std::size_t d = s.dim();
  if (kk == 2) {
    std::int64_t hits = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        bool inside = true;
        for (std::size_t c = 0; c < d && inside; ++c) {
          const double a = s.coord(i, c), b = s.coord(j, c);
          inside = std::min(a, b) <= x[c] && x[c] <= std::max(a, b);
        }
        if (inside) ++hits;
      }
    return static_cast<double>(hits) / static_cast<double>(choose2(static_cast<std::int64_t>(m)));
  }
  const double combos = binomial(m, kk);
  detail::check_cap(combos, cap, "band depth");
  std::int64_t hits = 0;
  detail::for_each_combination(m, kk, [&](std::span<const std::size_t> idx) {
    for (std::size_t c = 0; c < d; ++c) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i : idx) {
        lo = std::min(lo, s.coord(i, c));
        hi = std::max(hi, s.coord(i, c));
      }
      if (x[c] < lo || x[c] > hi) return;
    }
    ++hits;
  });
  return static_cast<double>(hits) / combos;
}

/// Sum of band depths of orders 2..K.
inline double band_sum_md(std::span<const double> x, const MultivariateSample& s, int K,
                          std::size_t cap = kDefaultEnumerationCap) {
  if (K < 2) throw DataError(ErrorKind::invalid_argument, "band-sum depth needs K >= 2");
  if (s.size() < static_cast<std::size_t>(K)) throw ComputeError(ErrorKind::invalid_argument, "band-sum depth needs m >= K");
  double total = 0.0;
  for (int k = 2; k <= K; ++k) total += band_md(x, s, k, cap);
  return total;
}

/// Unit directions in R^d, normalised iid standard Gaussians.
struct DirectionSet {
  std::size_t dim = 1;
  std::vector<std::vector<double>> directions;
  std::uint64_t seed = 0;
};

inline DirectionSet make_directions(std::size_t d, std::size_t k, std::uint64_t seed) {
  if (d == 0 || k == 0) throw DataError(ErrorKind::invalid_argument, "need d >= 1 and k >= 1");
  DirectionSet set{d, {}, seed};
  Stream rng(seed);
  set.directions.reserve(k);
  while (set.directions.size() < k) {
    std::vector<double> v(d);
    double norm2 = 0.0;
    for (double& c : v) {
      c = rng.normal();
      norm2 += c * c;
    }
    if (norm2 == 0.0) continue;
    const double norm = std::sqrt(norm2);
    for (double& c : v) c /= norm;
    set.directions.push_back(std::move(v));
  }
  return set;
}

}  // namespace depthgate
