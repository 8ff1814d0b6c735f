#pragma once

// Generalised depth ranks and the LS statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "depthgate/depth.hpp"
#include "depthgate/model.hpp"

namespace depthgate {

/// tie_split: (#smaller + #equal/2)/m. tie_inclusive: #(smaller or equal)/m.
enum class RankMode { tie_split, tie_inclusive };

inline const char* to_string(RankMode m) { return m == RankMode::tie_split ? "tie-split" : "tie-inclusive"; }

inline RankMode parse_rank_mode(std::string_view s) {
  if (s == "tie-split") return RankMode::tie_split;
  if (s == "tie-inclusive") return RankMode::tie_inclusive;
  throw DataError(ErrorKind::parse, "unknown rank mode '" + std::string(s) + "'");
}

/// Twice the rank numerator of one query depth: 2*#less + #equal, or 2*#(<=).
inline std::int64_t rank_numerator2(std::span<const double> sorted_ref, double depth, RankMode mode) {
  const auto lo = std::lower_bound(sorted_ref.begin(), sorted_ref.end(), depth) - sorted_ref.begin();
  const auto hi = std::upper_bound(sorted_ref.begin(), sorted_ref.end(), depth) - sorted_ref.begin();
  return mode == RankMode::tie_split ? lo + hi : 2 * hi;
}

inline std::vector<double> ranks_from_depths(std::span<const double> reference_depths,
                                             std::span<const double> query_depths, RankMode mode) {
  if (reference_depths.empty()) throw DataError(ErrorKind::empty_sample, "reference sample is empty");
  std::vector<double> sorted(reference_depths.begin(), reference_depths.end());
  std::sort(sorted.begin(), sorted.end());
  const double den = 2.0 * static_cast<double>(sorted.size());
  std::vector<double> out;
  out.reserve(query_depths.size());
  for (double d : query_depths) out.push_back(static_cast<double>(rank_numerator2(sorted, d, mode)) / den);
  return out;
}

/// Mean rank of the queries, accumulated as one exact integer numerator over 2mn.
inline double ls_from_depths(std::span<const double> reference_depths, std::span<const double> query_depths,
                             RankMode mode) {
  if (reference_depths.empty() || query_depths.empty())
    throw DataError(ErrorKind::empty_sample, "LS statistic needs two nonempty samples");
  std::vector<double> sorted(reference_depths.begin(), reference_depths.end());
  std::sort(sorted.begin(), sorted.end());
  std::int64_t num = 0;
  for (double d : query_depths) num += rank_numerator2(sorted, d, mode);
  return static_cast<double>(num) /
         (2.0 * static_cast<double>(sorted.size()) * static_cast<double>(query_depths.size()));
}

/// R(y_j, P_m) for each query y_j, with P_m the reference sample.
inline std::vector<double> depth_ranks(const Sample& queries, const Sample& reference, const DepthSpec& spec,
                                       RankMode mode = RankMode::tie_split) {
  validate_pair(reference, queries);
  const ReferenceDepth depth(reference, spec);
  return ranks_from_depths(depth.self_depths(), depth.depths(queries), mode);
}

/// LS(P_m, Q_n): mean rank of the Q-sample within the P-depth ordering.
inline double ls_statistic(const Sample& p, const Sample& q, const DepthSpec& spec,
                           RankMode mode = RankMode::tie_split) {
  validate_pair(p, q);
  const ReferenceDepth depth(p, spec);
  return ls_from_depths(depth.self_depths(), depth.depths(q), mode);
}

inline LSTuple ls_tuple(const Sample& p, const Sample& q, const DepthSpec& spec,
                        RankMode mode = RankMode::tie_split) {
  validate_pair(p, q);
  // Both orderings use the same spec, hence the same seed.
  return {ls_statistic(p, q, spec, mode), ls_statistic(q, p, spec, mode), sample_size(p), sample_size(q)};
}

struct ScaledStatistics {
  double diff_std = 0.0;      // sqrt(3mn/(m+n)) (ls_pq - ls_qp)
  double sum_centered = 0.0;  // ls_pq + ls_qp - 1
  double scale = 0.0;         // sqrt(12mn/(m+n))
};

inline ScaledStatistics scaled_stats(const LSTuple& t) {
  t.validate();
  const double m = static_cast<double>(t.m), n = static_cast<double>(t.n);
  const double h = m * n / (m + n);
  return {std::sqrt(3.0 * h) * (t.ls_pq - t.ls_qp), (t.ls_pq + t.ls_qp) - 1.0, std::sqrt(12.0 * h)};
}

}  // namespace depthgate
