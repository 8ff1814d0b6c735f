#pragma once

// Dispatch from a DepthSpec to a concrete evaluator, plus the textual depth
// names used on the command line and in JSON.

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "depthgate/depth_functional.hpp"
#include "depthgate/depth_multivariate.hpp"
#include "depthgate/depth_univariate.hpp"
#include "depthgate/model.hpp"
#include "depthgate/numfmt.hpp"
#include "depthgate/rng.hpp"

namespace depthgate {

// ---------------------------------------------------------------------------
// Names

inline DepthSpec parse_depth(std::string_view text, std::uint64_t seed = 0) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;
  auto int_arg = [&](int fallback) {
    if (!has_arg) return fallback;
    const long long v = parse_int(arg, "depth parameter");
    if (v < 1 || v > 1'000'000) throw DataError(ErrorKind::invalid_argument, "depth parameter out of range in '" + std::string(text) + "'");
    return static_cast<int>(v);
  };
  auto no_arg = [&] {
    if (has_arg) throw DataError(ErrorKind::parse, "depth '" + std::string(name) + "' takes no parameter");
  };
  DepthSpec spec;
  if (name == "tukey") no_arg(), spec = DepthSpec::tukey();
  else if (name == "simplicial") no_arg(), spec = DepthSpec::simplicial();
  else if (name == "simplicial-mod") no_arg(), spec = DepthSpec::simplicial_modified(seed);
  else if (name == "spherical") no_arg(), spec = DepthSpec::spherical();
  else if (name == "lens") no_arg(), spec = DepthSpec::lens();
  else if (name == "band") spec = DepthSpec::band(int_arg(2));
  else if (name == "band-sum") spec = DepthSpec::band_sum(int_arg(2));
  else if (name == "integrated-tukey") no_arg(), spec = DepthSpec::integrated(InnerDepth::tukey);
  else if (name == "integrated-simplicial") no_arg(), spec = DepthSpec::integrated(InnerDepth::simplicial);
  else if (name == "integrated-simplicial-mod") no_arg(), spec = DepthSpec::integrated(InnerDepth::simplicial_jittered, seed);
  else if (name == "h-const") no_arg(), spec = DepthSpec::h_depth(Bandwidth::fixed(1.0));
  else if (name == "h") {
    if (!has_arg) throw DataError(ErrorKind::parse, "depth 'h' needs a bandwidth, e.g. h:0.5");
    spec = DepthSpec::h_depth(Bandwidth::fixed(parse_double(arg, "bandwidth")));
  } else if (name == "h-adaptive")
    spec = DepthSpec::h_depth(Bandwidth::adaptive(has_arg ? parse_double(arg, "bandwidth quantile") : 0.15));
  else if (name == "spatial") no_arg(), spec = DepthSpec::spatial();
  else if (name == "lens-metric") no_arg(), spec = DepthSpec::lens_metric();
  else if (name == "random-tukey") spec = DepthSpec::random_tukey(int_arg(2), seed);
  else if (name == "random-projection") spec = DepthSpec::random_projection(int_arg(10), seed);
  else
    throw DataError(ErrorKind::parse, "unknown depth '" + std::string(text) + "'");
  spec.validate();
  return spec;
}

inline std::string format_depth(const DepthSpec& s) {
  switch (s.family) {
    case DepthFamily::tukey: return "tukey";
    case DepthFamily::simplicial: return "simplicial";
    case DepthFamily::simplicial_modified: return "simplicial-mod";
    case DepthFamily::spherical: return "spherical";
    case DepthFamily::lens: return "lens";
    case DepthFamily::band: return "band:" + std::to_string(s.order);
    case DepthFamily::band_sum: return "band-sum:" + std::to_string(s.order);
    case DepthFamily::integrated:
      switch (s.inner) {
        case InnerDepth::tukey: return "integrated-tukey";
        case InnerDepth::simplicial: return "integrated-simplicial";
        case InnerDepth::simplicial_jittered: return "integrated-simplicial-mod";
      }
      break;
    case DepthFamily::h_depth:
      if (s.bandwidth.mode == Bandwidth::Mode::fixed) return "h:" + format_double(s.bandwidth.h);
      return "h-adaptive:" + format_double(s.bandwidth.q);
    case DepthFamily::spatial: return "spatial";
    case DepthFamily::lens_metric: return "lens-metric";
    case DepthFamily::random_tukey: return "random-tukey:" + std::to_string(s.order);
    case DepthFamily::random_projection: return "random-projection:" + std::to_string(s.order);
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Evaluator

/// Depth function D(., P_m) bound to one reference sample. Construction does
/// all per-sample work; evaluation is const and may run concurrently.
class ReferenceDepth {
 public:
  ReferenceDepth(Sample reference, DepthSpec spec)
      : ref_(std::make_shared<const Sample>(std::move(reference))), spec_(spec) {
    spec_.validate();
    if (const auto* f = std::get_if<FunctionalSample>(ref_.get()))
      bind_functional(*f);
    else
      bind_multivariate(std::get<MultivariateSample>(*ref_));
  }

  const Sample& reference() const noexcept { return *ref_; }
  const DepthSpec& spec() const noexcept { return spec_; }
  std::uint64_t reference_id() const { return std::visit([](const auto& s) { return fingerprint(s); }, *ref_); }

  /// D(X_i, P_m) for every reference element, X_i included in P_m.
  std::vector<double> self_depths() const {
    const std::size_t m = sample_size(*ref_);
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = self_ ? self_(i) : query_(*ref_, i);
    return out;
  }

  std::vector<double> depths(const Sample& queries) const {
    validate_pair(*ref_, queries);
    const std::size_t n = sample_size(queries);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = query_(queries, j);
    return out;
  }

  DepthVector depth_vector(const Sample& queries) const { return {depths(queries), spec_, reference_id()}; }

 private:
  using QueryFn = std::function<double(const Sample&, std::size_t)>;

  static CurveView curve_of(const Sample& s, std::size_t i) { return std::get<FunctionalSample>(s).curve(i); }
  static std::span<const double> point_of(const Sample& s, std::size_t i) {
    return std::get<MultivariateSample>(s).point(i);
  }

  void bind_functional(const FunctionalSample& ref) {
    switch (spec_.family) {
      case DepthFamily::integrated: {
        auto ev = std::make_shared<const IntegratedDepth>(ref, spec_.inner, spec_.jitter_sd, spec_.seed);
        query_ = [ev](const Sample& q, std::size_t i) { return (*ev)(curve_of(q, i)); };
        return;
      }
      case DepthFamily::h_depth: {
        auto ev = std::make_shared<const HDepth>(ref, spec_.bandwidth);
        query_ = [ev](const Sample& q, std::size_t i) { return (*ev)(curve_of(q, i)); };
        self_ = [ev](std::size_t i) { return ev->self_depth(i); };
        return;
      }
      case DepthFamily::spatial: {
        detail::require_unmasked(ref, "spatial depth");
        const FunctionalSample* r = &ref;
        query_ = [r](const Sample& q, std::size_t i) { return spatial_depth(curve_of(q, i), *r); };
        return;
      }
      case DepthFamily::lens_metric: {
        auto ev = std::make_shared<const LensMetricDepth>(ref);
        query_ = [ev](const Sample& q, std::size_t i) { return (*ev)(curve_of(q, i)); };
        self_ = [ev](std::size_t i) { return ev->self_depth(i); };
        return;
      }
      case DepthFamily::random_tukey:
      case DepthFamily::random_projection: {
        const auto agg = spec_.family == DepthFamily::random_tukey ? RandomProjectionDepth::Aggregate::minimum
                                                                   : RandomProjectionDepth::Aggregate::mean;
        auto ev = std::make_shared<const RandomProjectionDepth>(ref, static_cast<std::size_t>(spec_.order), spec_.seed, agg);
        query_ = [ev](const Sample& q, std::size_t i) { return (*ev)(curve_of(q, i)); };
        return;
      }
      default:
        throw ComputeError(ErrorKind::kind_mismatch, "depth '" + format_depth(spec_) +
                                                         "' is defined on points; for curves use an integrated, h, "
                                                         "spatial, lens-metric or random-projection depth");
    }
  }

  void bind_multivariate(const MultivariateSample& ref) {
    const std::size_t d = ref.dim();
    const std::size_t cap = spec_.enumeration_cap;
    switch (spec_.family) {
      case DepthFamily::tukey: {
        if (d == 1) {
          auto sorted = std::make_shared<const SortedSample1D>(detail::column(ref, 0));
          query_ = [sorted](const Sample& q, std::size_t i) { return tukey1d(point_of(q, i)[0], *sorted); };
        } else if (d == 2) {
          const MultivariateSample* r = &ref;
          query_ = [r](const Sample& q, std::size_t i) { return tukey_md(point_of(q, i), *r); };
        } else {
          throw ComputeError(ErrorKind::unsupported, "exact Tukey depth is only available for d <= 2; use random-tukey");
        }
        return;
      }
      case DepthFamily::simplicial:
      case DepthFamily::simplicial_modified: {
        const MultivariateSample* base = &ref;
        if (spec_.family == DepthFamily::simplicial_modified && spec_.jitter_sd > 0.0) {
          Stream rng(derive_seed(hash_combine(fingerprint(ref), spec_.seed), 0, StreamTag::jitter));
          std::vector<std::vector<double>> pts(ref.size(), std::vector<double>(d));
          for (std::size_t i = 0; i < ref.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) pts[i][j] = ref.coord(i, j) + rng.normal(0.0, spec_.jitter_sd);
          jittered_ = std::make_shared<const MultivariateSample>(d, std::move(pts));
          base = jittered_.get();
        }
        if (ref.size() < d + 1) throw ComputeError(ErrorKind::invalid_argument, "simplicial depth needs m >= d+1");
        if (d == 1) {
          auto sorted = std::make_shared<const SortedSample1D>(detail::column(*base, 0));
          query_ = [sorted](const Sample& q, std::size_t i) { return simplicial1d(point_of(q, i)[0], *sorted); };
        } else {
          if (d >= 3) detail::check_cap(binomial(ref.size(), d + 1), cap, "simplicial depth");
          query_ = [base, cap](const Sample& q, std::size_t i) { return simplicial_md(point_of(q, i), *base, cap); };
        }
        return;
      }
      case DepthFamily::spherical: {
        const MultivariateSample* r = &ref;
        query_ = [r](const Sample& q, std::size_t i) { return spherical_md(point_of(q, i), *r); };
        return;
      }
      case DepthFamily::lens: {
        const MultivariateSample* r = &ref;
        query_ = [r](const Sample& q, std::size_t i) { return lens_md(point_of(q, i), *r); };
        return;
      }
      case DepthFamily::band:
      case DepthFamily::band_sum: {
        const MultivariateSample* r = &ref;
        const int k = spec_.order;
        if (ref.size() < static_cast<std::size_t>(k)) throw ComputeError(ErrorKind::invalid_argument, "band depth needs m >= k");
        if (spec_.family == DepthFamily::band) {
          if (k > 2) detail::check_cap(binomial(ref.size(), static_cast<std::size_t>(k)), cap, "band depth");
          query_ = [r, k, cap](const Sample& q, std::size_t i) { return band_md(point_of(q, i), *r, k, cap); };
        } else {
          if (k > 2) detail::check_cap(binomial(ref.size(), static_cast<std::size_t>(k)), cap, "band depth");
          query_ = [r, k, cap](const Sample& q, std::size_t i) { return band_sum_md(point_of(q, i), *r, k, cap); };
        }
        return;
      }
      case DepthFamily::random_tukey:
      case DepthFamily::random_projection: {
        const bool minimum = spec_.family == DepthFamily::random_tukey;
        auto dirs = std::make_shared<const DirectionSet>(
            make_directions(d, static_cast<std::size_t>(spec_.order), derive_seed(spec_.seed, d, StreamTag::directions)));
        auto proj = std::make_shared<std::vector<std::vector<double>>>();
        for (const auto& v : dirs->directions) {
          std::vector<double> col(ref.size());
          for (std::size_t i = 0; i < ref.size(); ++i) col[i] = dot(ref.point(i), v);
          std::sort(col.begin(), col.end());
          proj->push_back(std::move(col));
        }
        const std::int64_t m = static_cast<std::int64_t>(ref.size());
        query_ = [dirs, proj, minimum, m](const Sample& q, std::size_t i) {
          const auto x = point_of(q, i);
          std::int64_t best = m, total = 0;
          for (std::size_t j = 0; j < dirs->directions.size(); ++j) {
            const Ratio r = univariate::tukey((*proj)[j], dot(x, dirs->directions[j]));
            best = std::min(best, r.num);
            total += r.num;
          }
          if (minimum) return static_cast<double>(best) / static_cast<double>(m);
          return static_cast<double>(total) / (static_cast<double>(m) * static_cast<double>(dirs->directions.size()));
        };
        return;
      }
      default:
        throw ComputeError(ErrorKind::kind_mismatch, "depth '" + format_depth(spec_) + "' is defined on curves only");
    }
  }

  static double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
    return acc;
  }

  std::shared_ptr<const Sample> ref_;
  std::shared_ptr<const MultivariateSample> jittered_;
  DepthSpec spec_;
  QueryFn query_;
  std::function<double(std::size_t)> self_;
};

/// D(y_j, P_m) for every query element.
inline DepthVector depth_vector(const Sample& reference, const Sample& queries, const DepthSpec& spec) {
  return ReferenceDepth(reference, spec).depth_vector(queries);
}

}  // namespace depthgate
