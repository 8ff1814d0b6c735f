#pragma once

// Data generators for the simulation models, alternatives, the scenario
// registry, and the parallel Monte Carlo runner.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "depthgate/decision.hpp"
#include "depthgate/ls_core.hpp"
#include "depthgate/model.hpp"
#include "depthgate/numfmt.hpp"
#include "depthgate/rng.hpp"

namespace depthgate {

// ---------------------------------------------------------------------------
// Generators

/// Standard Brownian motion on an equidistant grid starting at 0.
inline std::vector<double> gen_brownian(const Grid& grid, Stream& rng) {
  if (grid[0] != 0.0 || !grid.is_equidistant())
    throw DataError(ErrorKind::invalid_grid, "Brownian paths need an equidistant grid starting at 0");
  const double sd = std::sqrt(grid[1] - grid[0]);
  std::vector<double> out(grid.size());
  out[0] = 0.0;
  for (std::size_t t = 1; t < grid.size(); ++t) out[t] = out[t - 1] + sd * rng.normal();
  return out;
}

/// J = sum_{j=1}^{20} 1/j as the exact rational 55835135/15519504.
inline constexpr double kHarmonic20 = 55835135.0 / 15519504.0;

enum class FourierMode { fast, slow };

/// e_j(t) = sin(j pi t) for odd j, cos(j pi t) for even j, j = 1..20, on a fixed grid.
class FourierBasis {
 public:
  static constexpr std::size_t terms = 20;

  explicit FourierBasis(const Grid& grid) : size_(grid.size()), values_(terms * grid.size()) {
    for (std::size_t j = 1; j <= terms; ++j)
      for (std::size_t t = 0; t < size_; ++t) {
        const double arg = static_cast<double>(j) * std::numbers::pi * grid[t];
        values_[(j - 1) * size_ + t] = (j % 2 == 1) ? std::sin(arg) : std::cos(arg);
      }
  }

  std::size_t grid_size() const noexcept { return size_; }
  double operator()(std::size_t j, std::size_t t) const { return values_[(j - 1) * size_ + t]; }

  static double variance(std::size_t l, FourierMode mode) {
    return mode == FourierMode::fast ? std::pow(3.0, -static_cast<double>(l)) : kHarmonic20 / static_cast<double>(l);
  }

 private:
  std::size_t size_;
  std::vector<double> values_;
};

inline std::vector<double> gen_fourier(const FourierBasis& basis, Stream& rng, FourierMode mode) {
  std::vector<double> out(basis.grid_size(), 0.0);
  for (std::size_t l = 1; l <= FourierBasis::terms; ++l) {
    const double w = std::sqrt(FourierBasis::variance(l, mode)) * rng.normal();
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * basis(l, t);
  }
  return out;
}

inline std::vector<double> gen_fourier(const Grid& grid, Stream& rng, FourierMode mode) {
  return gen_fourier(FourierBasis(grid), rng, mode);
}

enum class ShapeKind { flat, zigzag };

inline std::vector<double> gen_shape(const Grid& grid, Stream& rng, ShapeKind which) {
  std::vector<double> out(grid.size());
  const double u = rng.uniform();
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (which == ShapeKind::flat) {
      out[t] = u;
    } else {
      const double s = 5.0 * (grid[t] + u);
      out[t] = s - std::floor(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario description

enum class ModelKind { uniform01, uniform, brownian, fourier_fast, fourier_slow, shape_flat, shape_zigzag, gauss };

struct DataModel {
  ModelKind kind = ModelKind::uniform01;
  double upper = 1.0;              // uniform(0, upper)
  std::vector<double> mean{0.0};   // gauss
  double cov_scale = 1.0;          // gauss covariance cov_scale * I

  bool functional() const noexcept {
    return kind != ModelKind::uniform01 && kind != ModelKind::uniform && kind != ModelKind::gauss;
  }
  friend bool operator==(const DataModel&, const DataModel&) = default;
};

enum class AltKind { none, shift, sine_shift, scale, loc_scale, outlier };

struct Alternative {
  AltKind kind = AltKind::none;
  double a = 0.0;
  std::size_t count = 0;  // outlier
  double offset = 0.0;    // outlier

  static Alternative shift(double a) { return {AltKind::shift, a}; }
  static Alternative sine_shift(double a) { return {AltKind::sine_shift, a}; }
  static Alternative scale(double a) { return {AltKind::scale, a}; }
  static Alternative loc_scale(double a) { return {AltKind::loc_scale, a}; }
  static Alternative outlier(std::size_t count, double offset) { return {AltKind::outlier, 0.0, count, offset}; }

  void validate(bool functional) const {
    if (!std::isfinite(a) || !std::isfinite(offset)) throw DataError(ErrorKind::invalid_argument, "alternative parameter is not finite");
    if (kind == AltKind::scale && !(a > 0.0)) throw DataError(ErrorKind::invalid_argument, "scale alternative needs a > 0");
    if (kind == AltKind::loc_scale && !(a > 0.0 && a <= 0.5))
      throw DataError(ErrorKind::invalid_argument, "loc-scale alternative needs a in (0, 1/2]");
    if (!functional && (kind == AltKind::sine_shift || kind == AltKind::loc_scale))
      throw DataError(ErrorKind::invalid_argument, "sine-shift and loc-scale apply to curves only");
  }
  friend bool operator==(const Alternative&, const Alternative&) = default;
};

/// One sample's law: a base model followed by transforms applied in order.
struct SampleSpec {
  DataModel model;
  std::vector<Alternative> transforms;
  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

struct ScenarioSpec {
  std::string name;
  SampleSpec p;
  SampleSpec q;
  std::size_t m = 100;
  std::size_t n = 100;
  std::size_t grid_size = 1001;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;

  void validate() const {
    if (m < 1 || n < 1) throw DataError(ErrorKind::invalid_argument, "sample sizes must be >= 1");
    if (trials < 1) throw DataError(ErrorKind::invalid_argument, "trials must be >= 1");
    if (p.model.functional() != q.model.functional())
      throw DataError(ErrorKind::kind_mismatch, "both samples must be curves or both points");
    if (p.model.functional() && grid_size < 2) throw DataError(ErrorKind::invalid_grid, "grid needs at least 2 points");
    for (const SampleSpec* s : {&p, &q}) {
      if (s->model.kind == ModelKind::uniform && !(s->model.upper > 0.0))
        throw DataError(ErrorKind::invalid_argument, "uniform upper bound must be positive");
      if (s->model.kind == ModelKind::gauss && (s->model.mean.empty() || !(s->model.cov_scale > 0.0)))
        throw DataError(ErrorKind::invalid_argument, "gauss model needs a mean vector and positive covariance scale");
      for (const auto& a : s->transforms) a.validate(s->model.functional());
    }
    if (p.model.kind == ModelKind::gauss && q.model.kind == ModelKind::gauss && p.model.mean.size() != q.model.mean.size())
      throw DataError(ErrorKind::dimension_mismatch, "gauss models differ in dimension");
  }
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// ---------------------------------------------------------------------------
// Sampling

/// Shared per-scenario caches (grid, Fourier basis).
class SampleFactory {
 public:
  explicit SampleFactory(const ScenarioSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.p.model.functional()) {
      grid_.emplace(Grid::equidistant(spec_.grid_size));
      basis_.emplace(*grid_);
    }
  }

  const ScenarioSpec& spec() const noexcept { return spec_; }

  Sample draw(const SampleSpec& s, std::size_t size, Stream& rng) const {
    if (s.model.functional()) {
      std::vector<std::vector<double>> curves(size);
      for (auto& c : curves) c = base_curve(s.model, rng);
      apply_alternatives(curves, s, rng);
      return FunctionalSample(*grid_, std::move(curves));
    }
    std::vector<std::vector<double>> pts(size);
    for (auto& x : pts) x = base_point(s.model, rng);
    apply_alternatives(pts, s, rng);
    const std::size_t dim = pts.front().size();
    return MultivariateSample(dim, std::move(pts));
  }

  std::pair<Sample, Sample> draw_trial(std::size_t trial) const {
    Stream rp = rng_for_trial(spec_.seed, trial, StreamTag::sample_p);
    Stream rq = rng_for_trial(spec_.seed, trial, StreamTag::sample_q);
    return {draw(spec_.p, spec_.m, rp), draw(spec_.q, spec_.n, rq)};
  }

  std::vector<double> base_curve(const DataModel& model, Stream& rng) const {
    switch (model.kind) {
      case ModelKind::brownian: return gen_brownian(*grid_, rng);
      case ModelKind::fourier_fast: return gen_fourier(*basis_, rng, FourierMode::fast);
      case ModelKind::fourier_slow: return gen_fourier(*basis_, rng, FourierMode::slow);
      case ModelKind::shape_flat: return gen_shape(*grid_, rng, ShapeKind::flat);
      case ModelKind::shape_zigzag: return gen_shape(*grid_, rng, ShapeKind::zigzag);
      default: throw DataError(ErrorKind::invalid_argument, "not a curve model");
    }
  }

  static std::vector<double> base_point(const DataModel& model, Stream& rng) {
    switch (model.kind) {
      case ModelKind::uniform01: return {rng.uniform()};
      case ModelKind::uniform: return {rng.uniform(0.0, model.upper)};
      case ModelKind::gauss: {
        std::vector<double> x(model.mean.size());
        const double sd = std::sqrt(model.cov_scale);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.normal(model.mean[j], sd);
        return x;
      }
      default: throw DataError(ErrorKind::invalid_argument, "not a point model");
    }
  }

 private:
  template <class Rows>
  void apply_alternatives(Rows& rows, const SampleSpec& s, Stream& rng) const {
    for (const Alternative& alt : s.transforms) {
      switch (alt.kind) {
        case AltKind::none: break;
        case AltKind::shift:
          for (auto& r : rows)
            for (double& v : r) v += alt.a;
          break;
        case AltKind::scale:
          for (auto& r : rows)
            for (double& v : r) v *= alt.a;
          break;
        case AltKind::sine_shift:
          for (auto& r : rows)
            for (std::size_t t = 0; t < r.size(); ++t) r[t] += alt.a * std::sin(2.0 * std::numbers::pi * (*grid_)[t]);
          break;
        case AltKind::loc_scale: {
          const double w = std::sqrt(1.0 - 2.0 * alt.a), bump = std::sqrt(32.0 * alt.a);
          for (auto& r : rows) {
            const std::vector<double> copy = base_curve(s.model, rng);
            for (std::size_t t = 0; t < r.size(); ++t) {
              const double tt = (*grid_)[t];
              r[t] = (r[t] + w * copy[t] + bump * tt * (tt - 1.0)) / std::numbers::sqrt2;
            }
          }
          break;
        }
        case AltKind::outlier:
          for (std::size_t i = 0; i < std::min(alt.count, rows.size()); ++i)
            for (double& v : rows[i]) v += alt.offset;
          break;
      }
    }
  }

  ScenarioSpec spec_;
  std::optional<Grid> grid_;
  std::optional<FourierBasis> basis_;
};

// ---------------------------------------------------------------------------
// Runner

/// Worker count: the request (0 = hardware concurrency), capped by DEPTHGATE_THREADS.
inline std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DEPTHGATE_THREADS")) {
    char* end = nullptr;
    const long long cap = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(n, 1);
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. The exception of
/// the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct RunOptions {
  std::size_t threads = 0;
  bool keep_tuples = false;
  RankMode rank_mode = RankMode::tie_split;
};

struct MethodResult {
  TestConfig config;
  std::size_t rejections = 0;
  double rate = 0.0;
  double half_width = 0.0;  // 1.96 sqrt(rate (1 - rate) / trials)
};

struct ExperimentResult {
  ScenarioSpec scenario;
  DepthSpec depth;
  RankMode rank_mode = RankMode::tie_split;
  std::vector<MethodResult> methods;
  std::vector<LSTuple> tuples;  // empty unless requested
};

/// Depth spec used in one trial: randomised depths get a per-trial seed that
/// both tuple entries share.
inline DepthSpec depth_for_trial(const DepthSpec& depth, const ScenarioSpec& spec, std::size_t trial) {
  DepthSpec d = depth;
  if (d.randomized()) d.seed = hash_combine(depth.seed, derive_seed(spec.seed, trial, StreamTag::depth));
  return d;
}

inline std::vector<LSTuple> run_tuple_scatter(const ScenarioSpec& spec, const DepthSpec& depth,
                                              const RunOptions& opt = {}) {
  const SampleFactory factory(spec);
  depth.validate();
  std::vector<LSTuple> tuples(spec.trials);
  parallel_for(spec.trials, resolve_threads(opt.threads), [&](std::size_t trial) {
    auto [p, q] = factory.draw_trial(trial);
    tuples[trial] = ls_tuple(p, q, depth_for_trial(depth, spec, trial), opt.rank_mode);
  });
  return tuples;
}

inline ExperimentResult run_experiment(const ScenarioSpec& spec, const DepthSpec& depth,
                                       const std::vector<TestConfig>& methods, const RunOptions& opt = {}) {
  if (methods.empty()) throw DataError(ErrorKind::invalid_argument, "no test methods requested");
  for (const auto& m : methods) m.validate();
  ExperimentResult res{spec, depth, opt.rank_mode, {}, {}};
  const std::vector<LSTuple> tuples = run_tuple_scatter(spec, depth, opt);
  for (const auto& cfg : methods) {
    MethodResult mr{cfg};
    for (const auto& t : tuples) mr.rejections += decide(t, cfg).reject ? 1 : 0;
    const double trials = static_cast<double>(spec.trials);
    mr.rate = static_cast<double>(mr.rejections) / trials;
    mr.half_width = 1.96 * std::sqrt(mr.rate * (1.0 - mr.rate) / trials);
    res.methods.push_back(mr);
  }
  if (opt.keep_tuples) res.tuples = tuples;
  return res;
}

// ---------------------------------------------------------------------------
// Registry

struct Preset {
  ScenarioSpec scenario;
  DepthSpec depth;
  std::vector<TestConfig> methods;
  std::string description;
};

inline std::vector<TestConfig> all_ls_methods() {
  return {TestConfig::of(Method::proj_pq),    TestConfig::of(Method::proj_qp),  TestConfig::of(Method::difference),
          TestConfig::of(Method::maximum),    TestConfig::of(Method::joint_cc), TestConfig::of(Method::joint_tp)};
}

inline std::vector<std::string> scenario_names() {
  return {"thm2.1",         "fig2-null",      "table3-size",    "table3",        "table3-power",
          "table6",         "table7",         "table8-model1",  "table8-model2", "table8-model3",
          "table9-shape",   "tableC6-a",      "tableC6-b",      "tableC6-c",     "tableC6-d",
          "tableC6-e",      "tableC6-f",      "tableC6-g",      "tableC6-outliers"};
}

/// Resolves a registry name. table6 and table7 accept an optional ":<value>"
/// for the mean offset c and the covariance scale respectively.
inline Preset scenario_preset(std::string_view full) {
  const auto colon = full.find(':');
  const std::string_view name = full.substr(0, colon);
  const std::optional<double> param =
      colon == std::string_view::npos ? std::nullopt : std::optional<double>(parse_double(full.substr(colon + 1), "scenario parameter"));
  auto reject_param = [&] {
    if (param) throw DataError(ErrorKind::parse, "scenario '" + std::string(name) + "' takes no parameter");
  };

  Preset pr;
  pr.scenario.name = std::string(full);
  pr.methods = all_ls_methods();
  pr.depth = DepthSpec::tukey();
  auto& sc = pr.scenario;
  const DataModel u01{ModelKind::uniform01};
  const DataModel bm{ModelKind::brownian};

  if (name == "thm2.1") {
    reject_param();
    sc.p.model = u01;
    sc.q.model = DataModel{ModelKind::uniform, 0.5};
    pr.description = "U(0,1) against U(0,0.5), univariate Tukey depth";
  } else if (name == "fig2-null") {
    reject_param();
    sc.p.model = sc.q.model = u01;
    pr.description = "U(0,1) against U(0,1), univariate Tukey depth";
  } else if (name == "table3-size" || name == "table3" || name == "table3-power") {
    reject_param();
    sc.p.model = sc.q.model = bm;
    if (name != "table3-size") sc.q.transforms = {Alternative::scale(0.8), Alternative::shift(0.15)};
    pr.depth = DepthSpec::integrated(InnerDepth::tukey);
    pr.description = name == "table3-size" ? "Brownian motion against Brownian motion, integrated Tukey depth"
                                           : "Brownian motion against 0.8 B + 0.15, integrated Tukey depth";
  } else if (name == "table6" || name == "table7") {
    sc.p.model = DataModel{ModelKind::gauss, 1.0, {0.0, 0.0}, 1.0};
    if (name == "table6") {
      const double c = param.value_or(0.4);
      sc.q.model = DataModel{ModelKind::gauss, 1.0, {c, c}, 1.0};
      pr.description = "N(0, I) against N((c,c), I) in the plane, Tukey depth";
    } else {
      const double c = param.value_or(1.2);
      sc.q.model = DataModel{ModelKind::gauss, 1.0, {0.2, 0.2}, c};
      pr.description = "N(0, I) against N((0.2,0.2), c I) in the plane, Tukey depth";
    }
  } else if (name == "table8-model1" || name == "table8-model2" || name == "table8-model3") {
    reject_param();
    const ModelKind k = name == "table8-model1"   ? ModelKind::brownian
                        : name == "table8-model2" ? ModelKind::fourier_fast
                                                  : ModelKind::fourier_slow;
    sc.p.model = sc.q.model = DataModel{k};
    pr.depth = DepthSpec::integrated(InnerDepth::tukey);
    pr.methods = {TestConfig::of(Method::joint_tp)};
    pr.description = "null hypothesis on the chosen curve model";
  } else if (name == "table9-shape") {
    reject_param();
    sc.p.model = DataModel{ModelKind::shape_flat};
    sc.q.model = DataModel{ModelKind::shape_zigzag};
    pr.depth = DepthSpec::h_depth(Bandwidth::adaptive(0.15));
    pr.methods = {TestConfig::of(Method::joint_tp)};
    pr.description = "constant curves against sawtooth curves";
  } else if (name.starts_with("tableC6-")) {
    reject_param();
    std::string_view v = name.substr(8);
    if (v == "outliers") v = "b";
    if (v.size() != 1 || v[0] < 'a' || v[0] > 'g') throw DataError(ErrorKind::parse, "unknown scenario '" + std::string(full) + "'");
    const char c = v[0];
    sc.p.model = sc.q.model = bm;
    if (c >= 'd') sc.q.transforms.push_back(Alternative::shift(0.25));
    const auto out = Alternative::outlier(1, 50.0);
    if (c == 'b' || c == 'e') {
      sc.p.transforms.push_back(out);
      sc.q.transforms.push_back(out);
    } else if (c == 'c' || c == 'f') {
      sc.p.transforms.push_back(out);
    } else if (c == 'g') {
      sc.q.transforms.push_back(out);
    }
    pr.depth = DepthSpec::integrated(InnerDepth::tukey);
    pr.methods = {TestConfig::of(Method::joint_tp)};
    pr.description = "Brownian motion with additive +50 outliers, scenario (" + std::string(1, c) + ")";
  } else {
    throw DataError(ErrorKind::parse, "unknown scenario '" + std::string(full) + "'");
  }
  return pr;
}

}  // namespace depthgate
