#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "depthgate/simulate.hpp"

using namespace depthgate;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0;
};

template <class Draw>
Moments moments(std::size_t n, Draw draw) {
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  return {mean, s2 / n - mean * mean};
}

}  // namespace

TEST_CASE("streams", "[simulate]") {
  Stream a = rng_for_trial(5, 3, StreamTag::sample_p), b = rng_for_trial(5, 3, StreamTag::sample_p);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> seen;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Stream s = rng_for_trial(5, trial, StreamTag::sample_p);
    for (int i = 0; i < 64; ++i) seen.insert(s.next_u64());
  }
  CHECK(seen.size() == 50 * 64);
  CHECK(derive_seed(5, 3, StreamTag::sample_p) != derive_seed(5, 3, StreamTag::sample_q));
  Stream u(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("normal draws", "[simulate]") {
  Stream s(77);
  const auto mo = moments(200000, [&] { return s.normal(); });
  CHECK(std::abs(mo.mean) < 0.01);
  CHECK(std::abs(mo.var - 1.0) < 0.02);
}

TEST_CASE("Brownian paths", "[simulate]") {
  const Grid grid = Grid::equidistant(101);
  Stream s(3);
  const std::size_t N = 5000;
  std::vector<double> sum(101, 0.0);
  double end2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto path = gen_brownian(grid, s);
    CHECK(path[0] == 0.0);
    for (std::size_t t = 0; t < path.size(); ++t) sum[t] += path[t];
    end2 += path.back() * path.back();
  }
  CHECK(std::abs(end2 / N - 1.0) < 0.06);
  for (std::size_t t = 1; t < sum.size(); ++t) CHECK(std::abs(sum[t] / N) < 3.0 * std::sqrt(grid[t] / N));
  CHECK_THROWS_AS(gen_brownian(Grid({0.0, 0.1, 0.5}), s), DataError);
}

TEST_CASE("Fourier models", "[simulate]") {
  CHECK(kHarmonic20 == Catch::Approx(3.597740).margin(1e-6));
  double h = 0.0;
  for (int j = 1; j <= 20; ++j) h += 1.0 / j;
  CHECK(kHarmonic20 == Catch::Approx(h).epsilon(1e-15));

  const Grid grid = Grid::equidistant(21);  // t = 1/2 at index 10
  const FourierBasis basis(grid);
  double fast = 0.0, slow = 0.0;
  for (std::size_t l = 1; l <= 20; ++l) {
    const double e = basis(l, 10);
    fast += FourierBasis::variance(l, FourierMode::fast) * e * e;
    slow += FourierBasis::variance(l, FourierMode::slow) * e * e;
  }
  Stream s(9);
  const std::size_t N = 20000;
  const auto mf = moments(N, [&] { return gen_fourier(basis, s, FourierMode::fast)[10]; });
  const auto ms = moments(N, [&] { return gen_fourier(basis, s, FourierMode::slow)[10]; });
  CHECK(std::abs(mf.var / fast - 1.0) < 0.05);
  CHECK(std::abs(ms.var / slow - 1.0) < 0.05);
  CHECK(std::abs(mf.mean) < 4.0 * std::sqrt(fast / N));
  CHECK(std::abs(ms.mean) < 4.0 * std::sqrt(slow / N));
}

TEST_CASE("shape models", "[simulate]") {
  const Grid grid = Grid::equidistant(201);
  Stream s(4);
  const auto flat = gen_shape(grid, s, ShapeKind::flat);
  for (double v : flat) CHECK(v == flat[0]);
  const std::size_t N = 5000;
  std::vector<std::vector<double>> z;
  for (std::size_t i = 0; i < N; ++i) z.push_back(gen_shape(grid, s, ShapeKind::zigzag));
  std::size_t outside = 0;
  for (const auto& c : z)
    for (double v : c) outside += !(v >= 0.0 && v < 1.0);
  CHECK(outside == 0);
  for (std::size_t t : {0, 37, 100, 151, 200}) {
    std::vector<double> col;
    for (const auto& c : z) col.push_back(c[t]);
    std::sort(col.begin(), col.end());
    double sup = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      sup = std::max({sup, std::abs(col[i] - double(i) / N), std::abs(col[i] - double(i + 1) / N)});
    CHECK(sup < 0.03);
  }
}

TEST_CASE("alternatives", "[simulate]") {
  ScenarioSpec sc;
  sc.p.model = sc.q.model = DataModel{ModelKind::brownian};
  sc.grid_size = 51;
  sc.m = sc.n = 4;
  sc.q.transforms = {Alternative::shift(0.0)};
  const SampleFactory f(sc);
  const auto [p, q] = f.draw_trial(0);
  ScenarioSpec plain = sc;
  plain.q.transforms.clear();
  const auto [p2, q2] = SampleFactory(plain).draw_trial(0);
  const auto& a = std::get<FunctionalSample>(q);
  const auto& b = std::get<FunctionalSample>(q2);
  CHECK(std::equal(a.raw_values().begin(), a.raw_values().end(), b.raw_values().begin()));

  ScenarioSpec out = plain;
  out.q.transforms = {Alternative::outlier(1, 50.0)};
  const auto [p3, q3] = SampleFactory(out).draw_trial(0);
  const auto& c = std::get<FunctionalSample>(q3);
  for (std::size_t t = 0; t < 51; ++t) {
    CHECK(c.value(0, t) == b.value(0, t) + 50.0);
    CHECK(c.value(1, t) == b.value(1, t));
  }
  CHECK_THROWS_AS(Alternative::loc_scale(0.7).validate(true), DataError);
  CHECK_THROWS_AS(Alternative::sine_shift(0.1).validate(false), DataError);
}

TEST_CASE("loc-scale keeps the pointwise variance for small a", "[simulate]") {
  ScenarioSpec sc;
  sc.p.model = sc.q.model = DataModel{ModelKind::brownian};
  sc.grid_size = 11;
  sc.m = sc.n = 4000;
  sc.q.transforms = {Alternative::loc_scale(1e-9)};
  const auto [p, q] = SampleFactory(sc).draw_trial(1);
  const auto& qs = std::get<FunctionalSample>(q);
  double s2 = 0.0;
  for (std::size_t i = 0; i < qs.size(); ++i) s2 += qs.value(i, 10) * qs.value(i, 10);
  CHECK(std::abs(s2 / qs.size() - 1.0) < 0.08);
}

TEST_CASE("scenario registry", "[simulate]") {
  for (const auto& n : scenario_names()) CHECK_NOTHROW(scenario_preset(n).scenario.validate());
  CHECK(scenario_preset("table6:0.8").scenario.q.model.mean == std::vector<double>{0.8, 0.8});
  CHECK(scenario_preset("tableC6-outliers").scenario == [] {
    auto s = scenario_preset("tableC6-b").scenario;
    s.name = "tableC6-outliers";
    return s;
  }());
  CHECK_THROWS_AS(scenario_preset("fig2-null:3"), DataError);
  CHECK_THROWS_AS(scenario_preset("nope"), DataError);
}

TEST_CASE("experiments", "[simulate]") {
  auto pr = scenario_preset("fig2-null");
  pr.scenario.trials = 1;
  const auto one = run_experiment(pr.scenario, pr.depth, pr.methods);
  for (const auto& m : one.methods) CHECK((m.rate == 0.0 || m.rate == 1.0));

  pr.scenario.trials = 3;
  CHECK(run_tuple_scatter(pr.scenario, pr.depth).size() == 3);

  pr.scenario.trials = 200;
  const auto a = run_tuple_scatter(pr.scenario, pr.depth, {1});
  const auto b = run_tuple_scatter(pr.scenario, pr.depth, {4});
  CHECK(a == b);
  for (const auto& t : a) CHECK(t.ls_pq + t.ls_qp <= 1.0);

  auto alt = scenario_preset("thm2.1");
  alt.scenario.trials = 300;
  double mean = 0.0;
  for (const auto& t : run_tuple_scatter(alt.scenario, alt.depth)) mean += t.ls_qp;
  CHECK(std::abs(mean / 300 - 0.25) < 0.02);
}

TEST_CASE("randomised depths get per-trial seeds", "[simulate]") {
  ScenarioSpec sc = scenario_preset("table3-size").scenario;
  const DepthSpec d = DepthSpec::random_tukey(3, 11);
  CHECK(depth_for_trial(d, sc, 0).seed != depth_for_trial(d, sc, 1).seed);
  CHECK(depth_for_trial(d, sc, 4).seed == depth_for_trial(d, sc, 4).seed);
  CHECK(depth_for_trial(DepthSpec::tukey(), sc, 4).seed == DepthSpec::tukey().seed);
}

TEST_CASE("thread count", "[simulate]") {
  ::setenv("DEPTHGATE_THREADS", "2", 1);
  CHECK(resolve_threads(8) == 2);
  CHECK(resolve_threads(1) == 1);
  ::unsetenv("DEPTHGATE_THREADS");
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("worker errors propagate", "[simulate]") {
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw ComputeError(ErrorKind::degenerate, "boom");
                               }),
                  ComputeError);
}
