#include <catch_amalgamated.hpp>

#include <random>

#include "depthgate/ls_core.hpp"
#include "oracles.hpp"

using namespace depthgate;

namespace {

Sample points(std::vector<double> v) { return MultivariateSample::univariate(v); }

/// Mean generalised rank straight from the definition.
double naive_ls(const std::vector<double>& ref, const std::vector<double>& q) {
  double acc = 0.0;
  for (double y : q) {
    const double dy = oracle::tukey_1d(y, ref);
    double r = 0.0;
    for (double x : ref) {
      const double dx = oracle::tukey_1d(x, ref);
      r += dx < dy ? 1.0 : dx == dy ? 0.5 : 0.0;
    }
    acc += r / static_cast<double>(ref.size());
  }
  return acc / static_cast<double>(q.size());
}

}  // namespace

TEST_CASE("ranks from depths", "[ls]") {
  const std::vector<double> ref{0.1, 0.2, 0.3};
  CHECK(ranks_from_depths(ref, std::vector<double>{0.25}, RankMode::tie_split)[0] == Catch::Approx(2.0 / 3.0));
  CHECK(ranks_from_depths(ref, std::vector<double>{0.2}, RankMode::tie_split)[0] == 0.5);
  CHECK(ranks_from_depths(ref, std::vector<double>{0.2}, RankMode::tie_inclusive)[0] == Catch::Approx(2.0 / 3.0));
  const std::vector<double> flat{0.4, 0.4, 0.4};
  for (double r : ranks_from_depths(flat, flat, RankMode::tie_split)) CHECK(r == 0.5);
}

TEST_CASE("LS statistic examples", "[ls]") {
  CHECK(ls_statistic(points({0}), points({1}), DepthSpec::tukey()) == 0.0);
  CHECK(ls_statistic(points({0, 1}), points({0.25, 2}), DepthSpec::tukey()) == 0.25);
  // distinct Tukey depths need an odd number of distinct, asymmetric ranks; use the depth vector directly
  const std::vector<double> d{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(ls_from_depths(d, d, RankMode::tie_split) == 0.5);
}

TEST_CASE("LS statistic matches the definition", "[ls]") {
  std::mt19937_64 g(2);
  for (int rep = 0; rep < 40; ++rep) {
    const auto a = rep % 2 ? oracle::tied_values(g, 5 + rep % 11, 6) : oracle::uniform_values(g, 5 + rep % 11);
    const auto b = oracle::uniform_values(g, 3 + rep % 7);
    CHECK(ls_statistic(points(a), points(b), DepthSpec::tukey()) == Catch::Approx(naive_ls(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("LS tuple symmetry and the Tukey sum bound", "[ls]") {
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(30 + rep % 20), b(25 + rep % 13);
    for (auto& x : a) x = u(g);
    for (auto& x : b) x = 0.7 * u(g) + (rep % 3) * 0.1;
    const LSTuple t = ls_tuple(points(a), points(b), DepthSpec::tukey());
    const LSTuple s = ls_tuple(points(b), points(a), DepthSpec::tukey());
    CHECK(t.ls_pq == s.ls_qp);
    CHECK(t.ls_qp == s.ls_pq);
    CHECK(t.m == s.n);
    CHECK(t.ls_pq + t.ls_qp <= 1.0);
  }
}

TEST_CASE("identical samples give the centre", "[ls]") {
  std::mt19937_64 g(19);
  std::vector<std::vector<double>> rows(9, std::vector<double>(2));
  std::normal_distribution<double> n01;
  for (auto& r : rows)
    for (auto& c : r) c = n01(g);
  const Sample s = MultivariateSample(2, rows);
  const LSTuple t = ls_tuple(s, s, DepthSpec::spherical());
  CHECK(t.ls_pq == 0.5);
  CHECK(t.ls_qp == 0.5);
}

TEST_CASE("scaled statistics", "[ls]") {
  const auto c = scaled_stats({0.5, 0.5, 30, 70});
  CHECK(c.diff_std == 0.0);
  CHECK(c.sum_centered == 0.0);
  CHECK(scaled_stats({0.40, 0.60, 100, 100}).diff_std == Catch::Approx(-2.4495).margin(1e-4));
  CHECK(scaled_stats({0.45, 0.35, 100, 100}).sum_centered == Catch::Approx(-0.20));
  CHECK(scaled_stats({0.45, 0.35, 100, 100}).scale == Catch::Approx(std::sqrt(600.0)));
  CHECK_THROWS_AS(scaled_stats({1.5, 0.5, 10, 10}), DataError);
}

TEST_CASE("depth ranks of queries", "[ls]") {
  const auto r = depth_ranks(points({2.5, 10}), points({1, 2, 3, 4}), DepthSpec::tukey());
  // self depths 1/4, 1/2, 1/2, 1/4; query depths 1/2 and 0
  CHECK(r[0] == Catch::Approx(0.75));
  CHECK(r[1] == 0.0);
  CHECK(parse_rank_mode(to_string(RankMode::tie_inclusive)) == RankMode::tie_inclusive);
}
