#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "depthgate/depth_multivariate.hpp"
#include "oracles.hpp"

using namespace depthgate;

namespace {

MultivariateSample plane(const std::vector<oracle::P2>& pts) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : pts) rows.push_back({p.x, p.y});
  return MultivariateSample(2, rows);
}

std::vector<oracle::P2> random_cloud(std::mt19937_64& g, std::size_t m, bool lattice) {
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> lat(-2, 2);
  std::vector<oracle::P2> pts(m);
  for (auto& p : pts) p = lattice ? oracle::P2{double(lat(g)), double(lat(g))} : oracle::P2{n01(g), n01(g)};
  return pts;
}

std::vector<double> pt(double a, double b) { return {a, b}; }

}  // namespace

TEST_CASE("planar Tukey depth examples", "[multivariate]") {
  const auto diamond = plane({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  CHECK(tukey_md(pt(0, 0), diamond) == 0.5);
  CHECK(tukey_md(pt(5, 5), diamond) == 0.0);
  const auto single = plane({{0.3, 0.7}});
  CHECK(tukey_md(pt(0.3, 0.7), single) == 1.0);
}

TEST_CASE("planar depths match naive oracles", "[multivariate]") {
  std::mt19937_64 g(21);
  for (int rep = 0; rep < 120; ++rep) {
    const bool lattice = rep % 3 == 0;
    const std::size_t m = 3 + rep % 23;
    const auto pts = random_cloud(g, m, lattice);
    const auto s = plane(pts);
    std::vector<oracle::P2> queries = random_cloud(g, 6, lattice);
    queries.insert(queries.end(), pts.begin(), pts.begin() + std::min<std::size_t>(3, m));
    for (const auto& q : queries) {
      const auto x = pt(q.x, q.y);
      INFO("rep " << rep << " m " << m << " lattice " << lattice << " query " << q.x << "," << q.y);
      REQUIRE(tukey_md(x, s) == oracle::tukey_2d(q, pts));
      REQUIRE(simplicial_md(x, s) == Catch::Approx(oracle::simplicial_2d(q, pts)).epsilon(1e-14));
    }
  }
}

TEST_CASE("simplicial depth in the plane", "[multivariate]") {
  const auto tri = plane({{0, 0}, {1, 0}, {0, 1}});
  CHECK(simplicial_md(pt(0.2, 0.2), tri) == 1.0);
  CHECK(simplicial_md(pt(2, 2), tri) == 0.0);
  CHECK_THROWS_AS(simplicial_md(pt(0, 0), plane({{0, 0}, {1, 1}})), ComputeError);
}

TEST_CASE("one-dimensional U-statistic depths coincide", "[multivariate]") {
  std::mt19937_64 g(7);
  for (int rep = 0; rep < 100; ++rep) {
    const auto v = rep % 2 ? oracle::tied_values(g, 2 + rep % 25, 7) : oracle::uniform_values(g, 2 + rep % 25);
    const auto s = MultivariateSample::univariate(v);
    const SortedSample1D sorted(v);
    std::vector<double> queries(v.begin(), v.end());
    queries.insert(queries.end(), {-3.0, 0.0, 0.3, 1.25, 2.0});
    for (double x : queries) {
      const std::vector<double> xv{x};
      const double sd = simplicial1d(x, sorted);
      REQUIRE(simplicial_md(xv, s) == sd);
      REQUIRE(spherical_md(xv, s) == sd);
      REQUIRE(lens_md(xv, s) == sd);
      REQUIRE(band_md(xv, s, 2) == sd);
      REQUIRE(tukey_md(xv, s) == tukey1d(x, sorted));
    }
  }
}

TEST_CASE("simplicial depth in three dimensions", "[multivariate]") {
  const MultivariateSample tet(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(simplicial_md(std::vector<double>{0.1, 0.1, 0.1}, tet) == 1.0);
  CHECK(simplicial_md(std::vector<double>{1, 1, 1}, tet) == 0.0);
  CHECK(simplicial_md(std::vector<double>{0, 0, 0}, tet) == 1.0);
  CHECK_THROWS_AS(simplicial_md(std::vector<double>{0, 0, 0}, tet, 0), ComputeError);
  CHECK_THROWS_AS(tukey_md(std::vector<double>{0, 0, 0}, tet), ComputeError);
}

TEST_CASE("spherical and lens depth examples", "[multivariate]") {
  const auto two = plane({{0, 0}, {2, 2}});
  CHECK(spherical_md(pt(1, 1), two) == 1.0);
  CHECK(spherical_md(pt(100, 100), two) == 0.0);
  CHECK(lens_md(pt(1, 1), two) == 1.0);
  CHECK(lens_md(pt(100, -100), two) == 0.0);
  // x on a sample point: the pair is in the lens iff the partner is at least as far from X_i as from x
  const auto three = plane({{0, 0}, {1, 0}, {5, 0}});
  CHECK(lens_md(pt(0, 0), three) == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("band depths against subset enumeration", "[multivariate]") {
  std::mt19937_64 g(17);
  std::normal_distribution<double> n01;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = 4 + rep % 7;
    std::vector<std::vector<double>> rows(m, std::vector<double>(2));
    for (auto& r : rows)
      for (auto& c : r) c = n01(g);
    const MultivariateSample s(2, rows);
    for (int q = 0; q < 5; ++q) {
      const std::vector<double> x{0.5 * n01(g), 0.5 * n01(g)};
      const double b2 = oracle::band(x, rows, 2), b3 = oracle::band(x, rows, 3);
      CHECK(band_md(x, s, 2) == Catch::Approx(b2).epsilon(1e-14));
      CHECK(band_md(x, s, 3) == Catch::Approx(b3).epsilon(1e-14));
      CHECK(band_sum_md(x, s, 3) == Catch::Approx(b2 + b3).epsilon(1e-14));
      CHECK(band_sum_md(x, s, 2) == band_md(x, s, 2));
    }
  }
  const auto two = plane({{0, 0}, {2, 3}});
  CHECK(band_md(pt(1, 1), two, 2) == 1.0);
  CHECK(band_md(pt(3, 1), two, 2) == 0.0);
  CHECK(band_sum_md(pt(3, 1), two, 2) == 0.0);
  CHECK_THROWS_AS(band_md(pt(0, 0), two, 1), DataError);
}

TEST_CASE("depths are invariant under rigid motions", "[multivariate]") {
  std::mt19937_64 g(33);
  // Rotation by a right angle plus an integer shift is exact in floating point.
  const auto pts = random_cloud(g, 15, true);
  std::vector<oracle::P2> moved;
  for (const auto& p : pts) moved.push_back({-p.y + 3, p.x - 1});
  const auto s = plane(pts), t = plane(moved);
  for (const auto& q : random_cloud(g, 10, true)) {
    const auto x = pt(q.x, q.y), y = pt(-q.y + 3, q.x - 1);
    CHECK(tukey_md(x, s) == tukey_md(y, t));
    CHECK(simplicial_md(x, s) == simplicial_md(y, t));
    CHECK(spherical_md(x, s) == spherical_md(y, t));
    CHECK(lens_md(x, s) == lens_md(y, t));
  }
}

TEST_CASE("random directions", "[multivariate]") {
  const auto a = make_directions(3, 20, 42), b = make_directions(3, 20, 42);
  CHECK(a.directions == b.directions);
  for (const auto& v : a.directions) {
    double n2 = 0;
    for (double c : v) n2 += c * c;
    CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-12);
  }
  const auto one = make_directions(1, 1, 5);
  CHECK(std::abs(one.directions[0][0]) == 1.0);
  CHECK(make_directions(3, 20, 43).directions != a.directions);
}

TEST_CASE("dimension checks", "[multivariate]") {
  const auto s = plane({{0, 0}, {1, 1}, {2, 0}});
  CHECK_THROWS_AS(tukey_md(std::vector<double>{0.0}, s), DataError);
  CHECK_THROWS_AS(spherical_md(std::vector<double>{0, 0, 0}, s), DataError);
}
