#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "depthgate/decision.hpp"

using namespace depthgate;

TEST_CASE("normal and chi-squared quantiles", "[decision]") {
  CHECK(inv_norm(0.5) == 0.0);
  CHECK(inv_norm(0.975) == Catch::Approx(1.959964).margin(1e-6));
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(1e-10, 1.0 - 1e-10);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(g);
    CHECK(std::abs(inv_norm(p) + inv_norm(1.0 - p)) < 1e-12);
    CHECK(norm_cdf(inv_norm(p)) == Catch::Approx(p).epsilon(1e-12));
  }
  CHECK(inv_chi2_1(0.95) == Catch::Approx(3.841459).margin(1e-5));
  CHECK(inv_chi2_1(1e-12) < 1e-20);
  double prev = 0.0;
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const double q = inv_chi2_1(p);
    CHECK(q > prev);
    prev = q;
  }
  CHECK_THROWS_AS(inv_norm(0.0), DataError);
  CHECK_THROWS_AS(inv_norm(1.0), DataError);
}

TEST_CASE("contraction values", "[decision]") {
  CHECK(gamma1(100, 100) == Catch::Approx(0.080015).margin(1e-6));
  CHECK(gamma1(400, 400) == Catch::Approx(gamma1(100, 100) / 2.0).epsilon(1e-14));
  CHECK(gamma1(30, 70) == gamma1(70, 30));
  CHECK(contraction_xi(100, 100, ContractionRule::Xi::exp_neg_100) == Catch::Approx(0.135335).margin(1e-6));
  CHECK(contraction_delta(100, 100, ContractionRule::Delta::rate_three_quarters) ==
        Catch::Approx(0.053183).margin(1e-6));
  CHECK(gamma2(100, 100) == Catch::Approx(0.056815).margin(1e-6));
  CHECK(gamma2(30, 70) == gamma2(70, 30));
  for (std::size_t m : {20, 50, 100, 300})
    for (std::size_t n : {20, 60, 200}) {
      if (contraction_delta(m, n, ContractionRule::Delta::rate_three_quarters) <= gamma1(m, n))
        CHECK(gamma2(m, n) <= gamma1(m, n));
    }
  const ContractionRule enlarged{ContractionRule::Xi::exp_neg_100, ContractionRule::Delta::log_enlarged};
  CHECK(contraction_delta(100, 100, enlarged.delta) <= gamma1(100, 100));
}

TEST_CASE("method names", "[decision]") {
  for (const char* n : {"proj-pq", "proj-qp", "difference", "maximum", "joint-tp", "joint-cc", "ellipsoid:0.25"})
    CHECK(format_method(parse_method(n)) == n);
  CHECK_THROWS_AS(parse_method("ellipsoid:1.5"), DataError);
  CHECK_THROWS_AS(parse_method("bogus"), DataError);
}

TEST_CASE("the centre is accepted by every rule", "[decision]") {
  for (Method m : {Method::proj_pq, Method::proj_qp, Method::difference, Method::maximum, Method::ellipsoid,
                   Method::joint_tp, Method::joint_cc}) {
    const auto out = decide({0.5, 0.5, 100, 100}, TestConfig::of(m));
    CHECK_FALSE(out.reject);
    CHECK(out.p_value == 1.0);
  }
}

TEST_CASE("joint rule examples", "[decision]") {
  const auto cfg = TestConfig::of(Method::joint_tp);
  const auto low = decide({0.30, 0.30, 100, 100}, cfg);
  CHECK(low.reject);
  CHECK(low.below_resolution);
  CHECK(low.statistics.at("sum_projection") == Catch::Approx(0.4243).margin(1e-4));
  CHECK(low.statistics.at("bound_II") == Catch::Approx(0.59395).margin(1e-5));
  for (double a : {0.5, 0.1, 1e-6}) CHECK(decide({0.30, 0.30, 100, 100}, TestConfig::of(Method::joint_tp, a)).reject);

  const auto wide = decide({0.40, 0.60, 100, 100}, cfg);
  CHECK(wide.reject);
  CHECK_FALSE(wide.below_resolution);
  CHECK(std::abs(0.40 - 0.60) / std::sqrt(2.0) == Catch::Approx(0.14142).margin(1e-5));
  CHECK(wide.statistics.at("bound_I") > 0.08);
  CHECK(wide.statistics.at("bound_I") < 0.14142);
}

TEST_CASE("rule (I) is the Gaussian bound on the difference", "[decision]") {
  // |ls_pq - ls_qp|/sqrt(2) > bound_I exactly when |diff_std| > z
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.3, 0.7);
  for (int i = 0; i < 2000; ++i) {
    const LSTuple t{u(g), u(g), 80, 120};
    const auto out = decide(t, TestConfig::of(Method::joint_tp));
    if (out.below_resolution) continue;
    const bool geometric = std::abs(t.ls_pq - t.ls_qp) / std::sqrt(2.0) > out.statistics.at("bound_I");
    const double margin = std::abs(std::abs(t.ls_pq - t.ls_qp) / std::sqrt(2.0) - out.statistics.at("bound_I"));
    if (margin > 1e-12) CHECK(out.reject == geometric);
  }
}

TEST_CASE("joint rectangle geometry", "[decision]") {
  const std::size_t m = 100, n = 100;
  const double c = gamma1(m, n);
  const auto th = thresholds(m, n, TestConfig::of(Method::joint_tp));
  // the tip of the non-rejection region touches the maximum rule's boundary
  CHECK(scaled_stats({0.5 - c, 0.5 - c, m, n}).scale * c == Catch::Approx(std::sqrt(th.chi2_95)).epsilon(1e-12));
  // the lower corners lie on rule (I)
  const LSTuple corner{0.5 + c, 0.5 - c, m, n};
  CHECK(std::abs(corner.ls_pq - corner.ls_qp) / std::sqrt(2.0) == Catch::Approx(th.bound_I).epsilon(1e-12));
  // the half-weight ellipsoid's acceptance disc is inscribed in the rectangle
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  const auto ell = TestConfig::ellipsoid(0.5);
  const auto tp = TestConfig::of(Method::joint_tp);
  for (int i = 0; i < 10000; ++i) {
    const LSTuple t{0.5 + u(g), 0.5 + u(g), m, n};
    if (!decide(t, ell).reject) CHECK_FALSE(decide(t, tp).reject);
  }
}

TEST_CASE("symmetric cutoff", "[decision]") {
  TestConfig cfg = TestConfig::of(Method::joint_tp);
  CHECK_FALSE(decide({0.6, 0.6, 100, 100}, cfg).reject);
  cfg.symmetric_cutoff = true;
  const auto out = decide({0.6, 0.6, 100, 100}, cfg);
  CHECK(out.reject);
  CHECK(out.below_resolution);
}

TEST_CASE("p-values agree with decisions", "[decision]") {
  TestConfig tp = TestConfig::of(Method::joint_tp);
  const double h = std::sqrt(3.0 * 50.0);
  const double d = 1.959964 / h;
  CHECK(p_value({0.5 + d / 2, 0.5 - d / 2, 100, 100}, tp) == Catch::Approx(0.05).margin(1e-4));
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(0.25, 0.75);
  for (Method m : {Method::proj_pq, Method::proj_qp, Method::difference, Method::maximum, Method::ellipsoid,
                   Method::joint_tp, Method::joint_cc})
    for (int i = 0; i < 500; ++i) {
      const LSTuple t{u(g), u(g), 60, 90};
      for (double a : {0.01, 0.05, 0.1}) {
        const auto out = decide(t, TestConfig::of(m, a));
        const double p = out.p_value;
        if (std::abs(p - a) > 1e-9) CHECK(out.reject == (p < a));
      }
    }
}

TEST_CASE("rejection grows as the tuple moves away from the centre", "[decision]") {
  for (Method m : {Method::difference, Method::maximum, Method::joint_tp, Method::joint_cc}) {
    double prev = 1.0;
    for (double d = 0.0; d < 0.3; d += 0.01) {
      const double p = p_value({0.5 + d, 0.5 - 1.5 * d, 100, 100}, TestConfig::of(m));
      CHECK(p <= prev + 1e-15);
      prev = p;
    }
  }
}
