#include <catch_amalgamated.hpp>

#include <sstream>

#include "depthgate/io.hpp"

using namespace depthgate;

TEST_CASE("curve files", "[io]") {
  std::istringstream two("0,0.5,1\n1,2,3\n4,5,6\n");
  const auto s = read_curves(two);
  CHECK(s.size() == 2);
  CHECK_FALSE(s.has_missing());
  CHECK(s.value(1, 2) == 6.0);

  std::istringstream na("0,0.5,1\n1,2,3\n4,5,6\n7,NA,9\n");
  const auto m = read_curves(na);
  CHECK(m.has_missing());
  CHECK_FALSE(m.observed(2, 1));
  CHECK(m.observed(2, 0));
  CHECK(m.observed(1, 1));

  std::istringstream bad("0,0.6,0.5\n1,2,3\n");
  CHECK_THROWS_AS(read_curves(bad), DataError);
  std::istringstream ragged("0,0.5,1\n1,2\n");
  CHECK_THROWS_AS(read_curves(ragged), DataError);
  std::istringstream empty_row("0,1\nNA,NA\n3,4\n");
  CHECK_THROWS_AS(read_curves(empty_row), DataError);
  std::istringstream empty_row2("0,1\nNA,NA\n3,4\n");
  CHECK(read_curves(empty_row2, true).size() == 1);
}

TEST_CASE("curve and point round trips", "[io]") {
  const FunctionalSample s(Grid::equidistant(4), {{0.1, -2.5e-7, 3.0, 1.0 / 3.0}, {5, 6, 7, 8}},
                           {{true, true, false, true}, {true, true, true, true}});
  std::stringstream buf;
  write_curves(buf, s);
  const auto back = read_curves(buf);
  CHECK(back.grid() == s.grid());
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(back.observed(i, t) == s.observed(i, t));
      if (s.observed(i, t)) CHECK(back.value(i, t) == s.value(i, t));
    }

  const MultivariateSample p(2, {{0.1, 0.2}, {1e300, -1.0 / 7.0}});
  std::stringstream pb;
  write_points(pb, p);
  const auto pr = read_points(pb);
  CHECK(std::equal(pr.raw_values().begin(), pr.raw_values().end(), p.raw_values().begin()));
}

TEST_CASE("timestamps", "[io]") {
  CHECK(parse_timestamp("1970-01-01") == 0);
  CHECK(parse_timestamp("1970-01-02T00:00:00Z") == 86400);
  CHECK(parse_timestamp("2020-03-01 01:30") == parse_timestamp("2020-02-29T23:30:00-02:00"));
  CHECK(parse_timestamp("2000-02-29T12:00:00.25+01:00") == parse_timestamp("2000-02-29T11:00:00"));
  CHECK_THROWS_AS(parse_timestamp("2019-02-29"), DataError);
  CHECK_THROWS_AS(parse_timestamp("garbage"), DataError);
}

TEST_CASE("daily medians", "[io]") {
  CHECK(median_of({10, 11, 12}) == 11.0);
  CHECK(median_of({1, 4}) == 2.5);
  std::istringstream raw(
      "id,time,temp\n"
      "a,2019-01-01T01:00:00Z,10\n"
      "a,2019-01-01T05:00:00Z,NA\n"
      "a,2019-01-01T09:00:00Z,11\n"
      "a,2019-01-01T23:00:00Z,12\n"
      "a,2019-01-03T00:00:00Z,7\n");
  const auto d = prep_drifter(raw, 2019, DrifterMode::masked);
  CHECK(d.sample.grid_size() == 365);
  CHECK(d.ids == std::vector<std::string>{"a"});
  CHECK(d.sample.value(0, 0) == 11.0);
  CHECK_FALSE(d.sample.observed(0, 1));
  CHECK(d.sample.value(0, 2) == 7.0);
  CHECK(d.sample.grid()[364] == 1.0);
}

TEST_CASE("leap day averaging", "[io]") {
  std::istringstream raw(
      "b,2020-02-28T12:00:00Z,20\n"
      "b,2020-02-29T12:00:00Z,22\n"
      "b,2020-03-01T12:00:00Z,24\n"
      "b,2020-12-31T12:00:00Z,5\n");
  const auto d = prep_drifter(raw, 2020, DrifterMode::masked);
  CHECK(d.sample.grid_size() == 365);
  CHECK(d.sample.value(0, 58) == 21.0);
  CHECK(d.sample.value(0, 59) == 23.0);
  CHECK(d.sample.value(0, 364) == 5.0);
}

TEST_CASE("drifter filtering and errors", "[io]") {
  std::istringstream partial("c,2019-06-01,3\n");
  CHECK_THROWS_AS(prep_drifter(partial, 2019, DrifterMode::full), DataError);
  std::istringstream dup("c,2019-06-01T00:00:00Z,3\nc,2019-06-01T00:00:00Z,4\n");
  CHECK_THROWS_AS(prep_drifter(dup, 2019, DrifterMode::masked), DataError);
  std::istringstream other_year("c,2018-06-01,3\nd,2019-06-01,1\n");
  const auto d = prep_drifter(other_year, 2019, DrifterMode::masked);
  CHECK(d.ids == std::vector<std::string>{"d"});
  CHECK(d.dropped == 1);
}

TEST_CASE("run configuration round trip", "[io]") {
  const json cfg = json::parse(R"({"scenario":"table6:0.6","trials":7,"seed":3,"methods":["joint-cc","ellipsoid:0.3"],
                                   "alpha":0.1,"contraction":{"delta":"log-enlarged"}})");
  const ResolvedRun r = resolve(run_config_from_json(cfg));
  CHECK(r.scenario.trials == 7);
  CHECK(r.scenario.seed == 3);
  CHECK(r.methods.size() == 2);
  CHECK(r.methods[1].weight == 0.3);
  CHECK(r.methods[0].rule.delta == ContractionRule::Delta::log_enlarged);
  const ResolvedRun again = resolve(run_config_from_json(to_json(r)));
  CHECK(again.scenario == r.scenario);
  CHECK(again.methods == r.methods);
  CHECK(format_depth(again.depth) == format_depth(r.depth));
  CHECK(to_json(again).dump() == to_json(r).dump());

  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"scenaro":"fig2-null"})")), DataError);
  CHECK_THROWS_AS(resolve(run_config_from_json(json::parse(R"({"trials":5})"))), DataError);
}

TEST_CASE("custom scenario defaults", "[io]") {
  const json cfg = json::parse(R"({"scenario":{"name":"mine","p":{"model":{"kind":"brownian"}},
                                   "q":{"model":{"kind":"brownian"},"transforms":[{"kind":"shift","a":0.2}]},
                                   "m":10,"n":12,"grid_size":21,"trials":2,"seed":9}})");
  const ResolvedRun r = resolve(run_config_from_json(cfg));
  CHECK(r.depth.family == DepthFamily::integrated);
  CHECK(r.scenario.q.transforms.at(0) == Alternative::shift(0.2));
  CHECK(r.scenario.n == 12);
}

TEST_CASE("result CSV", "[io]") {
  std::ostringstream out;
  write_scatter_csv(out, {{0.5, 0.25, 3, 4}});
  CHECK(out.str() == "ls_pq,ls_qp\n0.5,0.25\n");
}
