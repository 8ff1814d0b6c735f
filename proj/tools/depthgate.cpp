// depthgate command-line tool.
//
// Exit codes: 0 ok, 2 usage, 3 data error, 4 computation error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depthgate/depthgate.hpp"

namespace dg = depthgate;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TestOptions {
  std::string depth = "integrated-tukey";
  std::uint64_t depth_seed = 0;
  double jitter_sd = 1e-8;
  std::string rank_mode = "tie-split";
  std::vector<std::string> methods{"joint-tp"};
  double alpha = 0.05;
  bool symmetric_cutoff = false;
  std::string xi = "exp-neg-100";
  std::string delta = "rate-three-quarters";
  std::string kind = "auto";
  bool drop_empty = false;
};

void add_depth_options(CLI::App* cmd, TestOptions& o) {
  cmd->add_option("--depth", o.depth, "Depth function, e.g. integrated-tukey, h-adaptive, tukey, band:3")
      ->capture_default_str();
  cmd->add_option("--depth-seed", o.depth_seed, "Seed for randomised depths")->capture_default_str();
  cmd->add_option("--jitter-sd", o.jitter_sd, "Jitter standard deviation for the modified simplicial depth")
      ->capture_default_str();
  cmd->add_option("--rank-mode", o.rank_mode, "tie-split or tie-inclusive")->capture_default_str();
  cmd->add_option("--kind", o.kind, "Input kind: curves, points or auto")->capture_default_str();
  cmd->add_flag("--drop-empty", o.drop_empty, "Drop curves without any observed value");
}

void add_method_options(CLI::App* cmd, TestOptions& o) {
  cmd->add_option("--method", o.methods, "Test method(s): proj-pq, proj-qp, difference, maximum, ellipsoid:w, joint-tp, joint-cc")
      ->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Level")->capture_default_str();
  cmd->add_flag("--symmetric-cutoff", o.symmetric_cutoff, "Also cut the joint region above the secondary diagonal");
  cmd->add_option("--xi", o.xi, "Joint-CC xi rule: exp-neg-100, zero, one")->capture_default_str();
  cmd->add_option("--delta", o.delta, "Joint-CC delta rule: rate-three-quarters, log-enlarged")->capture_default_str();
}

dg::SampleKind parse_kind(const std::string& k) {
  if (k == "auto") return dg::SampleKind::automatic;
  if (k == "curves") return dg::SampleKind::curves;
  if (k == "points") return dg::SampleKind::points;
  throw UsageError("--kind must be curves, points or auto");
}

dg::DepthSpec depth_of(const TestOptions& o) {
  dg::DepthSpec d = dg::parse_depth(o.depth, o.depth_seed);
  d.jitter_sd = o.jitter_sd;
  d.validate();
  return d;
}

std::vector<dg::TestConfig> methods_of(const TestOptions& o) {
  std::vector<dg::TestConfig> out;
  for (const auto& name : o.methods) {
    dg::TestConfig c = dg::parse_method(name, o.alpha);
    c.symmetric_cutoff = o.symmetric_cutoff;
    c.rule = {dg::parse_xi(o.xi), dg::parse_delta(o.delta)};
    out.push_back(c);
  }
  return out;
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path);
  if (!file) throw dg::DataError(dg::ErrorKind::parse, "cannot write '" + path + "'");
  return &file;
}

dg::json echo_test_config(const TestOptions& o, const dg::DepthSpec& depth) {
  dg::json j;
  j["depth"] = dg::format_depth(depth);
  j["depth_seed"] = depth.seed;
  j["jitter_sd"] = depth.jitter_sd;
  j["rank_mode"] = o.rank_mode;
  j["methods"] = o.methods;
  j["alpha"] = o.alpha;
  j["symmetric_cutoff"] = o.symmetric_cutoff;
  j["contraction"] = {{"xi", o.xi}, {"delta", o.delta}};
  return j;
}

struct SimOptions {
  std::string scenario;
  std::string config;
  std::optional<std::size_t> trials, grid_size, m, n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> depth;
  std::optional<std::uint64_t> depth_seed;
  std::optional<std::string> rank_mode;
  std::vector<std::string> methods;
  std::optional<double> alpha;
  bool symmetric_cutoff = false;
  std::size_t threads = 0;
  bool tuples = false;
  std::string csv;
  std::string output;
};

void add_sim_options(CLI::App* cmd, SimOptions& o, bool with_methods) {
  cmd->add_option("--scenario", o.scenario, "Registry scenario name");
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--grid-size", o.grid_size, "Grid points for curve models");
  cmd->add_option("--m", o.m, "First sample size");
  cmd->add_option("--n", o.n, "Second sample size");
  cmd->add_option("--depth", o.depth, "Override the scenario depth");
  cmd->add_option("--depth-seed", o.depth_seed, "Seed for randomised depths");
  cmd->add_option("--rank-mode", o.rank_mode, "tie-split or tie-inclusive");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores; capped by DEPTHGATE_THREADS)");
  cmd->add_option("-o,--output", o.output, "Output file (default stdout)");
  if (with_methods) {
    cmd->add_option("--method", o.methods, "Override the scenario methods");
    cmd->add_option("--alpha", o.alpha, "Level");
    cmd->add_flag("--symmetric-cutoff", o.symmetric_cutoff, "Symmetric joint cut-off");
    cmd->add_flag("--tuples", o.tuples, "Store every LS-tuple in the JSON result");
    cmd->add_option("--csv", o.csv, "Also write rejection rates as CSV to this file");
  }
}

dg::ResolvedRun resolve_sim(const SimOptions& o) {
  if (o.scenario.empty() == o.config.empty()) throw UsageError("give exactly one of --scenario and --config");
  dg::RunConfig c;
  if (!o.config.empty()) {
    auto in = dg::open_input(o.config);
    dg::json j;
    try {
      j = dg::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw dg::DataError(dg::ErrorKind::parse, "config '" + o.config + "': " + e.what());
    }
    c = dg::run_config_from_json(j);
  } else {
    c.scenario_name = o.scenario;
  }
  if (o.trials) c.trials = o.trials;
  if (o.seed) c.seed = o.seed;
  if (o.grid_size) c.grid_size = o.grid_size;
  if (o.m) c.m = o.m;
  if (o.n) c.n = o.n;
  if (o.depth) c.depth = o.depth;
  if (o.depth_seed) c.depth_seed = *o.depth_seed;
  if (o.rank_mode) c.rank_mode = dg::parse_rank_mode(*o.rank_mode);
  if (!o.methods.empty()) c.methods = o.methods;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.symmetric_cutoff) c.symmetric_cutoff = true;
  return dg::resolve(c);
}

int run(int argc, char** argv) {
  CLI::App app{"Depth-based two-sample LS tests"};
  app.require_subcommand(1);

  TestOptions topt;
  std::string path_a, path_b, output;
  auto* test = app.add_subcommand("test", "Run LS tests on two samples");
  test->add_option("a", path_a, "First sample CSV")->required();
  test->add_option("b", path_b, "Second sample CSV")->required();
  add_depth_options(test, topt);
  add_method_options(test, topt);
  test->add_option("-o,--output", output, "Output file (default stdout)");

  TestOptions dopt;
  std::string sample_path, query_path, depth_output;
  auto* depth = app.add_subcommand("depth", "Depth of query elements with respect to a sample");
  depth->add_option("sample", sample_path, "Reference sample CSV")->required();
  depth->add_option("--query", query_path, "Query CSV (default: the sample itself)");
  add_depth_options(depth, dopt);
  depth->add_option("-o,--output", depth_output, "Output file (default stdout)");

  TestOptions uopt;
  std::string tuple_a, tuple_b, tuple_output;
  auto* tuple = app.add_subcommand("tuple", "LS-tuple of two samples");
  tuple->add_option("a", tuple_a, "First sample CSV")->required();
  tuple->add_option("b", tuple_b, "Second sample CSV")->required();
  add_depth_options(tuple, uopt);
  tuple->add_option("-o,--output", tuple_output, "Output file (default stdout)");

  SimOptions sopt;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rejection rates for a scenario");
  add_sim_options(simulate, sopt, true);

  SimOptions copt;
  auto* scatter = app.add_subcommand("scatter", "LS-tuple scatter for a scenario");
  add_sim_options(scatter, copt, false);

  std::string raw_path, drift_mode = "full", drift_output;
  int year = 0;
  auto* prep = app.add_subcommand("prep-drifter", "Daily median curves from raw drifter readings");
  prep->add_option("raw", raw_path, "Raw CSV: id, timestamp, temperature")->required();
  prep->add_option("--year", year, "Calendar year")->required();
  prep->add_option("--mode", drift_mode, "full or masked")->capture_default_str();
  prep->add_option("-o,--output", drift_output, "Output file (default stdout)");

  auto* scenarios = app.add_subcommand("scenarios", "List registry scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::ofstream file;
  if (*test) {
    const auto kind = parse_kind(topt.kind);
    const dg::Sample a = dg::read_sample(path_a, kind, topt.drop_empty);
    const dg::Sample b = dg::read_sample(path_b, kind, topt.drop_empty);
    const dg::DepthSpec spec = depth_of(topt);
    const auto methods = methods_of(topt);
    const dg::LSTuple t = dg::ls_tuple(a, b, spec, dg::parse_rank_mode(topt.rank_mode));
    dg::json j;
    j["config"] = echo_test_config(topt, spec);
    j["tuple"] = dg::to_json(t);
    j["outcomes"] = dg::json::array();
    for (const auto& m : methods) {
      const dg::TestOutcome o = dg::decide(t, m);
      j["outcomes"].push_back(dg::to_json(o, m));
      std::cerr << dg::format_method(m) << ": " << (o.reject ? "reject" : "accept") << " at alpha "
                << dg::format_double(o.alpha) << ", p "
                << (o.below_resolution ? std::string("below resolution") : dg::format_double(o.p_value)) << '\n';
    }
    *open_output(output, file) << j.dump(2) << '\n';
  } else if (*depth) {
    const auto kind = parse_kind(dopt.kind);
    const dg::Sample ref = dg::read_sample(sample_path, kind, dopt.drop_empty);
    const dg::DepthSpec spec = depth_of(dopt);
    const dg::ReferenceDepth ev(ref, spec);
    const std::vector<double> values =
        query_path.empty() ? ev.self_depths() : ev.depths(dg::read_sample(query_path, kind, dopt.drop_empty));
    std::ostream& out = *open_output(depth_output, file);
    out << "depth\n";
    for (double v : values) out << dg::format_double(v) << '\n';
  } else if (*tuple) {
    const auto kind = parse_kind(uopt.kind);
    const dg::Sample a = dg::read_sample(tuple_a, kind, uopt.drop_empty);
    const dg::Sample b = dg::read_sample(tuple_b, kind, uopt.drop_empty);
    const dg::LSTuple t = dg::ls_tuple(a, b, depth_of(uopt), dg::parse_rank_mode(uopt.rank_mode));
    *open_output(tuple_output, file) << dg::to_json(t).dump(2) << '\n';
  } else if (*simulate) {
    const dg::ResolvedRun r = resolve_sim(sopt);
    const auto start = std::chrono::steady_clock::now();
    dg::RunOptions ro{sopt.threads, sopt.tuples, r.rank_mode};
    const dg::ExperimentResult res = dg::run_experiment(r.scenario, r.depth, r.methods, ro);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "simulate: " << r.scenario.trials << " trials in " << secs << " s on "
              << dg::resolve_threads(sopt.threads) << " thread(s)\n";
    *open_output(sopt.output, file) << dg::to_json(res, r).dump(2) << '\n';
    if (!sopt.csv.empty()) {
      std::ofstream csv(sopt.csv);
      if (!csv) throw dg::DataError(dg::ErrorKind::parse, "cannot write '" + sopt.csv + "'");
      dg::write_rates_csv(csv, res);
    }
  } else if (*scatter) {
    const dg::ResolvedRun r = resolve_sim(copt);
    dg::RunOptions ro{copt.threads, false, r.rank_mode};
    const auto tuples = dg::run_tuple_scatter(r.scenario, r.depth, ro);
    dg::write_scatter_csv(*open_output(copt.output, file), tuples);
  } else if (*prep) {
    dg::DrifterMode mode;
    if (drift_mode == "full")
      mode = dg::DrifterMode::full;
    else if (drift_mode == "masked")
      mode = dg::DrifterMode::masked;
    else
      throw UsageError("--mode must be full or masked");
    auto in = dg::open_input(raw_path);
    const dg::DrifterCurves curves = dg::prep_drifter(in, year, mode);
    dg::write_curves(*open_output(drift_output, file), curves.sample);
    std::cerr << "prep-drifter: kept " << curves.ids.size() << " curve(s), dropped " << curves.dropped << '\n';
  } else if (*scenarios) {
    for (const auto& name : dg::scenario_names()) {
      const dg::Preset p = dg::scenario_preset(name);
      std::cout << name << "\t" << p.description << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const dg::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const dg::ComputeError& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return 4;
  }
}
