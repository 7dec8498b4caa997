#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "mimres/experiment/config_io.hpp"
#include "mimres/experiment/output.hpp"
#include "mimres/experiment/runner.hpp"

using namespace mimres;
using doctest::Approx;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mimres_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config files round-trip") {
  RunConfig c;
  c.problem = ProblemKind::Biharmonic;
  c.method = MethodKind::MIM2;
  c.variant = VariantKind::Partial;
  c.dim = 4;
  c.activation = ActivationKind::ReCU;
  c.lr = 3.3e-4;
  c.lambda2 = 0.1;
  c.seed = 1234567890123ULL;
  c.out = "runs/x";
  c.wall_time = true;
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(config_keys().size() == 23);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config("# comment\n\nproblem = monge-ampere\nwidth=12\n");
  CHECK(c.problem == ProblemKind::MongeAmpere);
  CHECK(c.width == 12);
  CHECK(c.depth == RunConfig{}.depth);

  std::set<std::string> keys;
  parse_config("dim = 3\nseed = 9\n", {}, &keys);
  CHECK(keys == std::set<std::string>{"dim", "seed"});

  CHECK_THROWS_WITH_AS(parse_config("dim = 2\nnope = 1\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("dim = two\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("dim 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("activation = tanh\n"), ConfigError);
}

TEST_CASE("metrics CSV round-trips") {
  std::vector<MetricsRecord> rows(3);
  rows[0] = {0, 12.5, {}, 0.0};
  rows[0].errors.u = 1.0 / 3.0;
  rows[0].errors.grad_u = 0.7;
  rows[1] = {100, 1e-300, {}, 0.0};
  rows[1].errors.u = 0.0;
  rows[1].errors.lap_u = 2.5e-7;
  rows[2] = {200, 4.0, {}, 0.0};

  std::string text = std::string(kMetricsHeader) + "\n";
  for (const auto& r : rows) text += format_metrics_row(r, false) + "\n";
  const auto back = parse_metrics_csv(text);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].iteration == rows[i].iteration);
    CHECK(back[i].loss == rows[i].loss);
    CHECK(back[i].errors.u == rows[i].errors.u);
    CHECK(back[i].errors.grad_u == rows[i].errors.grad_u);
    CHECK(back[i].errors.lap_u == rows[i].errors.lap_u);
    CHECK(std::isnan(back[i].wall_s));
  }
  CHECK(format_metrics_row(rows[0], false).back() == ',');
}

TEST_CASE("malformed CSV reports the line") {
  const std::string header(kMetricsHeader);
  CHECK_THROWS_AS(parse_metrics_csv("iteration,loss\n"), ParseError);
  try {
    parse_metrics_csv(header + "\n0,1,,,,,,\n5,oops,,,,,,\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_metrics_csv(header + "\n0,1,,,\n"), ParseError);
}

TEST_CASE("curves are log10 with a floor") {
  const auto dir = scratch("curves");
  {
    std::ofstream out(dir / "metrics.csv");
    out << kMetricsHeader << "\n0,1,0.01,1,,,,\n100,1,0,0.5,,,,\n200,1,1e-3,0.25,,,,\n";
  }
  std::ostringstream warn;
  const auto files = emit_curves(dir / "metrics.csv", dir / "curves", warn);
  CHECK(files.size() == 2);
  std::istringstream u(slurp(dir / "curves" / "err_u.dat"));
  std::string header;
  std::getline(u, header);
  CHECK(header.front() == '#');
  std::vector<std::pair<double, double>> pts;
  double it, v;
  while (u >> it >> v) pts.emplace_back(it, v);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].second == Approx(-2.0));
  CHECK(pts[1].second == kLogFloor);
  CHECK(pts[2].second == Approx(-3.0));
  CHECK(warn.str().find("100") != std::string::npos);
}

TEST_CASE("metadata round-trips") {
  const auto dir = scratch("meta");
  const Metadata meta{{"a", "1"}, {"b.c", "x y"}, {"empty", ""}};
  write_metadata(dir / "meta.txt", meta);
  const Metadata back = read_metadata(dir / "meta.txt");
  CHECK(back == meta);
  REQUIRE(find_value(back, "b.c") != nullptr);
  CHECK(*find_value(back, "b.c") == "x y");
  CHECK(find_value(back, "zz") == nullptr);
}

TEST_CASE("table grids") {
  const RunConfig base;
  const auto pn = table_grid("poisson-neumann", base, {});
  CHECK(pn.size() == 12);
  for (const auto& r : pn) {
    CHECK(r.config.depth == 2);
    CHECK(r.config.activation == ActivationKind::Square);
    CHECK(r.config.width == std::map<std::size_t, std::size_t>{{2, 5}, {4, 10}, {8, 15}, {16, 20}}.at(r.config.dim));
    CHECK(r.config.window == 100);
    CHECK(r.note.empty() == (r.config.dim != 16));
  }

  const auto ma = table_grid("monge-ampere", base, {});
  CHECK(ma.size() == 27);
  std::map<std::size_t, std::set<std::size_t>> widths;
  for (const auto& r : ma) {
    CHECK(r.config.activation == ActivationKind::ReQU);
    widths[r.config.dim].insert(r.config.width);
  }
  CHECK(widths[2] == std::set<std::size_t>{10, 20, 30});
  CHECK(widths[4] == std::set<std::size_t>{20, 30, 40});
  CHECK(widths[8] == std::set<std::size_t>{30, 40, 50});

  CHECK(table_grid("poisson-depth-activation", base, {}).size() == 27);
  CHECK(table_grid("biharmonic", base, {}).size() == 15);
  CHECK(table_grid("kdv", base, {}).size() == 18);

  RunConfig over = base;
  over.iters = 500;
  for (const auto& r : table_grid("poisson-neumann", over, {"iters"})) {
    CHECK(r.config.iters == 500);
    CHECK(r.note.empty());
  }
  CHECK_THROWS_AS(table_grid("table-12", base, {}), ConfigError);
}

TEST_CASE("single runs write deterministic outputs") {
  const auto dir = scratch("run");
  RunConfig c;
  c.dim = 2;
  c.width = 5;
  c.iters = 30;
  c.cadence = 10;
  c.eval_points = 200;
  c.seed = 7;
  c.checkpoint_every = 15;
  std::ostringstream log;
  c.out = (dir / "a").string();
  const RunOutcome a = execute_run(c, log);
  c.out = (dir / "b").string();
  execute_run(c, log);

  CHECK_FALSE(a.diverged);
  CHECK(read_metrics_csv(dir / "a" / "metrics.csv").size() == 4);
  CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
  CHECK(std::filesystem::exists(dir / "a" / "checkpoint_15.bin"));
  CHECK(std::filesystem::exists(dir / "a" / "params.bin"));

  const Metadata meta = read_metadata(dir / "a" / "meta.txt");
  const std::size_t expected = parameter_count(c.method, c.problem, c.variant, c.depth, c.width, c.dim);
  CHECK(*find_value(meta, "parameters") == std::to_string(expected));
  CHECK(*find_value(meta, "status") == "ok");
  CHECK(*find_value(meta, "config.seed") == "7");
  CHECK(*find_value(meta, "neumann_form") == "multiplier");

  c.wall_time = true;
  c.out = (dir / "c").string();
  execute_run(c, log);
  for (const auto& r : read_metrics_csv(dir / "c" / "metrics.csv")) CHECK(r.wall_s >= 0.0);
}

TEST_CASE("run labels") {
  RunConfig c;
  c.problem = ProblemKind::Biharmonic;
  c.method = MethodKind::MIM1;
  c.variant = VariantKind::Partial;
  c.dim = 4;
  CHECK(run_label(c) == "biharmonic-mim1-partial-d4-m2-n10-square-s0");
}
