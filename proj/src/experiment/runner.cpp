#include "mimres/experiment/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <cstdlib>

#include "mimres/experiment/config_io.hpp"
#include "mimres/rng.hpp"

#ifndef MIMRES_VERSION
#define MIMRES_VERSION "dev"
#endif

namespace mimres {

std::filesystem::path default_output_root() {
  const char* env = std::getenv("MIMRES_OUT");
  return env != nullptr && *env != '\0' ? std::filesystem::path(env) : std::filesystem::path("runs");
}

std::string run_label(const RunConfig& c) {
  std::string s = std::string(to_string(c.problem)) + "-" + std::string(to_string(c.method));
  if (c.problem == ProblemKind::Biharmonic && c.method != MethodKind::DGM) s += "-" + std::string(to_string(c.variant));
  s += "-d" + std::to_string(c.dim) + "-m" + std::to_string(c.depth) + "-n" + std::to_string(c.width) + "-" +
       std::string(to_string(c.activation)) + "-s" + std::to_string(c.seed);
  return s;
}

namespace {

std::string optional_text(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

Metadata base_metadata(const RunConfig& config) {
  Metadata meta;
  const std::string text = serialize_config(config);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const std::string line = text.substr(start, nl - start);
    const auto eq = line.find(" = ");
    meta.emplace_back("config." + line.substr(0, eq), line.substr(eq + 3));
    start = nl + 1;
  }
  meta.emplace_back("version", MIMRES_VERSION);
  meta.emplace_back("rng", std::string(kRngAlgorithm));
  return meta;
}

}  // namespace

RunOutcome execute_run(const RunConfig& config, std::ostream& log, const Metadata& notes) {
  validate(config);
  if (config.out.empty()) throw ConfigError("run output directory is not set");
  const std::filesystem::path dir(config.out);
  std::filesystem::create_directories(dir);

  Metadata meta = base_metadata(config);
  meta.emplace_back("start", utc_timestamp());
  const ModelConfig mc = model_config(config);
  const std::vector<NetworkSpec> specs = network_specs(mc);
  std::size_t constructed = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::size_t n = param_length(specs[i]);
    meta.emplace_back("network." + std::to_string(i) + ".parameters", std::to_string(n));
    constructed += n;
  }
  const std::size_t formula =
      parameter_count(config.method, config.problem, config.variant, config.depth, config.width, config.dim);
  if (formula != constructed) {
    throw std::logic_error("parameter count mismatch: constructed " + std::to_string(constructed) + ", formula " +
                           std::to_string(formula));
  }
  meta.emplace_back("parameters", std::to_string(constructed));
  meta.emplace_back("parameters.published_formula",
                    std::to_string(published_parameter_count(config.method, config.problem, config.variant,
                                                             config.depth, config.width, config.dim)));
  const ProblemSpec problem = make_problem(config.problem, config.dim, config.time_horizon);
  meta.emplace_back("metric_sources",
                    metric_sources(problem, unknown_layout(config.method, config.problem, config.variant, config.dim)));

  RunOutcome outcome;
  outcome.parameters = constructed;
  MetricsCsvWriter csv(dir / "metrics.csv", config.wall_time);
  TrainHooks hooks;
  hooks.on_record = [&](const MetricsRecord& r) {
    csv.write(r);
    outcome.records.push_back(r);
  };
  hooks.on_checkpoint = [&](std::size_t k, std::span<const double> params) {
    write_checkpoint(dir / ("checkpoint_" + std::to_string(k) + ".bin"), params);
  };

  try {
    const TrainResult result = train(config, hooks);
    if (result.warning) log << "warning: " << *result.warning << '\n';
    write_checkpoint(dir / "params.bin", result.params);
    meta.emplace_back("neumann_form", std::string(to_string(result.neumann)));
    if (result.warning) meta.emplace_back("warning", *result.warning);
    outcome.wall_s = result.wall_s;
    meta.emplace_back("status", "ok");
  } catch (const DivergenceError& e) {
    outcome.diverged = true;
    outcome.error = e.what();
    meta.emplace_back("status", "diverged");
    meta.emplace_back("error", e.what());
    log << "error: " << e.what() << '\n';
  }
  outcome.trailing = trailing_mean(outcome.records, config.window);
  meta.emplace_back("trailing.window", std::to_string(config.window));
  meta.emplace_back("trailing.err_u", optional_text(outcome.trailing.u));
  meta.emplace_back("trailing.err_grad_u", optional_text(outcome.trailing.grad_u));
  meta.emplace_back("trailing.err_lap_u", optional_text(outcome.trailing.lap_u));
  meta.emplace_back("trailing.err_grad_lap_u", optional_text(outcome.trailing.grad_lap_u));
  meta.emplace_back("trailing.err_diag_hess_u", optional_text(outcome.trailing.diag_hess_u));
  meta.emplace_back("wall_s", format_real(outcome.wall_s));
  meta.emplace_back("end", utc_timestamp());
  meta.insert(meta.end(), notes.begin(), notes.end());
  write_metadata(dir / "meta.txt", meta);
  return outcome;
}

namespace {

constexpr std::array<std::string_view, 5> kTables{"poisson-neumann", "poisson-depth-activation", "monge-ampere",
                                                  "biharmonic", "kdv"};

// Desk-scale iteration cap for the d = 16 Poisson cell.
constexpr std::size_t kHighDimIterationCap = 5000;

struct GridPoint {
  MethodKind method;
  VariantKind variant = VariantKind::All;
  std::size_t dim, depth, width;
  ActivationKind activation;
};

constexpr std::array<MethodKind, 3> kMethods{MethodKind::DGM, MethodKind::MIM1, MethodKind::MIM2};

std::vector<GridPoint> grid_points(std::string_view id) {
  std::vector<GridPoint> g;
  if (id == "poisson-neumann") {
    const std::array<std::pair<std::size_t, std::size_t>, 4> dims{{{2, 5}, {4, 10}, {8, 15}, {16, 20}}};
    for (auto [d, n] : dims) {
      for (MethodKind m : kMethods) g.push_back({m, VariantKind::All, d, 2, n, ActivationKind::Square});
    }
  } else if (id == "poisson-depth-activation") {
    for (ActivationKind a : {ActivationKind::ReLU, ActivationKind::ReQU, ActivationKind::ReCU}) {
      for (std::size_t depth : {1, 2, 3}) {
        for (MethodKind m : kMethods) g.push_back({m, VariantKind::All, 4, depth, 10, a});
      }
    }
  } else if (id == "monge-ampere") {
    const std::array<std::pair<std::size_t, std::array<std::size_t, 3>>, 3> rows{
        {{2, {10, 20, 30}}, {4, {20, 30, 40}}, {8, {30, 40, 50}}}};
    for (const auto& [d, widths] : rows) {
      for (std::size_t n : widths) {
        for (MethodKind m : kMethods) g.push_back({m, VariantKind::All, d, 2, n, ActivationKind::ReQU});
      }
    }
  } else if (id == "biharmonic") {
    const std::array<std::pair<std::size_t, std::size_t>, 3> dims{{{2, 8}, {4, 10}, {8, 20}}};
    for (auto [d, n] : dims) {
      g.push_back({MethodKind::DGM, VariantKind::All, d, 2, n, ActivationKind::Square});
      for (MethodKind m : {MethodKind::MIM1, MethodKind::MIM2}) {
        for (VariantKind v : {VariantKind::All, VariantKind::Partial}) g.push_back({m, v, d, 2, n, ActivationKind::Square});
      }
    }
  } else if (id == "kdv") {
    for (std::size_t d : {1, 2, 3}) {
      for (ActivationKind a : {ActivationKind::ReQU, ActivationKind::ReCU}) {
        for (MethodKind m : kMethods) g.push_back({m, VariantKind::All, d, 2, 10, a});
      }
    }
  } else {
    throw ConfigError("unknown table '" + std::string(id) +
                      "' (expected poisson-neumann, poisson-depth-activation, monge-ampere, biharmonic or kdv)");
  }
  return g;
}

ProblemKind table_problem(std::string_view id) {
  if (id == "monge-ampere") return ProblemKind::MongeAmpere;
  if (id == "biharmonic") return ProblemKind::Biharmonic;
  if (id == "kdv") return ProblemKind::KdV;
  return ProblemKind::Poisson;
}

}  // namespace

std::span<const std::string_view> table_ids() { return kTables; }

std::vector<TableRun> table_grid(std::string_view id, const RunConfig& base, const std::set<std::string>& overridden) {
  const std::vector<GridPoint> points = grid_points(id);
  const bool poisson = table_problem(id) == ProblemKind::Poisson;
  auto keep = [&](const char* key) { return overridden.count(key) > 0; };
  std::vector<TableRun> runs;
  for (const GridPoint& p : points) {
    RunConfig c = base;
    c.problem = table_problem(id);
    if (!keep("method")) c.method = p.method;
    c.variant = c.method == MethodKind::DGM ? VariantKind::All : p.variant;
    if (!keep("dim")) c.dim = p.dim;
    if (!keep("depth")) c.depth = p.depth;
    if (!keep("width")) c.width = p.width;
    if (!keep("activation")) c.activation = p.activation;
    if (!keep("window")) c.window = poisson ? 100 : 1000;
    TableRun run;
    if (id == "poisson-neumann" && c.dim == 16 && !keep("iters") && c.iters > kHighDimIterationCap) {
      c.iters = kHighDimIterationCap;
      run.note = "iters capped at " + std::to_string(kHighDimIterationCap);
    }
    run.label = run_label(c);
    run.config = c;
    runs.push_back(std::move(run));
  }
  return runs;
}

int run_table(std::string_view id, const RunConfig& base, const std::set<std::string>& overridden,
              const std::filesystem::path& root, std::ostream& log, std::size_t jobs) {
  const std::vector<TableRun> runs = table_grid(id, base, overridden);
  const std::filesystem::path table_dir = root / std::string(id);
  std::filesystem::create_directories(table_dir);
  std::ofstream summary(table_dir / "summary.csv", std::ios::trunc);
  if (!summary) throw std::runtime_error("cannot write " + (table_dir / "summary.csv").string());
  summary << kSummaryHeader << '\n' << std::flush;

  std::mutex mutex;
  std::vector<std::optional<std::string>> rows(runs.size());
  std::size_t next_row = 0;
  std::atomic<std::size_t> next_run{0};
  std::atomic<bool> diverged{false};
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t i = next_run++; i < runs.size(); i = next_run++) {
      const TableRun& run = runs[i];
      RunConfig c = run.config;
      c.out = (table_dir / run.label).string();
      std::ostringstream run_log;
      Metadata notes;
      if (!run.note.empty()) notes.emplace_back("note", run.note);
      RunOutcome out;
      try {
        out = execute_run(c, run_log, notes);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next_run = runs.size();
        return;
      }
      if (out.diverged) diverged = true;
      const double per_iter = c.iters > 0 ? out.wall_s / static_cast<double>(c.iters) : 0.0;
      std::ostringstream row;
      row << run.label << ',' << to_string(c.problem) << ',' << to_string(c.method) << ',' << to_string(c.variant)
          << ',' << c.dim << ',' << c.depth << ',' << c.width << ',' << to_string(c.activation) << ',' << c.iters
          << ',' << c.seed << ',' << out.parameters << ',' << optional_text(out.trailing.u) << ','
          << optional_text(out.trailing.grad_u) << ',' << optional_text(out.trailing.lap_u) << ','
          << optional_text(out.trailing.grad_lap_u) << ',' << optional_text(out.trailing.diag_hess_u) << ','
          << format_real(per_iter) << ',' << (out.diverged ? "diverged" : "ok") << ',' << run.note;

      std::lock_guard lock(mutex);
      log << "[" << i + 1 << "/" << runs.size() << "] " << run.label
          << (run.note.empty() ? "" : " (" + run.note + ")") << " u=" << optional_text(out.trailing.u) << '\n'
          << run_log.str() << std::flush;
      rows[i] = row.str();
      for (; next_row < rows.size() && rows[next_row]; ++next_row) summary << *rows[next_row] << '\n' << std::flush;
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, runs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return diverged ? 1 : 0;
}

}  // namespace mimres
