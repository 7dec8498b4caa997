#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimres/experiment/output.hpp"
#include "mimres/training/training.hpp"

namespace mimres {

/// Output root: $MIMRES_OUT when set, else "runs".
std::filesystem::path default_output_root();

/// Directory name describing a configuration, e.g. poisson-mim1-d2-m2-n5-square-s7.
std::string run_label(const RunConfig& config);

struct RunOutcome {
  bool diverged = false;
  std::string error;
  std::vector<MetricsRecord> records;
  ErrorSet trailing;
  std::size_t parameters = 0;
  double wall_s = 0.0;
};

/// Trains and writes <out>/metrics.csv, <out>/meta.txt and <out>/params.bin
/// (plus checkpoint_<k>.bin files when enabled). Divergence is reported in
/// the outcome and the metadata rather than thrown. `notes` are appended to
/// the metadata.
RunOutcome execute_run(const RunConfig& config, std::ostream& log, const Metadata& notes = {});

std::span<const std::string_view> table_ids();

struct TableRun {
  std::string label;
  RunConfig config;
  std::string note;  // non-empty when the grid adjusted the configuration
};

/// The grid for one table. Keys in `overridden` keep their value from
/// `base`; every other grid setting replaces it. Throws ConfigError on an
/// unknown id.
std::vector<TableRun> table_grid(std::string_view id, const RunConfig& base, const std::set<std::string>& overridden);

/// Runs the grid under <root>/<id>/<label>/ and writes <root>/<id>/summary.csv
/// in grid order. `jobs` > 1 runs that many configurations at once; each run
/// draws only from its own seed-derived streams, so results do not depend on
/// `jobs`. Returns 0 when every run finished, 1 if any diverged.
int run_table(std::string_view id, const RunConfig& base, const std::set<std::string>& overridden,
              const std::filesystem::path& root, std::ostream& log, std::size_t jobs = 1);

inline constexpr std::string_view kSummaryHeader =
    "label,problem,method,variant,dim,depth,width,activation,iters,seed,parameters,err_u,err_grad_u,err_lap_u,"
    "err_grad_lap_u,err_diag_hess_u,seconds_per_iter,status,note";

}  // namespace mimres
