#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mimres/training/training.hpp"

namespace mimres {

inline constexpr std::string_view kMetricsHeader =
    "iteration,loss,err_u,err_grad_u,err_lap_u,err_grad_lap_u,err_diag_hess_u,wall_s";

/// Malformed input file; `line` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One CSV row. Undefined errors are empty; wall_s is empty unless
/// `wall_time`.
std::string format_metrics_row(const MetricsRecord& record, bool wall_time);

/// Streams rows as they arrive and flushes each one, so a run that dies
/// midway leaves every record logged so far.
class MetricsCsvWriter {
 public:
  MetricsCsvWriter(const std::filesystem::path& path, bool wall_time);
  void write(const MetricsRecord& record);

 private:
  std::ofstream out_;
  bool wall_time_;
};

/// Reads a file written by MetricsCsvWriter. Empty wall_s reads as NaN.
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);
std::vector<MetricsRecord> parse_metrics_csv(std::string_view text);

/// Ordered key-value pairs written as `key = value` lines.
using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_metadata(const std::filesystem::path& path, const Metadata& meta);
Metadata read_metadata(const std::filesystem::path& path);
const std::string* find_value(const Metadata& meta, std::string_view key);

/// Errors at or below zero are written as this log10 value.
inline constexpr double kLogFloor = -16.0;

/// Writes <out_dir>/<column>.dat with "iteration log10(error)" rows for every
/// error column the CSV fills. Returns the files written; warns on `warn`
/// for every clamped zero.
std::vector<std::filesystem::path> emit_curves(const std::filesystem::path& metrics_csv,
                                               const std::filesystem::path& out_dir, std::ostream& warn);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace mimres
