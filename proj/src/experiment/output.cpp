#include "mimres/experiment/output.hpp"

#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <sstream>

#include "mimres/experiment/config_io.hpp"

namespace mimres {

namespace {

constexpr std::array<std::string_view, 5> kErrorColumns{"err_u", "err_grad_u", "err_lap_u", "err_grad_lap_u",
                                                        "err_diag_hess_u"};
constexpr std::array<std::optional<double> ErrorSet::*, 5> kErrorFields{
    &ErrorSet::u, &ErrorSet::grad_u, &ErrorSet::lap_u, &ErrorSet::grad_lap_u, &ErrorSet::diag_hess_u};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line, std::string_view column) {
  const std::string text(field);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ParseError(line, "column " + std::string(column) + ": not a number: '" + text + "'");
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string format_metrics_row(const MetricsRecord& r, bool wall_time) {
  std::string row = std::to_string(r.iteration) + "," + format_real(r.loss);
  for (auto field : kErrorFields) {
    row += ',';
    if (r.errors.*field) row += format_real(*(r.errors.*field));
  }
  row += ',';
  if (wall_time) row += format_real(r.wall_s);
  return row;
}

MetricsCsvWriter::MetricsCsvWriter(const std::filesystem::path& path, bool wall_time)
    : out_(path, std::ios::trunc), wall_time_(wall_time) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << kMetricsHeader << '\n' << std::flush;
}

void MetricsCsvWriter::write(const MetricsRecord& record) {
  out_ << format_metrics_row(record, wall_time_) << '\n' << std::flush;
}

std::vector<MetricsRecord> parse_metrics_csv(std::string_view text) {
  std::vector<MetricsRecord> records;
  std::size_t line_no = 0;
  bool header = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kMetricsHeader) throw ParseError(line_no, "unexpected header '" + std::string(line) + "'");
      header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 8) {
      throw ParseError(line_no, "expected 8 fields, found " + std::to_string(fields.size()));
    }
    MetricsRecord r;
    const double it = parse_number(fields[0], line_no, "iteration");
    if (it < 0 || it != std::floor(it)) throw ParseError(line_no, "iteration must be a non-negative integer");
    r.iteration = static_cast<std::size_t>(it);
    r.loss = parse_number(fields[1], line_no, "loss");
    for (std::size_t c = 0; c < kErrorFields.size(); ++c) {
      if (!fields[2 + c].empty()) r.errors.*kErrorFields[c] = parse_number(fields[2 + c], line_no, kErrorColumns[c]);
    }
    r.wall_s = fields[7].empty() ? std::numeric_limits<double>::quiet_NaN() : parse_number(fields[7], line_no, "wall_s");
    records.push_back(r);
  }
  if (!header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
  return records;
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  return parse_metrics_csv(read_file(path));
}

void write_metadata(const std::filesystem::path& path, const Metadata& meta) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [key, value] : meta) out << key << " = " << value << '\n';
}

Metadata read_metadata(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Metadata meta;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    meta.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 3)));
  }
  return meta;
}

const std::string* find_value(const Metadata& meta, std::string_view key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<std::filesystem::path> emit_curves(const std::filesystem::path& metrics_csv,
                                               const std::filesystem::path& out_dir, std::ostream& warn) {
  const std::vector<MetricsRecord> records = read_metrics_csv(metrics_csv);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t c = 0; c < kErrorFields.size(); ++c) {
    const auto field = kErrorFields[c];
    bool any = false;
    for (const MetricsRecord& r : records) any = any || (r.errors.*field).has_value();
    if (!any) continue;
    const std::filesystem::path path = out_dir / (std::string(kErrorColumns[c]) + ".dat");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# iteration log10(" << kErrorColumns[c] << ")\n";
    for (const MetricsRecord& r : records) {
      const double e = (r.errors.*field).value_or(std::numeric_limits<double>::quiet_NaN());
      double y = std::log10(e);
      if (e <= 0.0) {
        warn << "warning: " << kErrorColumns[c] << " is " << e << " at iteration " << r.iteration
             << "; writing " << kLogFloor << '\n';
        y = kLogFloor;
      }
      out << r.iteration << ' ' << format_real(y) << '\n';
    }
    written.push_back(path);
  }
  return written;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mimres
