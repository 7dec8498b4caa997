#include "mimres/experiment/config_io.hpp"

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mimres {

namespace {

constexpr std::array<std::string_view, 23> kKeys{
    "problem",        "method",         "variant",       "dim",        "time_horizon", "depth",
    "width",          "activation",     "iters",         "lr",         "batch_interior", "batch_boundary",
    "batch_initial",  "eval_points",    "cadence",       "lambda1",    "lambda2",      "lambda3",
    "seed",           "out",            "checkpoint_every", "window",  "wall_time",
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value) {
  const std::string text(value);
  if (text.empty() || text[0] == '-' || text[0] == '+') throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + text + "'");
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

double to_real(std::string_view key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || errno != 0 || end != text.c_str() + text.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + text + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

}  // namespace

std::span<const std::string_view> config_keys() { return kKeys; }

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  auto size = [&] { return static_cast<std::size_t>(to_unsigned(key, v)); };
  if (key == "problem") c.problem = parse_problem(v);
  else if (key == "method") c.method = parse_method(v);
  else if (key == "variant") c.variant = parse_variant(v);
  else if (key == "dim") c.dim = size();
  else if (key == "time_horizon") c.time_horizon = to_real(key, v);
  else if (key == "depth") c.depth = size();
  else if (key == "width") c.width = size();
  else if (key == "activation") c.activation = parse_activation(v);
  else if (key == "iters") c.iters = size();
  else if (key == "lr") c.lr = to_real(key, v);
  else if (key == "batch_interior") c.batch_interior = size();
  else if (key == "batch_boundary") c.batch_boundary = size();
  else if (key == "batch_initial") c.batch_initial = size();
  else if (key == "eval_points") c.eval_points = size();
  else if (key == "cadence") c.cadence = size();
  else if (key == "lambda1") c.lambda1 = to_real(key, v);
  else if (key == "lambda2") c.lambda2 = to_real(key, v);
  else if (key == "lambda3") c.lambda3 = to_real(key, v);
  else if (key == "seed") c.seed = to_unsigned(key, v);
  else if (key == "out") c.out = std::string(v);
  else if (key == "checkpoint_every") c.checkpoint_every = size();
  else if (key == "window") c.window = size();
  else if (key == "wall_time") c.wall_time = to_bool(key, v);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text, RunConfig base, std::set<std::string>* keys_set) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    try {
      set_config_value(base, key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
    if (keys_set != nullptr) keys_set->emplace(key);
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base, std::set<std::string>* keys_set) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str(), std::move(base), keys_set);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream s;
  s << "problem = " << to_string(c.problem) << '\n'
    << "method = " << to_string(c.method) << '\n'
    << "variant = " << to_string(c.variant) << '\n'
    << "dim = " << c.dim << '\n'
    << "time_horizon = " << format_real(c.time_horizon) << '\n'
    << "depth = " << c.depth << '\n'
    << "width = " << c.width << '\n'
    << "activation = " << to_string(c.activation) << '\n'
    << "iters = " << c.iters << '\n'
    << "lr = " << format_real(c.lr) << '\n'
    << "batch_interior = " << c.batch_interior << '\n'
    << "batch_boundary = " << c.batch_boundary << '\n'
    << "batch_initial = " << c.batch_initial << '\n'
    << "eval_points = " << c.eval_points << '\n'
    << "cadence = " << c.cadence << '\n'
    << "lambda1 = " << format_real(c.lambda1) << '\n'
    << "lambda2 = " << format_real(c.lambda2) << '\n'
    << "lambda3 = " << format_real(c.lambda3) << '\n'
    << "seed = " << c.seed << '\n'
    << "out = " << c.out << '\n'
    << "checkpoint_every = " << c.checkpoint_every << '\n'
    << "window = " << c.window << '\n'
    << "wall_time = " << (c.wall_time ? "true" : "false") << '\n';
  return s.str();
}

}  // namespace mimres
