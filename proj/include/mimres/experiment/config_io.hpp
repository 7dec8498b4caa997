#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "mimres/training/training.hpp"

namespace mimres {

/// Every key accepted in config files, in serialization order.
std::span<const std::string_view> config_keys();

/// Sets one key from its text form. Throws ConfigError on an unknown key or
/// a malformed value.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` lines; blank lines and lines starting with '#' are
/// ignored. Keys not present keep their value from `base`. Errors name the
/// line number. When `keys_set` is given, every key the text sets is added
/// to it.
RunConfig parse_config(std::string_view text, RunConfig base = {}, std::set<std::string>* keys_set = nullptr);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {},
                      std::set<std::string>* keys_set = nullptr);

/// Every key, one per line, in config_keys() order. Round-trips through
/// parse_config.
std::string serialize_config(const RunConfig& config);

/// "%.17g": shortest text that reads back to the same double.
std::string format_real(double value);

}  // namespace mimres
