#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "stowrl/bench.hpp"
#include "stowrl/trainer.hpp"

namespace stowrl {

using KeyValues = std::map<std::string, std::string>;

/// `key = value` lines; `#` starts a comment. Throws FormatError.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);

/// Apply the recognized keys and erase them from `kv`. Unknown keys are left
/// for the caller to report.
void apply(KeyValues& kv, TrainConfig& config);
void apply(KeyValues& kv, GenSpec& spec);

}  // namespace stowrl
