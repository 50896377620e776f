#include "stowrl/config.hpp"

#include <fstream>
#include <sstream>

namespace stowrl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof())
    throw FormatError("config: bad value '" + value + "' for " + key);
  return out;
}

bool boolean(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw FormatError("config: bad boolean '" + value + "' for " + key);
}

std::vector<int> int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::string cell;
  std::istringstream in(value);
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(number<int>(key, cell));
  }
  return out;
}

// Take kv[key] if present.
bool take(KeyValues& kv, const std::string& key, std::string& value) {
  auto it = kv.find(key);
  if (it == kv.end()) return false;
  value = it->second;
  kv.erase(it);
  return true;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply(KeyValues& kv, TrainConfig& c) {
  std::string v;
  if (take(kv, "setting", v)) c.setting = parse_setting(v);
  if (take(kv, "episodes_per_problem", v)) c.episodes_per_problem = number<int>("episodes_per_problem", v);
  if (take(kv, "iterations", v)) c.iterations = number<int>("iterations", v);
  if (take(kv, "threshold_window", v)) c.threshold_window = number<int>("threshold_window", v);
  if (take(kv, "top_k", v)) c.top_k = number<int>("top_k", v);
  if (take(kv, "gamma", v)) c.gamma = number<double>("gamma", v);
  if (take(kv, "lr", v)) c.lr = number<double>("lr", v);
  if (take(kv, "seed", v)) c.seed = number<std::uint64_t>("seed", v);
  if (take(kv, "pool_capacity", v)) c.pool_capacity = number<std::size_t>("pool_capacity", v);
  if (take(kv, "pool_granularity", v)) {
    if (v == "samples")
      c.pool_granularity = PoolGranularity::samples;
    else if (v == "episodes")
      c.pool_granularity = PoolGranularity::episodes;
    else
      throw FormatError("config: pool_granularity must be samples or episodes");
  }
  if (take(kv, "theta0", v)) {
    if (v == "zero_step_plus_one") {
      c.theta0_rule = ThetaInit::zero_step_plus_one;
    } else {
      c.theta0_rule = ThetaInit::constant;
      c.theta0_constant = number<double>("theta0", v);
    }
  }
  if (take(kv, "center_advantages", v)) c.center_advantages = boolean("center_advantages", v);
  if (take(kv, "hidden_layers", v)) c.hidden_layers = int_list("hidden_layers", v);
  if (take(kv, "hidden_activation", v)) c.hidden_activation = parse_activation(v);
  if (take(kv, "max_mask_id", v)) c.max_mask_id = number<int>("max_mask_id", v);
}

void apply(KeyValues& kv, GenSpec& s) {
  std::string v;
  if (take(kv, "n_slots", v)) s.n_slots = number<int>("n_slots", v);
  if (take(kv, "n_fill", v)) s.n_fill = number<int>("n_fill", v);
  if (take(kv, "n_stacks", v)) s.n_stacks = number<int>("n_stacks", v);
  if (take(kv, "stack_height", v)) s.stack_height = number<int>("stack_height", v);
  if (take(kv, "n_mask_ids", v)) s.n_mask_ids = number<int>("n_mask_ids", v);
  if (take(kv, "seed", v)) s.seed = number<std::uint64_t>("seed", v);
}

}  // namespace stowrl
