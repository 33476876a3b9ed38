#pragma once

// Flat `key = value` configuration. Files and command-line flags both
// produce a Settings map; flags are laid over the file before resolving.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "imitate/dynamics.hpp"
#include "imitate/sim.hpp"

namespace imitate {

using Settings = std::map<std::string, std::string>;

/// Error in a configuration value; the message names the key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "mu",    "n",     "sigma", "epsilon_u", "omega", "alpha", "exploration", "policy",
      "scope", "payoff", "slots", "iters",    "runs",  "seed",  "out",         "dt",
      "t_max", "grid",  "x0",    "x1",        "stop_on_convergence",           "threads"};
  return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline Settings parse_settings(std::istream& in, const std::string& source = "config") {
  Settings out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw std::runtime_error(where + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw std::runtime_error(where + ": missing key");
    if (!known_keys().contains(key)) throw ConfigError(key, "unknown key (" + where + ")");
    if (!out.emplace(key, value).second) throw ConfigError(key, "duplicate key (" + where + ")");
  }
  return out;
}

inline Settings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_settings(in, path.string());
}

/// Flags win over file values.
inline Settings overlay(Settings base, const Settings& flags) {
  for (const auto& [k, v] : flags) {
    if (!known_keys().contains(k)) throw ConfigError(k, "unknown key");
    base[k] = v;
  }
  return base;
}

namespace detail {

inline double parse_double(const std::string& key, std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ConfigError(key, "'" + t + "' is not a number");
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& key, std::string_view s) {
  const std::string t = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "'" + t + "' is not a valid integer");
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key, "'" + s + "' is not a boolean");
}

}  // namespace detail

struct RunConfig {
  SimConfig sim;
  DynamicsConfig dynamics;
  std::size_t grid = 21;
  std::optional<Mixture> x0, x1;
  std::filesystem::path out = "out";
};

/// Fills defaults and validates. Without any settings this is the reference
/// N = 50, mu = (0.3, 0.5, 0.8) configuration.
inline RunConfig resolve(const Settings& s) {
  for (const auto& [k, v] : s) {
    if (!known_keys().contains(k)) throw ConfigError(k, "unknown key");
  }
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };
  RunConfig rc;
  SimConfig& sim = rc.sim;
  sim.stop_on_convergence = false;
  sim.runs = 100;

  if (auto v = get("mu")) {
    try {
      sim.channels = ChannelModel(detail::parse_list("mu", *v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("mu", e.what());
    }
  }
  if (auto v = get("n")) {
    sim.n_sus = detail::parse_int<int>("n", *v);
    if (sim.n_sus < 2) throw ConfigError("n", "must be at least 2");
  }
  if (auto v = get("policy")) {
    if (*v == "pisap") sim.policy = Policy::pisap;
    else if (*v == "disap") sim.policy = Policy::disap;
    else throw ConfigError("policy", "expected pisap or disap, got '" + *v + "'");
  }
  Scope scope = Scope::global;
  if (auto v = get("scope")) {
    if (*v == "global") scope = Scope::global;
    else if (*v == "channel") scope = Scope::same_channel;
    else throw ConfigError("scope", "expected global or channel, got '" + *v + "'");
  }
  PolicyParams& p = sim.params;
  p = PolicyParams::defaults(sim.policy, scope);
  if (auto v = get("omega")) p.omega = detail::parse_double("omega", *v);
  if (auto v = get("alpha")) p.alpha = detail::parse_double("alpha", *v);
  if (!(p.alpha < p.omega)) throw ConfigError("alpha", "must be below omega");
  if (sim.policy == Policy::pisap) p.sigma = 1.0 / (p.omega - p.alpha);
  if (auto v = get("sigma")) {
    p.sigma = detail::parse_double("sigma", *v);
    if (!(p.sigma > 0.0)) throw ConfigError("sigma", "must be positive");
  }
  if (auto v = get("epsilon_u")) {
    p.epsilon_u = detail::parse_double("epsilon_u", *v);
    if (p.epsilon_u < 0.0) throw ConfigError("epsilon_u", "must be nonnegative");
  }
  if (auto v = get("exploration")) {
    p.exploration = detail::parse_double("exploration", *v);
    if (!(p.exploration >= 0.0 && p.exploration <= 1.0)) {
      throw ConfigError("exploration", "must lie in [0, 1]");
    }
  }
  if (auto v = get("payoff")) {
    if (*v == "expected") sim.payoff_mode = PayoffMode::expected;
    else if (*v == "stochastic") sim.payoff_mode = PayoffMode::stochastic;
    else throw ConfigError("payoff", "expected 'expected' or 'stochastic', got '" + *v + "'");
  }
  if (auto v = get("slots")) {
    sim.slots_per_iteration = detail::parse_int<int>("slots", *v);
    if (sim.slots_per_iteration < 1) throw ConfigError("slots", "must be at least 1");
  }
  if (auto v = get("iters")) {
    sim.max_iterations = detail::parse_int<std::size_t>("iters", *v);
    if (sim.max_iterations < 2) throw ConfigError("iters", "must be at least 2");
  }
  if (auto v = get("runs")) {
    sim.runs = detail::parse_int<std::size_t>("runs", *v);
    if (sim.runs < 1) throw ConfigError("runs", "must be at least 1");
  }
  if (auto v = get("seed")) sim.seed = detail::parse_int<std::uint64_t>("seed", *v);
  if (auto v = get("threads")) sim.threads = detail::parse_int<std::size_t>("threads", *v);
  if (auto v = get("stop_on_convergence")) {
    sim.stop_on_convergence = detail::parse_bool("stop_on_convergence", *v);
  }
  if (auto v = get("out")) {
    if (v->empty()) throw ConfigError("out", "empty path");
    rc.out = *v;
  }

  DynamicsConfig& d = rc.dynamics;
  d.n_sus = sim.n_sus;
  d.omega = p.omega;
  d.alpha = p.alpha;
  d.sigma = get("sigma") ? p.sigma : 1.0;
  if (auto v = get("dt")) {
    d.dt = detail::parse_double("dt", *v);
    if (!(d.dt > 0.0)) throw ConfigError("dt", "must be positive");
  }
  if (auto v = get("t_max")) {
    d.t_max = detail::parse_double("t_max", *v);
    if (!(d.t_max >= 0.0)) throw ConfigError("t_max", "must be nonnegative");
  }
  if (auto v = get("grid")) {
    rc.grid = detail::parse_int<std::size_t>("grid", *v);
    if (rc.grid < 2) throw ConfigError("grid", "must be at least 2");
  }
  for (const char* key : {"x0", "x1"}) {
    if (auto v = get(key)) {
      auto xs = detail::parse_list(key, *v);
      if (xs.size() != sim.channels.size()) {
        throw ConfigError(key, "needs one share per channel");
      }
      try {
        (std::string(key) == "x0" ? rc.x0 : rc.x1) = Mixture(std::move(xs));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    }
  }
  sim.validate();
  d.validate();
  return rc;
}

}  // namespace imitate
