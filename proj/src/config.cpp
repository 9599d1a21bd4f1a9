#include "crl/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include <fmt/format.h>

#include "crl/common.hpp"
#include "crl/csv.hpp"
#include "crl/discovery_bench.hpp"

namespace crl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(fmt::format("'{}' is not a boolean", v));
}

std::uint64_t parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw Error(fmt::format("'{}' is not an unsigned integer", v));
  return out;
}

template <class Cfg>
struct Field {
  std::string_view key;
  std::function<void(Cfg&, std::string_view)> set;
  std::function<std::string(const Cfg&)> get;
};

template <class Cfg, class T>
Field<Cfg> number(std::string_view key, T Cfg::*member) {
  return {key,
          [member](Cfg& c, std::string_view v) {
            if constexpr (std::is_floating_point_v<T>)
              c.*member = csv::to_double(v);
            else if constexpr (std::is_unsigned_v<T>)
              c.*member = static_cast<T>(parse_u64(v));
            else
              c.*member = static_cast<T>(csv::to_int(v));
          },
          [member](const Cfg& c) {
            if constexpr (std::is_floating_point_v<T>)
              return csv::format_double(c.*member);
            else
              return fmt::format("{}", c.*member);
          }};
}

template <class Cfg>
Field<Cfg> flag(std::string_view key, bool Cfg::*member) {
  return {key, [member](Cfg& c, std::string_view v) { c.*member = parse_bool(v); },
          [member](const Cfg& c) { return std::string(c.*member ? "true" : "false"); }};
}

// Lifts a field of a nested struct into the outer config.
template <class Outer, class Inner>
Field<Outer> nested(Inner Outer::*inner, Field<Inner> f) {
  return {f.key, [inner, set = f.set](Outer& c, std::string_view v) { set(c.*inner, v); },
          [inner, get = f.get](const Outer& c) { return get(c.*inner); }};
}

template <class Cfg>
std::vector<Field<Cfg>> notears_fields(NotearsConfig Cfg::*m) {
  return {
      nested(m, number("lambda1", &NotearsConfig::lambda1)),
      nested(m, number("w_threshold", &NotearsConfig::w_threshold)),
      nested(m, number("max_dual_iter", &NotearsConfig::max_dual_iter)),
      nested(m, number("h_tol", &NotearsConfig::h_tol)),
      nested(m, number("rho_max", &NotearsConfig::rho_max)),
      nested(m, number("max_inner_iter", &NotearsConfig::max_inner_iter)),
      nested(m, flag("center", &NotearsConfig::center)),
      nested(m, number("tie_break", &NotearsConfig::tie_break)),
  };
}

std::vector<Field<ExperimentConfig>> experiment_fields() {
  using C = ExperimentConfig;
  std::vector<Field<C>> f = {
      {"agent", [](C& c, std::string_view v) { c.agent = parse_agent_kind(v); },
       [](const C& c) { return to_string(c.agent); }},
      nested(&C::env, number("grid_size", &EnvConfig::grid_size)),
      nested(&C::env, number("room_size", &EnvConfig::room_size)),
      nested(&C::env, flag("random_room", &EnvConfig::room_randomized)),
      nested(&C::env, number("n_objects", &EnvConfig::n_objects)),
      nested(&C::env, number("n_door_objects", &EnvConfig::n_door_objects)),
      nested(&C::env, number("max_steps", &EnvConfig::max_steps)),
      {"law", [](C& c, std::string_view v) { c.env.law = parse_law(v); },
       [](const C& c) { return to_string(c.env.law); }},
      nested(&C::env, number("max_layout_retries", &EnvConfig::max_layout_retries)),
      number("n_envs", &C::n_envs),
      number("total_timesteps", &C::total_timesteps),
      number("eval_interval", &C::eval_interval),
      number("log_interval", &C::log_interval),
      number("eval_episodes", &C::eval_episodes),
      number("early_stop_mgr", &C::early_stop_mgr),
      flag("greedy_eval", &C::greedy_eval),
      number("seed", &C::seed),
      number("threads", &C::threads),
      number("hidden1", &C::hidden1),
      number("hidden2", &C::hidden2),
      nested(&C::a2c, number("gamma", &A2cHyper::gamma)),
      nested(&C::a2c, number("n_steps", &A2cHyper::n_steps)),
      nested(&C::a2c, number("ent_coef", &A2cHyper::ent_coef)),
      nested(&C::a2c, number("vf_coef", &A2cHyper::vf_coef)),
      nested(&C::a2c, number("max_grad_norm", &A2cHyper::max_grad_norm)),
      nested(&C::a2c, number("lr", &A2cHyper::lr)),
      nested(&C::a2c, number("adam_eps", &A2cHyper::adam_eps)),
      nested(&C::a2c, number("beta1", &A2cHyper::beta1)),
      nested(&C::a2c, number("beta2", &A2cHyper::beta2)),
      nested(&C::a2c, flag("normalize_advantages", &A2cHyper::normalize_advantages)),
      nested(&C::refresh, number("mind_min_interactions", &RefreshOptions::min_interactions)),
      nested(&C::refresh, number("mind_laplace_alpha", &RefreshOptions::laplace_alpha)),
  };
  for (auto& n : notears_fields(&C::notears)) f.push_back(std::move(n));
  return f;
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? "," : "") + std::to_string(sizes[i]);
  return out;
}

std::vector<Field<SweepConfig>> sweep_fields() {
  using C = SweepConfig;
  std::vector<Field<C>> f = {
      {"universe", [](C& c, std::string_view v) { c.universe = std::string(v); },
       [](const C& c) { return c.universe; }},
      number("extra_vars", &C::extra_vars),
      number("flip_prob", &C::flip_prob),
      number("root_prob", &C::root_prob),
      {"sizes", [](C& c, std::string_view v) { c.sizes = parse_size_list(v); },
       [](const C& c) { return join_sizes(c.sizes.empty() ? default_sample_grid() : c.sizes); }},
      number("repeats", &C::repeats),
      number("seed", &C::seed),
      number("threads", &C::threads),
  };
  for (auto& n : notears_fields(&C::notears)) f.push_back(std::move(n));
  return f;
}

template <class Cfg>
Cfg apply(std::string_view text, Cfg base, const std::vector<Field<Cfg>>& fields) {
  for (const auto& [key, value] : parse_key_values(text)) {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.key == key; });
    if (it == fields.end()) throw Error(fmt::format("config: unknown key '{}'", key));
    try {
      it->set(base, value);
    } catch (const Error& e) {
      throw Error(fmt::format("config: key '{}': {}", key, e.what()));
    }
  }
  return base;
}

template <class Cfg>
std::string dump(const Cfg& c, const std::vector<Field<Cfg>>& fields) {
  std::string out;
  for (const auto& f : fields) out += fmt::format("{} = {}\n", f.key, f.get(c));
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(fmt::format("config line {}: expected key = value", line_no));
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(fmt::format("config line {}: empty key", line_no));
    if (!out.emplace(key, value).second) throw Error(fmt::format("config line {}: duplicate key '{}'", line_no, key));
  }
  return out;
}

ExperimentConfig parse_experiment_config(std::string_view text, ExperimentConfig base) {
  auto cfg = apply(text, std::move(base), experiment_fields());
  cfg.validate();
  return cfg;
}

std::string experiment_config_text(const ExperimentConfig& cfg) { return dump(cfg, experiment_fields()); }

SweepConfig parse_sweep_config(std::string_view text, SweepConfig base) {
  auto cfg = apply(text, std::move(base), sweep_fields());
  cfg.universe_spec().validate();
  cfg.notears.validate();
  return cfg;
}

std::string sweep_config_text(const SweepConfig& cfg) { return dump(cfg, sweep_fields()); }

UniverseSpec SweepConfig::universe_spec() const {
  UniverseSpec u = builtin_universe(universe);
  if (extra_vars > 0) u = extend_with_independent_vars(u, extra_vars);
  u.flip_prob = flip_prob;
  u.root_prob = root_prob;
  return u;
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (auto field : csv::split(text, ',')) {
    field = trim(field);
    if (field.empty()) throw Error("size list: empty entry");
    out.push_back(static_cast<std::size_t>(parse_u64(field)));
  }
  return out;
}

}  // namespace crl
