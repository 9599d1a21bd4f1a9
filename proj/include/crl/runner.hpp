#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crl/a2c.hpp"
#include "crl/digital_mind.hpp"
#include "crl/gridworld.hpp"
#include "crl/observation.hpp"

namespace crl {

struct ExperimentConfig {
  EnvConfig env;
  AgentKind agent = AgentKind::CausalOracle;
  int n_envs = 8;
  long long total_timesteps = 8'000'000;
  long long eval_interval = 10'000;
  long long log_interval = 5'000;
  int eval_episodes = 20;
  double early_stop_mgr = 1.0;
  bool greedy_eval = true;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int hidden1 = 64;
  int hidden2 = 64;
  A2cHyper a2c;
  // Used by the discovering agent only.
  NotearsConfig notears;
  RefreshOptions refresh;

  void validate() const;
  long long batch_timesteps() const { return static_cast<long long>(n_envs) * a2c.n_steps; }
};

struct MetricsRow {
  long long timestep = 0;
  double mgr = 0.0;
  double mtt = 1.0;
  double mmi = 0.0;
  double mii = 0.0;
  bool operator==(const MetricsRow&) const = default;
};

/// Environment hooks; the defaults are the gridworld's layout generator and transition.
struct EnvHooks {
  std::function<EnvState(const EnvConfig&, Rng&)> reset = [](const EnvConfig& c, Rng& r) {
    return generate_layout(c, r);
  };
  std::function<StepOutcome(EnvState&, Action)> step = [](EnvState& s, Action a) { return step_inplace(s, a); };
};

int greedy_action(const Vector& probs);
int sample_action(const Vector& probs, Rng& rng);

/// Runs `cfg.eval_episodes` episodes, episode i on a layout drawn from derive_seed(seed, i).
/// `mind` feeds the causal slots of the discovering agent and is not updated.
MetricsRow evaluate(const PolicyParams& params, const ExperimentConfig& cfg, std::uint64_t seed,
                    const DigitalMind* mind = nullptr, const EnvHooks& hooks = {});

struct TrainResult {
  PolicyParams params;
  OptimizerState optimizer;
  std::vector<MetricsRow> history;  // one row per evaluation
  long long stopped_at = 0;         // timesteps consumed
  bool early_stopped = false;
  DigitalMind mind;                 // env 0's memory, discovering agent only
};

struct TrainOptions {
  EnvHooks hooks;
  // Written at the end of training and before a non-finite loss is rethrown.
  std::optional<std::filesystem::path> checkpoint;
  // Called every log_interval timesteps with (timestep, last loss).
  std::function<void(long long, const LossReport&)> on_log;
};

TrainResult train(const ExperimentConfig& cfg, const TrainOptions& opts = {});

/// Trailing running mean, window max(1, round(0.1 * n)). Early elements average what exists.
std::vector<double> smooth_series(const std::vector<double>& xs);

inline constexpr std::string_view kMetricsCsvHeader = "timestep,mgr,mtt,mmi,mii";
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);
void emit_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

struct CurveSeries {
  std::string label;
  std::vector<MetricsRow> rows;
};
/// SVG line plot of smoothed MGR against timestep, one polyline per series.
std::string learning_curve_svg(const std::vector<CurveSeries>& series);
void emit_learning_curve(const std::vector<CurveSeries>& series, const std::filesystem::path& path);

}  // namespace crl
