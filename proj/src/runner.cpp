#include "crl/runner.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "crl/checkpoint.hpp"
#include "crl/common.hpp"
#include "crl/config.hpp"
#include "crl/csv.hpp"

namespace crl {

void ExperimentConfig::validate() const {
  env.validate();
  a2c.validate();
  notears.validate();
  if (n_envs < 1) throw Error("experiment: n_envs must be positive");
  if (total_timesteps < 0) throw Error("experiment: total_timesteps must be non-negative");
  if (eval_interval < 1 || log_interval < 1) throw Error("experiment: intervals must be positive");
  if (eval_episodes < 1) throw Error("experiment: eval_episodes must be positive");
  if (!std::isfinite(early_stop_mgr) || early_stop_mgr <= 0.0) throw Error("experiment: early_stop_mgr must be positive");
  if (threads < 1) throw Error("experiment: threads must be positive");
  if (hidden1 < 1 || hidden2 < 1) throw Error("experiment: hidden layer widths must be positive");
}

int greedy_action(const Vector& probs) {
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return static_cast<int>(best);
}

int sample_action(const Vector& probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs(i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

namespace {

// Interactions the mind can learn from: a push that displaced the object, or contact with
// an object that did not budge. A push stopped by whatever is behind a movable object says
// nothing about the object and is left out.
void remember(DigitalMind& mind, const EnvState& s, const StepOutcome& out, Action a) {
  const auto ev = out.info.event;
  if (out.info.object_index < 0) return;
  if (ev != StepEvent::Pushed && ev != StepEvent::BlockedImmovable) return;
  const auto& obj = s.objects.at(static_cast<std::size_t>(out.info.object_index));
  mind.record_interaction(obj.texture, obj.shape, a, ev == StepEvent::Pushed);
}

struct EnvWorker {
  EnvState state;
  ActionHistory history;
  Rng layout_rng;
  Rng action_rng;
  DigitalMind mind;
};

template <class F>
void parallel_for(int n, unsigned threads, F&& body) {
  const unsigned t = std::min<unsigned>(threads, static_cast<unsigned>(n));
  if (t <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(t);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < t; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int i = static_cast<int>(w); i < n; i += static_cast<int>(t)) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

MetricsRow evaluate(const PolicyParams& params, const ExperimentConfig& cfg, std::uint64_t seed,
                    const DigitalMind* mind, const EnvHooks& hooks) {
  const auto slots = causal_slots(cfg.agent, cfg.env.law, mind);
  MetricsRow row;
  int successes = 0;
  double mtt_sum = 0.0, mmi = 0.0, mii = 0.0;
  for (int i = 0; i < cfg.eval_episodes; ++i) {
    Rng layout_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Rng action_rng(derive_seed(seed, static_cast<std::uint64_t>(i), 1));
    EnvState s = hooks.reset(cfg.env, layout_rng);
    ActionHistory history;
    while (!s.done && s.step_count < s.max_steps) {
      const auto out = policy_value_forward(params, build_observation(s, history, cfg.agent, slots));
      const int a = cfg.greedy_eval ? greedy_action(out.probs) : sample_action(out.probs, action_rng);
      hooks.step(s, static_cast<Action>(a));
      history.push(static_cast<Action>(a));
    }
    if (s.counters.reached_goal) {
      ++successes;
      mtt_sum += static_cast<double>(s.counters.steps_to_goal) / s.max_steps;
    }
    mmi += s.counters.movable_interactions;
    mii += s.counters.immovable_interactions;
  }
  const double n = cfg.eval_episodes;
  row.mgr = successes / n;
  row.mtt = successes > 0 ? mtt_sum / successes : 1.0;
  row.mmi = mmi / n;
  row.mii = mii / n;
  return row;
}

TrainResult train(const ExperimentConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  const auto& hooks = opts.hooks;
  const AgentKind kind = cfg.agent;
  TrainResult res;
  res.params = PolicyParams::init(observation_width(kind), derive_seed(cfg.seed, 1), cfg.hidden1, cfg.hidden2,
                                  kNumActions);
  res.optimizer = OptimizerState::for_params(res.params, cfg.a2c);
  const std::string metadata = experiment_config_text(cfg);

  auto save = [&] {
    if (opts.checkpoint) save_checkpoint(*opts.checkpoint, {res.params, res.optimizer, metadata});
  };

  const long long batch = cfg.batch_timesteps();
  if (cfg.total_timesteps < batch) {
    save();
    return res;
  }

  std::vector<EnvWorker> envs(static_cast<std::size_t>(cfg.n_envs));
  for (int e = 0; e < cfg.n_envs; ++e) {
    auto& w = envs[static_cast<std::size_t>(e)];
    w.layout_rng.seed(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(e)));
    w.action_rng.seed(derive_seed(cfg.seed, 3, static_cast<std::uint64_t>(e)));
    w.state = hooks.reset(cfg.env, w.layout_rng);
  }
  const std::uint64_t eval_seed = derive_seed(cfg.seed, 4);
  const bool include_shape = true;

  RolloutBuffer buffer(cfg.n_envs, cfg.a2c.n_steps);
  std::vector<double> bootstrap(static_cast<std::size_t>(cfg.n_envs), 0.0);
  long long t = 0;
  while (t + batch <= cfg.total_timesteps) {
    buffer.clear();
    const PolicyParams& snapshot = res.params;
    parallel_for(cfg.n_envs, cfg.threads, [&](int e) {
      auto& w = envs[static_cast<std::size_t>(e)];
      for (int k = 0; k < cfg.a2c.n_steps; ++k) {
        const auto slots = causal_slots(kind, cfg.env.law, &w.mind);
        const Vector obs = build_observation(w.state, w.history, kind, slots);
        const auto out = policy_value_forward(snapshot, obs);
        const int a = sample_action(out.probs, w.action_rng);
        const auto step = hooks.step(w.state, static_cast<Action>(a));
        remember(w.mind, w.state, step, static_cast<Action>(a));
        w.history.push(static_cast<Action>(a));
        buffer.add(e, obs, a, step.reward, step.done, out.value);
        if (step.done) {
          if (kind == AgentKind::CausalDiscovered) w.mind.refresh_causal_model(cfg.notears, include_shape, cfg.refresh);
          w.mind.begin_episode();
          w.history.clear();
          w.state = hooks.reset(cfg.env, w.layout_rng);
        }
      }
      const auto slots = causal_slots(kind, cfg.env.law, &w.mind);
      bootstrap[static_cast<std::size_t>(e)] =
          policy_value_forward(snapshot, build_observation(w.state, w.history, kind, slots)).value;
    });

    LossReport rep;
    try {
      rep = a2c_update(res.params, res.optimizer, buffer, bootstrap, cfg.a2c);
    } catch (const Error&) {
      res.stopped_at = t;
      save();
      throw;
    }
    const long long prev = t;
    t += batch;
    if (opts.on_log && t / cfg.log_interval > prev / cfg.log_interval) opts.on_log(t, rep);
    if (t / cfg.eval_interval > prev / cfg.eval_interval) {
      MetricsRow row = evaluate(res.params, cfg, eval_seed, &envs[0].mind, hooks);
      row.timestep = t;
      res.history.push_back(row);
      if (row.mgr >= cfg.early_stop_mgr) {
        res.early_stopped = true;
        break;
      }
    }
  }
  res.stopped_at = t;
  res.mind = envs[0].mind;
  save();
  return res;
}

std::vector<double> smooth_series(const std::vector<double>& xs) {
  if (xs.empty()) throw Error("smooth_series: empty input");
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(xs.size()))));
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += xs[j];
    out[i] = sum / static_cast<double>(i + 1 - first);
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out(kMetricsCsvHeader);
  out += '\n';
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{}\n", r.timestep, csv::format_double(r.mgr), csv::format_double(r.mtt),
                       csv::format_double(r.mmi), csv::format_double(r.mii));
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
  const auto ls = csv::lines(text);
  if (ls.empty() || ls[0] != kMetricsCsvHeader) throw Error("metrics csv: missing header");
  std::vector<MetricsRow> rows;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = csv::split(ls[i]);
    if (f.size() != 5) throw Error(fmt::format("metrics csv line {}: expected 5 fields", i + 1));
    rows.push_back({csv::to_int(f[0]), csv::to_double(f[1]), csv::to_double(f[2]), csv::to_double(f[3]),
                    csv::to_double(f[4])});
  }
  return rows;
}

void emit_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  csv::write_file(path, metrics_csv(rows));
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string learning_curve_svg(const std::vector<CurveSeries>& series) {
  constexpr double W = 640, H = 400, L = 60, R = 160, T = 20, B = 50;
  constexpr std::array<std::string_view, 6> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  long long x_max = 1;
  for (const auto& s : series)
    for (const auto& r : s.rows) x_max = std::max(x_max, r.timestep);
  const double pw = W - L - R, ph = H - T - B;

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", W, H, W, H);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T, pw,
                     ph);
  for (int k = 0; k <= 4; ++k) {
    const double y = T + ph * (1.0 - k / 4.0);
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.2f}</text>\n", L - 6, y + 4,
                       k / 4.0);
    const double x = L + pw * k / 4.0;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", x, T + ph + 16,
                       static_cast<long long>(std::llround(static_cast<double>(x_max) * k / 4.0)));
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">timestep</text>\n", L + pw / 2,
                     H - 10);
  out += fmt::format(
      "<text x=\"14\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2f})\">"
      "MGR (smoothed)</text>\n",
      T + ph / 2, T + ph / 2);

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const auto color = colors[i % colors.size()];
    std::string points;
    if (!s.rows.empty()) {
      std::vector<double> mgr;
      for (const auto& r : s.rows) mgr.push_back(r.mgr);
      const auto smooth = smooth_series(mgr);
      for (std::size_t j = 0; j < s.rows.size(); ++j) {
        const double x = L + pw * static_cast<double>(s.rows[j].timestep) / static_cast<double>(x_max);
        const double y = T + ph * (1.0 - std::clamp(smooth[j], 0.0, 1.0));
        points += fmt::format("{}{:.2f},{:.2f}", j ? " " : "", x, y);
      }
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, points);
    const double ly = T + 14 + 18.0 * static_cast<double>(i);
    out += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       W - R + 10, ly - 4, W - R + 30, ly - 4, color);
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\">{}</text>\n", W - R + 36, ly, xml_escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

void emit_learning_curve(const std::vector<CurveSeries>& series, const std::filesystem::path& path) {
  csv::write_file(path, learning_curve_svg(series));
}

}  // namespace crl
