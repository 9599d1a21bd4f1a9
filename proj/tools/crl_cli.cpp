// Command-line front end: causal discovery sweeps and gridworld agent training.
#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "crl/checkpoint.hpp"
#include "crl/config.hpp"
#include "crl/csv.hpp"
#include "crl/discovery_bench.hpp"
#include "crl/runner.hpp"

namespace fs = std::filesystem;
using namespace crl;

namespace {

template <class T>
void override_if(const CLI::Option* opt, T& target, const T& value) {
  if (opt->count() > 0) target = value;
}

int run_discover(const std::string& config_path, const std::string& universe, std::string sizes, std::size_t repeats,
                 std::uint64_t seed, double flip, std::size_t extra, unsigned threads, const std::string& out,
                 const CLI::App& sub) {
  SweepConfig cfg;
  if (!config_path.empty()) cfg = parse_sweep_config(csv::read_file(config_path));
  override_if(sub.get_option("--universe"), cfg.universe, universe);
  if (sub.get_option("--sizes")->count()) cfg.sizes = parse_size_list(sizes);
  override_if(sub.get_option("--repeats"), cfg.repeats, repeats);
  override_if(sub.get_option("--seed"), cfg.seed, seed);
  override_if(sub.get_option("--flip-prob"), cfg.flip_prob, flip);
  override_if(sub.get_option("--extra-vars"), cfg.extra_vars, extra);
  override_if(sub.get_option("--threads"), cfg.threads, threads);
  const auto u = cfg.universe_spec();
  const auto grid = cfg.sizes.empty() ? default_sample_grid() : cfg.sizes;
  const auto result = run_sweep(u, grid, cfg.repeats, cfg.notears, cfg.seed, cfg.threads);
  if (out.empty())
    std::cout << sweep_csv(result);
  else
    emit_sweep_csv(result, out);
  return 0;
}

ExperimentConfig load_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : parse_experiment_config(csv::read_file(path));
}

std::string row_line(const MetricsRow& r) {
  return fmt::format("timestep={} mgr={} mtt={} mmi={} mii={}", r.timestep, csv::format_double(r.mgr),
                     csv::format_double(r.mtt), csv::format_double(r.mmi), csv::format_double(r.mii));
}

// Runs found directly in `dir` or one level below, in name order.
std::vector<CurveSeries> collect_runs(const fs::path& dir) {
  std::vector<fs::path> run_dirs;
  if (fs::exists(dir / "metrics.csv")) run_dirs.push_back(dir);
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_directory() && fs::exists(e.path() / "metrics.csv")) run_dirs.push_back(e.path());
  std::sort(run_dirs.begin(), run_dirs.end());
  std::vector<CurveSeries> series;
  for (const auto& d : run_dirs) {
    std::string label = d.filename().string();
    if (fs::exists(d / "config.txt")) {
      const auto kv = parse_key_values(csv::read_file(d / "config.txt"));
      if (auto it = kv.find("agent"); it != kv.end()) label = fmt::format("{} ({})", it->second, label);
    }
    series.push_back({label, parse_metrics_csv(csv::read_file(d / "metrics.csv"))});
  }
  return series;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal structure discovery and causally informed gridworld agents"};
  app.require_subcommand(1);

  // discover
  auto* discover = app.add_subcommand("discover", "SHD/precision sweep over sample sizes");
  std::string d_config, d_universe = "U2-linked", d_sizes, d_out;
  std::size_t d_repeats = 10, d_extra = 0;
  std::uint64_t d_seed = 0;
  double d_flip = 0.1;
  unsigned d_threads = 1;
  discover->add_option("--config", d_config, "sweep config file (key = value)");
  discover->add_option("--universe", d_universe, "U2-linked, U2-indep, U3-partial, U3-full, U3-indep");
  discover->add_option("--sizes", d_sizes, "comma-separated sample sizes");
  discover->add_option("--repeats", d_repeats);
  discover->add_option("--seed", d_seed);
  discover->add_option("--flip-prob", d_flip, "label noise, 0 for noiseless data");
  discover->add_option("--extra-vars", d_extra, "independent variables added to the universe");
  discover->add_option("--threads", d_threads);
  discover->add_option("--out", d_out, "CSV path (stdout if omitted)");

  // min-samples
  auto* mins = app.add_subcommand("min-samples", "smallest sample size reaching a precision target");
  std::string m_universe = "U2-linked", m_out;
  double m_target = 0.75, m_flip = 0.0;
  std::size_t m_extra = 5, m_repeats = 10, m_max = 200;
  std::uint64_t m_seed = 0;
  mins->add_option("--universe", m_universe);
  mins->add_option("--target", m_target);
  mins->add_option("--max-extra-vars", m_extra);
  mins->add_option("--repeats", m_repeats);
  mins->add_option("--max-samples", m_max);
  mins->add_option("--flip-prob", m_flip);
  mins->add_option("--seed", m_seed);
  mins->add_option("--out", m_out);

  // train
  auto* trn = app.add_subcommand("train", "train an A2C agent in the gridworld");
  std::string t_config, t_agent = "causal", t_law = "texture", t_out = "run";
  int t_objects = 18, t_grid = 20, t_room = 7, t_max_steps = 800, t_envs = 8;
  long long t_steps = 8'000'000, t_eval = 10'000;
  std::uint64_t t_seed = 0;
  unsigned t_threads = 1;
  bool t_random_room = false;
  trn->add_option("--config", t_config, "experiment config file (key = value)");
  trn->add_option("--agent", t_agent, "causal, causal-discovered or non-causal");
  trn->add_option("--objects", t_objects);
  trn->add_option("--law", t_law, "texture, texture-shape-present or texture-and-shape");
  trn->add_flag("--random-room", t_random_room);
  trn->add_option("--timesteps", t_steps);
  trn->add_option("--seed", t_seed);
  trn->add_option("--grid-size", t_grid);
  trn->add_option("--room-size", t_room);
  trn->add_option("--max-steps", t_max_steps);
  trn->add_option("--n-envs", t_envs);
  trn->add_option("--eval-interval", t_eval);
  trn->add_option("--threads", t_threads);
  trn->add_option("--out", t_out, "output directory");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a saved checkpoint");
  std::string e_ckpt, e_mind;
  int e_episodes = 9;
  std::uint64_t e_seed = 0;
  bool e_stochastic = false;
  ev->add_option("--checkpoint", e_ckpt)->required();
  ev->add_option("--episodes", e_episodes);
  ev->add_option("--seed", e_seed);
  ev->add_option("--mind", e_mind, "digital mind CSV for the discovering agent");
  ev->add_flag("--stochastic", e_stochastic, "sample actions instead of taking the argmax");

  // plot
  auto* plt = app.add_subcommand("plot", "learning curves of smoothed MGR");
  std::string p_in, p_out = "curves";
  plt->add_option("--in", p_in)->required();
  plt->add_option("--out", p_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (discover->parsed())
      return run_discover(d_config, d_universe, d_sizes, d_repeats, d_seed, d_flip, d_extra, d_threads, d_out,
                          *discover);

    if (mins->parsed()) {
      auto base = builtin_universe(m_universe);
      base.flip_prob = m_flip;
      const auto rows = min_samples_for_precision(base, m_extra, m_target, m_repeats, m_seed, {}, m_max);
      if (m_out.empty())
        std::cout << min_samples_csv(rows);
      else
        csv::write_file(m_out, min_samples_csv(rows));
      return 0;
    }

    if (trn->parsed()) {
      ExperimentConfig cfg = load_or_default(t_config);
      if (trn->get_option("--agent")->count()) cfg.agent = parse_agent_kind(t_agent);
      if (trn->get_option("--law")->count()) cfg.env.law = parse_law(t_law);
      override_if(trn->get_option("--objects"), cfg.env.n_objects, t_objects);
      if (t_random_room) cfg.env.room_randomized = true;
      override_if(trn->get_option("--timesteps"), cfg.total_timesteps, t_steps);
      override_if(trn->get_option("--seed"), cfg.seed, t_seed);
      override_if(trn->get_option("--grid-size"), cfg.env.grid_size, t_grid);
      override_if(trn->get_option("--room-size"), cfg.env.room_size, t_room);
      override_if(trn->get_option("--max-steps"), cfg.env.max_steps, t_max_steps);
      override_if(trn->get_option("--n-envs"), cfg.n_envs, t_envs);
      override_if(trn->get_option("--eval-interval"), cfg.eval_interval, t_eval);
      override_if(trn->get_option("--threads"), cfg.threads, t_threads);
      cfg.validate();

      const fs::path out = t_out;
      fs::create_directories(out);
      csv::write_file(out / "config.txt", experiment_config_text(cfg));
      TrainOptions opts;
      opts.checkpoint = out / "checkpoint.bin";
      opts.on_log = [](long long t, const LossReport& r) {
        std::cerr << fmt::format("t={} policy={:.4f} value={:.4f} entropy={:.4f} grad_norm={:.4f}\n", t,
                                 r.policy_loss, r.value_loss, r.entropy, r.grad_norm);
      };
      const auto res = train(cfg, opts);
      emit_metrics_csv(res.history, out / "metrics.csv");
      if (cfg.agent == AgentKind::CausalDiscovered) csv::write_file(out / "mind.csv", res.mind.dump_csv());
      std::cout << fmt::format("stopped_at={} early_stopped={}\n", res.stopped_at, res.early_stopped);
      if (!res.history.empty()) std::cout << row_line(res.history.back()) << '\n';
      return 0;
    }

    if (ev->parsed()) {
      const auto ckpt = load_checkpoint(e_ckpt);
      ExperimentConfig cfg = parse_experiment_config(ckpt.metadata);
      cfg.eval_episodes = e_episodes;
      cfg.greedy_eval = !e_stochastic;
      std::optional<DigitalMind> mind;
      if (!e_mind.empty()) mind = DigitalMind::from_csv(csv::read_file(e_mind));
      const auto row = evaluate(ckpt.params, cfg, e_seed, mind ? &*mind : nullptr);
      std::cout << metrics_csv({row});
      return 0;
    }

    if (plt->parsed()) {
      const auto series = collect_runs(p_in);
      if (series.empty()) throw Error(fmt::format("no metrics.csv under {}", p_in));
      fs::path out = p_out;
      if (out.extension().empty()) out += ".svg";
      emit_learning_curve(series, out);
      std::cout << fmt::format("{} series -> {}\n", series.size(), out.string());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
