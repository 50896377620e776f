#include "stowrl/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "stowrl/baselines.hpp"

namespace stowrl {

std::string to_string(Setting s) {
  switch (s) {
    case Setting::DRWP: return "DRWP";
    case Setting::DRP: return "DRP";
    case Setting::IRWP: return "IRWP";
    case Setting::IRP: return "IRP";
  }
  return "IRP";
}

Setting parse_setting(const std::string& s) {
  if (s == "DRWP") return Setting::DRWP;
  if (s == "DRP") return Setting::DRP;
  if (s == "IRWP") return Setting::IRWP;
  if (s == "IRP") return Setting::IRP;
  throw Error("unknown setting '" + s + "' (expected DRWP, DRP, IRWP or IRP)");
}

bool uses_pool(Setting s) noexcept { return s == Setting::DRP || s == Setting::IRP; }
bool uses_intermediate(Setting s) noexcept { return s == Setting::IRWP || s == Setting::IRP; }

void TrainConfig::validate() const {
  if (episodes_per_problem < 1) throw Error("episodes_per_problem must be >= 1");
  if (iterations < 1) throw Error("iterations must be >= 1");
  if (threshold_window < 1 || threshold_window > episodes_per_problem)
    throw Error("threshold_window must be in [1, episodes_per_problem]");
  if (top_k < 1) throw Error("top_k must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("gamma must be in (0, 1]");
  if (!(lr > 0.0)) throw Error("lr must be positive");
  if (pool_capacity < 1) throw Error("pool_capacity must be >= 1");
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PolicyFn policy_of(const PolicyNet& net) {
  return [&net](std::span<const double> obs) { return net.forward(obs); };
}

EpisodeResult run_episode(const std::function<EnvState()>& make_state, const PolicyFn& policy,
                          Rng& rng, bool sample_actions) {
  EnvState state = make_state();
  EpisodeResult out;
  Observation obs = encode(state);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (!state.done) {
    const auto p = policy(obs);
    Action a;
    if (sample_actions)
      a = unit(rng) < p[0] ? Action::agree : Action::disagree;
    else
      a = p[0] >= p[1] ? Action::agree : Action::disagree;

    StepOutcome o = step(state, a);
    out.samples.push_back(TrajectorySample{std::move(obs), a, o.r_intermediate, 0.0});
    if (o.info.loaded) out.picks.push_back(*o.info.loaded);
    obs = std::move(o.observation);
  }
  out.total_shuffles = state.shuffles_so_far;
  return out;
}

void discounted_returns(std::vector<TrajectorySample>& samples, double r_final, double gamma) {
  double discount = 1.0;
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
    it->v = it->r_intermediate + r_final * discount;
    discount *= gamma;
  }
}

double update_threshold(ProblemTrainState& state, int window) {
  if (window < 1 || static_cast<int>(state.recent_shuffles.size()) < window)
    throw Error("update_threshold: not enough recorded episodes");
  const double sum = std::accumulate(state.recent_shuffles.end() - window,
                                     state.recent_shuffles.end(), 0.0);
  state.theta = std::min(state.theta, sum / window);
  return state.theta;
}

namespace {

TrainBatch to_batch(const std::vector<TrajectorySample>& samples, bool center) {
  TrainBatch batch;
  batch.reserve(samples.size());
  for (const auto& s : samples) batch.push_back({s.observation, s.action, s.v});
  if (center && !batch.empty()) {
    double mean = 0.0;
    for (const auto& ex : batch) mean += ex.advantage;
    mean /= static_cast<double>(batch.size());
    for (auto& ex : batch) ex.advantage -= mean;
  }
  return batch;
}

}  // namespace

TrainResult train(const std::vector<ProblemInstance>& problems, const TrainConfig& config) {
  config.validate();
  for (const auto& p : problems) p.require_feasible();

  EnvConfig env_cfg;
  env_cfg.gamma = config.gamma;
  env_cfg.reward_mode = uses_intermediate(config.setting) ? RewardMode::intermediate_and_delayed
                                                          : RewardMode::delayed_only;
  env_cfg.max_mask_id = config.max_mask_id;
  env_cfg.theta0_rule = config.theta0_rule;
  env_cfg.theta0_constant = config.theta0_constant;

  NetSpec spec;
  spec.layer_sizes = {env_cfg.layout.size()};
  for (int w : config.hidden_layers) spec.layer_sizes.push_back(w);
  spec.layer_sizes.push_back(2);
  spec.hidden_activation = config.hidden_activation;
  spec.seed = mix_seed(config.seed, 0x6E6574);
  PolicyNet net(spec);

  TrainMetrics metrics;
  std::vector<ProblemTrainState> states;
  for (const auto& p : problems) {
    ProblemTrainState st;
    st.pool = ProblemPool(p.id, config.pool_capacity);
    st.theta = config.theta0_rule == ThetaInit::zero_step_plus_one
                   ? lookahead(p, 0).total_shuffles + 1.0
                   : config.theta0_constant;
    states.push_back(std::move(st));
    metrics.problems.push_back(ProblemSummary{p.id, states.back().theta, states.back().theta,
                                              kNoBest, {}});
  }

  Rng action_rng(mix_seed(config.seed, 0x616374));
  const PolicyFn policy = policy_of(net);
  std::int64_t episode_id = 0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    for (std::size_t pi = 0; pi < problems.size(); ++pi) {
      const ProblemInstance& problem = problems[pi];
      ProblemTrainState& st = states[pi];
      ProblemSummary& summary = metrics.problems[pi];

      for (int ep = 0; ep < config.episodes_per_problem; ++ep, ++episode_id) {
        EnvConfig cfg = env_cfg;
        cfg.rng_seed = mix_seed(mix_seed(config.seed, pi), static_cast<std::uint64_t>(st.episodes_run));
        EpisodeResult result =
            run_episode([&] { return reset(problem, cfg); }, policy, action_rng, true);

        const double r_final = final_reward(result.total_shuffles, st.theta, st.best_shuffles);
        st.best_shuffles = std::min(st.best_shuffles, result.total_shuffles);
        discounted_returns(result.samples, r_final, config.gamma);

        std::vector<TrajectorySample> train_samples;
        if (uses_pool(config.setting)) {
          st.pool.push_episode(episode_id, result.samples, r_final);
          if (!st.pool.empty()) {
            train_samples = config.pool_granularity == PoolGranularity::samples
                                ? st.pool.top_k(static_cast<std::size_t>(config.top_k))
                                : st.pool.top_k_episodes(static_cast<std::size_t>(config.top_k));
          } else {
            train_samples = result.samples;
          }
        } else {
          train_samples = result.samples;
        }
        if (!train_samples.empty()) {
          const double loss = net.train_batch(to_batch(train_samples, config.center_advantages),
                                              config.lr);
          if (!std::isfinite(loss)) throw Error("training aborted: non-finite loss");
        }

        st.recent_shuffles.push_back(result.total_shuffles);
        while (static_cast<int>(st.recent_shuffles.size()) > config.threshold_window)
          st.recent_shuffles.pop_front();
        ++st.episodes_run;
        if (st.episodes_run % config.threshold_window == 0)
          update_threshold(st, config.threshold_window);

        summary.theta = st.theta;
        summary.best_shuffles = st.best_shuffles;
        summary.theta_trajectory.push_back(st.theta);
        metrics.episodes.push_back(EpisodeRecord{config.setting, problem.id, iter, ep,
                                                 result.total_shuffles, st.theta,
                                                 st.best_shuffles});
      }
    }
  }
  return TrainResult{std::move(net), std::move(metrics)};
}

EpisodeResult evaluate_policy(const PolicyNet& net, const ProblemInstance& problem,
                              std::span<const std::uint64_t> env_seeds, int max_mask_id) {
  if (env_seeds.empty()) throw Error("evaluate_policy needs at least one env seed");
  const PolicyFn policy = policy_of(net);
  Rng unused(0);
  EpisodeResult best;
  bool have = false;
  for (std::uint64_t seed : env_seeds) {
    EnvConfig cfg;
    cfg.rng_seed = seed;
    cfg.max_mask_id = max_mask_id;
    if (cfg.layout.size() != net.input_width())
      throw DimensionError("checkpoint input width " + std::to_string(net.input_width()) +
                           " does not match observation width " +
                           std::to_string(cfg.layout.size()));
    EpisodeResult r = run_episode([&] { return reset(problem, cfg); }, policy, unused, false);
    if (!have || r.total_shuffles < best.total_shuffles) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Metrics CSV
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

constexpr const char* kMetricsHeader =
    "setting,problem_id,iteration,episode,total_shuffles,theta,best_so_far";

}  // namespace

std::string metrics_csv(const TrainMetrics& metrics) {
  std::ostringstream os;
  os << kMetricsHeader << '\n';
  for (const auto& r : metrics.episodes) {
    os << to_string(r.setting) << ',' << r.problem_id << ',' << r.iteration << ',' << r.episode
       << ',' << r.total_shuffles << ',' << fmt_double(r.theta) << ',' << r.best_so_far << '\n';
  }
  return os.str();
}

void write_metrics_csv(const TrainMetrics& metrics, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write metrics file " + path.string());
  out << metrics_csv(metrics);
}

TrainMetrics read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw FormatError("metrics file " + path.string() + " has an unexpected header");

  TrainMetrics m;
  std::map<std::string, std::size_t> index;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 7)
      throw FormatError("metrics line " + std::to_string(lineno) + ": expected 7 fields");
    EpisodeRecord r;
    try {
      r.setting = parse_setting(f[0]);
      r.problem_id = f[1];
      r.iteration = std::stoi(f[2]);
      r.episode = std::stoi(f[3]);
      r.total_shuffles = std::stoi(f[4]);
      r.theta = std::stod(f[5]);
      r.best_so_far = std::stoi(f[6]);
    } catch (const std::logic_error&) {
      throw FormatError("metrics line " + std::to_string(lineno) + ": bad field");
    }
    auto [it, inserted] = index.try_emplace(r.problem_id, m.problems.size());
    if (inserted) m.problems.push_back(ProblemSummary{r.problem_id, r.theta, r.theta, kNoBest, {}});
    ProblemSummary& s = m.problems[it->second];
    s.theta = r.theta;
    s.best_shuffles = r.best_so_far;
    s.theta_trajectory.push_back(r.theta);
    m.episodes.push_back(std::move(r));
  }
  return m;
}

}  // namespace stowrl
