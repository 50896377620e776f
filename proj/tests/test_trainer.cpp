#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "stowrl/baselines.hpp"
#include "stowrl/bench.hpp"
#include "stowrl/trainer.hpp"

using namespace stowrl;
namespace fs = std::filesystem;

namespace {

PolicyFn constant_policy(double p_agree) {
  return [p_agree](std::span<const double>) { return std::array<double, 2>{p_agree, 1 - p_agree}; };
}

TrainConfig small_config(Setting s, int episodes = 40) {
  TrainConfig c;
  c.setting = s;
  c.episodes_per_problem = episodes;
  c.iterations = 1;
  c.hidden_layers = {16, 8};
  c.seed = 3;
  return c;
}

}  // namespace

TEST(DiscountedReturns, Examples) {
  std::vector<TrajectorySample> s(3);
  discounted_returns(s, 1.0, 0.5);
  EXPECT_EQ(s[0].v, 0.25);
  EXPECT_EQ(s[1].v, 0.5);
  EXPECT_EQ(s[2].v, 1.0);

  std::vector<TrajectorySample> g(4);
  for (int i = 0; i < 4; ++i) g[i].r_intermediate = 0.05 * i;
  discounted_returns(g, 2.0, 1.0);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g[i].v, 0.05 * i + 2.0);

  std::vector<TrajectorySample> last(2);
  last[1].r_intermediate = 0.1;
  discounted_returns(last, -1.0, 0.99);
  EXPECT_DOUBLE_EQ(last[1].v, 0.1 - 1.0);
}

TEST(DiscountedReturns, IncreasingTowardEnd) {
  std::vector<TrajectorySample> s(20);
  discounted_returns(s, 1.0, 0.9);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1].v, s[i].v);
}

TEST(UpdateThreshold, MinRule) {
  ProblemTrainState st;
  st.theta = 10;
  st.recent_shuffles = {6, 10, 8};
  EXPECT_EQ(update_threshold(st, 3), 8);
  st.theta = 5;
  EXPECT_EQ(update_threshold(st, 3), 5);
  EXPECT_THROW(update_threshold(st, 4), Error);
}

TEST(RunEpisode, AlwaysAgreeReplays) {
  const auto problems = generate_batch(GenSpec{}, 5);
  for (const auto& p : problems) {
    EnvConfig cfg;
    cfg.rng_seed = 11;
    Rng rng(0);
    const auto r = run_episode([&] { return reset(p, cfg); }, constant_policy(1.0), rng, true);
    EXPECT_EQ(r.samples.size(), p.ship.fill_count());
    EXPECT_EQ(r.picks.size(), p.ship.fill_count());
    EXPECT_EQ(r.total_shuffles, plan_cost(p, r.picks));
  }
}

TEST(RunEpisode, DeterministicAndEmpty) {
  const auto p = generate(GenSpec{});
  EnvConfig cfg;
  cfg.rng_seed = 5;
  Rng a(1), b(1);
  const auto ra = run_episode([&] { return reset(p, cfg); }, constant_policy(0.4), a, true);
  const auto rb = run_episode([&] { return reset(p, cfg); }, constant_policy(0.4), b, true);
  EXPECT_EQ(ra.total_shuffles, rb.total_shuffles);
  EXPECT_EQ(ra.samples, rb.samples);
  EXPECT_GE(ra.samples.size(), ra.picks.size());

  ProblemInstance empty{"e", make_ship({0, 0}), make_yard({{1}})};
  const auto re = run_episode([&] { return reset(empty, cfg); }, constant_policy(0.5), a, true);
  EXPECT_TRUE(re.samples.empty());
  EXPECT_EQ(re.total_shuffles, 0);
}

TEST(RunEpisode, ArgmaxTiesAgree) {
  ProblemInstance p{"p", make_ship({1}), make_yard({{1}, {1}})};
  EnvConfig cfg;
  Rng rng(0);
  const auto r = run_episode([&] { return reset(p, cfg); }, constant_policy(0.5), rng, false);
  ASSERT_EQ(r.samples.size(), 1u);
  EXPECT_EQ(r.samples[0].action, Action::agree);
}

TEST(Settings, ParseAndFlags) {
  for (Setting s : {Setting::DRWP, Setting::DRP, Setting::IRWP, Setting::IRP})
    EXPECT_EQ(parse_setting(to_string(s)), s);
  EXPECT_THROW(parse_setting("XYZ"), Error);
  EXPECT_TRUE(uses_pool(Setting::DRP));
  EXPECT_FALSE(uses_pool(Setting::IRWP));
  EXPECT_TRUE(uses_intermediate(Setting::IRWP));
  EXPECT_FALSE(uses_intermediate(Setting::DRP));
}

TEST(Config, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.threshold_window = 300;
  EXPECT_THROW(c.validate(), Error);
  c = TrainConfig{};
  c.top_k = 0;
  EXPECT_THROW(c.validate(), Error);
  c = TrainConfig{};
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Train, ThresholdAndBestInvariants) {
  GenSpec spec;
  spec.seed = 50;
  const auto problems = generate_batch(spec, 3);
  for (Setting s : {Setting::DRWP, Setting::IRP}) {
    const auto result = train(problems, small_config(s));
    ASSERT_EQ(result.metrics.problems.size(), problems.size());
    ASSERT_EQ(result.metrics.episodes.size(), 3u * 40);
    for (std::size_t i = 0; i < problems.size(); ++i) {
      const auto& sum = result.metrics.problems[i];
      EXPECT_EQ(sum.theta0, lookahead(problems[i], 0).total_shuffles + 1.0);
      const auto& traj = sum.theta_trajectory;
      for (std::size_t t = 1; t < traj.size(); ++t) EXPECT_LE(traj[t], traj[t - 1]);
      EXPECT_GE(sum.best_shuffles, exact_solve(problems[i]).total_shuffles);
    }
    int prev_best = kNoBest;
    std::string prev_id;
    for (const auto& r : result.metrics.episodes) {
      if (r.problem_id != prev_id) prev_best = kNoBest, prev_id = r.problem_id;
      EXPECT_LE(r.best_so_far, prev_best);
      EXPECT_LE(r.best_so_far, r.total_shuffles);
      prev_best = r.best_so_far;
    }
  }
}

TEST(Train, AdversarialThetaUsesFallback) {
  // theta0 = 0 makes every non-best episode negative, so pool settings must
  // fall back to the raw episode and still update the net.
  auto c = small_config(Setting::DRP, 20);
  c.theta0_rule = ThetaInit::constant;
  c.theta0_constant = 0.0;
  const auto problems = generate_batch(GenSpec{}, 1);
  const auto r = train(problems, c);
  EXPECT_GT(r.net.update_count(), 0u);
  EXPECT_EQ(r.metrics.problems[0].theta0, 0.0);
}

TEST(Train, Reproducible) {
  const auto problems = generate_batch(GenSpec{}, 2);
  const auto a = train(problems, small_config(Setting::IRP, 25));
  const auto b = train(problems, small_config(Setting::IRP, 25));
  EXPECT_EQ(metrics_csv(a.metrics), metrics_csv(b.metrics));
  EXPECT_EQ(a.net.serialize(), b.net.serialize());
}

TEST(Train, RejectsInfeasible) {
  std::vector<ProblemInstance> bad{{"b", make_ship({1}), make_yard({{2}})}};
  EXPECT_THROW(train(bad, small_config(Setting::IRP)), InfeasibleProblem);
}

TEST(Metrics, CsvRoundTrip) {
  const auto problems = generate_batch(GenSpec{}, 2);
  const auto r = train(problems, small_config(Setting::IRWP, 20));
  const fs::path path = fs::temp_directory_path() / "stowrl_test_metrics.csv";
  write_metrics_csv(r.metrics, path);
  const auto back = read_metrics_csv(path);
  EXPECT_EQ(metrics_csv(back), metrics_csv(r.metrics));
  ASSERT_EQ(back.problems.size(), 2u);
  EXPECT_EQ(back.problems[0].best_shuffles, r.metrics.problems[0].best_shuffles);
  fs::remove(path);
}

TEST(EvaluatePolicy, ArgmaxRollout) {
  const auto p = generate(GenSpec{});
  PolicyNet net(NetSpec{});
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto r = evaluate_policy(net, p, seeds);
  EXPECT_EQ(r.total_shuffles, plan_cost(p, r.picks));
  EXPECT_THROW(evaluate_policy(net, p, std::vector<std::uint64_t>{}), Error);
  PolicyNet narrow(NetSpec{{100, 2}, Activation::relu, 0});
  EXPECT_THROW(evaluate_policy(narrow, p, seeds), DimensionError);
}
