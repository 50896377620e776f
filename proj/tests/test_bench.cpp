#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stowrl/bench.hpp"
#include "stowrl/config.hpp"
#include "stowrl/problem_io.hpp"

using namespace stowrl;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("stowrl_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Generate, DefaultDimensions) {
  const auto p = generate(GenSpec{});
  EXPECT_EQ(p.ship.slots.size(), 23u);
  EXPECT_EQ(p.ship.fill_count(), 15u);
  EXPECT_EQ(p.yard.container_count(), 49u);
  EXPECT_EQ(p.yard.stack_count(), 7);
  EXPECT_EQ(p.max_mask_id(), 6);
}

TEST(Generate, FeasibleAndByteIdentical) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenSpec s;
    s.seed = seed;
    s.n_mask_ids = 1 + seed % 9;
    const auto p = generate(s);
    EXPECT_TRUE(p.deficient_masks().empty());
    EXPECT_EQ(serialize_problem(p), serialize_problem(generate(s)));
  }
}

TEST(Generate, SingleMaskZeroStepIsOptimal) {
  GenSpec s;
  s.n_mask_ids = 1;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    s.seed = seed;
    const auto p = generate(s);
    EXPECT_EQ(lookahead(p, 0).total_shuffles, exact_solve(p).total_shuffles);
    EXPECT_EQ(lookahead(p, 0).total_shuffles, 0);
  }
}

TEST(Generate, SpecValidation) {
  GenSpec s;
  s.n_fill = 30;
  EXPECT_THROW(generate(s), Error);
  s = GenSpec{};
  s.n_stacks = 2;
  s.stack_height = 2;
  EXPECT_THROW(generate(s), Error);
  s = GenSpec{};
  s.n_mask_ids = 0;
  EXPECT_THROW(generate(s), Error);
}

TEST(Batch, ParallelMatchesSerial) {
  GenSpec spec;
  spec.seed = 1000;
  const auto par = generate_batch(spec, 24);
  const auto ser = generate_batch_serial(spec, 24);
  EXPECT_EQ(par, ser);
  EXPECT_EQ(ser[3], generate(GenSpec{23, 15, 7, 7, 6, 1003}));

  for (const char* policy : {"random", "lookahead:0", "lookahead:2", "exact"}) {
    const auto spec_p = parse_policy(policy);
    const auto a = solve_batch(spec_p, par);
    const auto b = solve_batch_serial(spec_p, par);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].plan, b[i].plan) << policy;
      EXPECT_EQ(a[i].total_shuffles, b[i].total_shuffles);
      EXPECT_EQ(a[i].optimal, b[i].optimal);
    }
  }
}

TEST(Batch, ErrorsPropagateFromWorkers) {
  auto problems = generate_batch(GenSpec{}, 4);
  problems[2].ship = make_ship({9});
  EXPECT_THROW(solve_batch(parse_policy("exact"), problems), InfeasibleProblem);
}

TEST(ParsePolicy, Forms) {
  EXPECT_EQ(parse_policy("random").kind, PolicyKind::random);
  EXPECT_EQ(parse_policy("optimal").kind, PolicyKind::exact);
  const auto la = parse_policy("lookahead:3");
  EXPECT_EQ(la.kind, PolicyKind::lookahead);
  EXPECT_EQ(la.k, 3);
  EXPECT_EQ(la.name(), "3-step");
  EXPECT_EQ(parse_policy("checkpoint:/x/y.ckpt").checkpoint, fs::path("/x/y.ckpt"));
  EXPECT_THROW(parse_policy("lookahead:x"), Error);
  EXPECT_THROW(parse_policy("lookahead:-1"), Error);
  EXPECT_THROW(parse_policy("nonsense"), Error);
}

TEST(Evaluate, SelfComparisonAndOracleRow) {
  GenSpec spec;
  spec.seed = 2000;
  const auto set = generate_batch(spec, 30);
  const auto rep = evaluate({parse_policy("lookahead:0"), parse_policy("exact"), parse_policy("random")}, set);
  ASSERT_EQ(rep.rows.size(), 3u);
  const auto& zero = rep.rows[0];
  EXPECT_EQ(zero.pct_le_0step, 100.0);
  EXPECT_EQ(zero.pct_lt_0step, 0.0);
  EXPECT_EQ(rep.rows[1].pct_eq_optimal, 100.0);
  EXPECT_EQ(rep.excluded, 0u);
  for (const auto& r : rep.rows) {
    EXPECT_DOUBLE_EQ(r.pct_gt_optimal + r.pct_eq_optimal, 100.0);
    EXPECT_LE(r.lt_0step, r.le_0step);
    EXPECT_LE(r.lt_1step, r.le_1step);
    for (std::size_t i = 0; i < set.size(); ++i) EXPECT_GE(r.totals[i], rep.oracle[i]);
  }
  const std::string table = format_table(rep);
  EXPECT_NE(table.find("=Optimal"), std::string::npos);
  EXPECT_NE(table.find("0-step"), std::string::npos);
  const std::string csv = table_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Evaluate, PermutationInvariant) {
  GenSpec spec;
  spec.seed = 2100;
  auto set = generate_batch(spec, 20);
  const auto policies = std::vector<PolicySpec>{parse_policy("lookahead:1")};
  const auto a = evaluate(policies, set);
  std::mt19937_64 rng(4);
  std::shuffle(set.begin(), set.end(), rng);
  const auto b = evaluate(policies, set);
  EXPECT_EQ(a.rows[0].pct_eq_optimal, b.rows[0].pct_eq_optimal);
  EXPECT_EQ(a.rows[0].pct_lt_0step, b.rows[0].pct_lt_0step);
  EXPECT_EQ(a.rows[0].pct_le_1step, b.rows[0].pct_le_1step);
}

TEST(Tabulate, ExcludesUnprovenAndRejectsImpossible) {
  const std::vector<int> zero{3, 3, 3}, one{2, 2, 2}, opt{1, 1, 1};
  const auto row = tabulate("x", {1, 2, 3}, zero, one, opt, {true, true, false});
  EXPECT_EQ(row.eq_optimal, 1);
  EXPECT_EQ(row.gt_optimal, 1);
  EXPECT_DOUBLE_EQ(row.pct_eq_optimal, 50.0);
  EXPECT_EQ(row.lt_0step, 2);
  EXPECT_EQ(row.le_1step, 2);
  EXPECT_THROW(tabulate("x", {0, 2, 3}, zero, one, opt, {true, true, true}), Error);
  EXPECT_THROW(tabulate("x", {0}, zero, one, opt, {true, true, true}), Error);
}

TEST(Evaluate, CheckpointWidthMismatch) {
  const fs::path dir = fresh_dir("ckpt_eval");
  PolicyNet(NetSpec{{100, 2}, Activation::relu, 0}).save(dir / "bad.ckpt");
  const auto set = generate_batch(GenSpec{}, 2);
  EXPECT_THROW(evaluate({parse_policy((dir / "bad.ckpt").string())}, set), DimensionError);
  PolicyNet(NetSpec{}).save(dir / "ok.ckpt");
  const auto rep = evaluate({parse_policy("checkpoint:" + (dir / "ok.ckpt").string())}, set);
  EXPECT_EQ(rep.rows[0].policy_name, "rl:ok.ckpt");
  fs::remove_all(dir);
}

TEST(Plots, FilesAndInvariants) {
  const fs::path dir = fresh_dir("plots");
  GenSpec spec;
  spec.seed = 3000;
  const auto problems = generate_batch(spec, 2);
  TrainConfig c;
  c.episodes_per_problem = 40;
  c.iterations = 1;
  c.hidden_layers = {8};
  const auto result = train(problems, c);
  const auto bars = policy_bars(problems, &result.metrics, 5);
  const auto files = emit_plots(result.metrics, bars, dir);
  ASSERT_EQ(files.size(), 3u);
  for (int i = 0; i < 2; ++i) {
    const auto lines = lines_of(files[i]);
    ASSERT_EQ(lines.size(), 41u);
    double prev = 1e300;
    for (std::size_t l = 1; l < lines.size(); ++l) {
      std::stringstream ss(lines[l]);
      std::string ep, theta;
      std::getline(ss, ep, ',');
      std::getline(ss, theta, ',');
      EXPECT_LE(std::stod(theta), prev);
      prev = std::stod(theta);
    }
  }
  for (const auto& b : bars) {
    ASSERT_TRUE(b.rl);
    EXPECT_GE(*b.rl, b.optimal);
    EXPECT_GE(b.random, b.optimal);
    EXPECT_GE(b.zero_step, b.optimal);
  }
  EXPECT_EQ(lines_of(files[2]).size(), 3u);
  fs::remove_all(dir);
}

TEST(ProblemIo, RoundTrip) {
  const fs::path dir = fresh_dir("io");
  const auto problems = generate_batch(GenSpec{}, 3);
  for (const auto& p : problems) write_problem(p, dir / (p.id + ".json"));
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto back = read_problem_dir(dir);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back[i], problems[i]);
  fs::remove_all(dir);
}

TEST(ProblemIo, ParsesDocumentedFormat) {
  const auto p = parse_problem(
      R"({"version": 1, "id": "t", "slots": [0, 2, 1], "yard": [[1, 2], [], [2]]})");
  EXPECT_EQ(p.id, "t");
  EXPECT_EQ(p.ship, make_ship({0, 2, 1}));
  EXPECT_EQ(p.yard, make_yard({{1, 2}, {}, {2}}));
  EXPECT_EQ(p.yard.max_stack_height, 7);
}

TEST(ProblemIo, Rejections) {
  EXPECT_THROW(parse_problem(R"({"version": 2, "id": "t", "slots": [], "yard": []})"), FormatError);
  EXPECT_THROW(parse_problem(R"({"id": "t", "slots": [], "yard": []})"), FormatError);
  EXPECT_THROW(parse_problem(R"({"version": 1, "id": "t", "slots": [-1], "yard": []})"), FormatError);
  EXPECT_THROW(parse_problem(R"({"version": 1, "id": "t", "slots": [1], "yard": [[0]]})"), FormatError);
  EXPECT_THROW(parse_problem(R"({"version": 1, "id": "t", "slots": [], "yard": [[1,1,1]], "max_stack_height": 2})"),
               FormatError);
  EXPECT_THROW(parse_problem("{not json"), FormatError);
  EXPECT_THROW(read_problem("/nonexistent/file.json"), FormatError);
}

TEST(ConfigFile, KeyValues) {
  auto kv = parse_key_values("# comment\nsetting = DRP\nlr=0.01  # trailing\n\nhidden_layers = 8, 4\n"
                             "theta0 = 3.5\npool_granularity = episodes\nbogus = 1\n");
  TrainConfig c;
  apply(kv, c);
  EXPECT_EQ(c.setting, Setting::DRP);
  EXPECT_DOUBLE_EQ(c.lr, 0.01);
  EXPECT_EQ(c.hidden_layers, (std::vector<int>{8, 4}));
  EXPECT_EQ(c.theta0_rule, ThetaInit::constant);
  EXPECT_DOUBLE_EQ(c.theta0_constant, 3.5);
  EXPECT_EQ(c.pool_granularity, PoolGranularity::episodes);
  ASSERT_EQ(kv.size(), 1u);
  EXPECT_EQ(kv.begin()->first, "bogus");

  auto g = parse_key_values("n_mask_ids = 3\nseed = 9\n");
  GenSpec s;
  apply(g, s);
  EXPECT_EQ(s.n_mask_ids, 3);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_TRUE(g.empty());

  EXPECT_THROW(parse_key_values("no equals sign\n"), FormatError);
  auto badnum = parse_key_values("lr = fast\n");
  EXPECT_THROW(apply(badnum, c), FormatError);
}
