// stowrl: generate container-loading instances, run baseline solvers, train
// and evaluate the policy-gradient agent, and emit plot tables.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stowrl/baselines.hpp"
#include "stowrl/bench.hpp"
#include "stowrl/config.hpp"
#include "stowrl/problem_io.hpp"
#include "stowrl/trainer.hpp"

namespace fs = std::filesystem;
using namespace stowrl;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kFormat = 3,
  kInfeasible = 4,
  kCheckpoint = 5,
  kDimension = 6,
};

void report_unknown(const KeyValues& kv) {
  if (kv.empty()) return;
  std::string keys;
  for (const auto& [k, v] : kv) keys += ' ' + k;
  throw FormatError("config: unknown keys:" + keys);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

struct GenArgs {
  fs::path config;
  fs::path out = "problems";
  std::size_t count = 1;
  GenSpec spec;
  std::optional<int> n_slots, n_fill, n_stacks, stack_height, n_mask_ids;
  std::optional<std::uint64_t> seed;
};

int run_gen(const GenArgs& a) {
  GenSpec spec;
  if (!a.config.empty()) {
    auto kv = read_key_values(a.config);
    apply(kv, spec);
    report_unknown(kv);
  }
  if (a.n_slots) spec.n_slots = *a.n_slots;
  if (a.n_fill) spec.n_fill = *a.n_fill;
  if (a.n_stacks) spec.n_stacks = *a.n_stacks;
  if (a.stack_height) spec.stack_height = *a.stack_height;
  if (a.n_mask_ids) spec.n_mask_ids = *a.n_mask_ids;
  if (a.seed) spec.seed = *a.seed;

  fs::create_directories(a.out);
  const auto problems = generate_batch(spec, a.count);
  for (const auto& p : problems) write_problem(p, a.out / (p.id + ".json"));
  std::cout << "wrote " << problems.size() << " problem(s) to " << a.out.string() << '\n';
  return kOk;
}

struct SolveArgs {
  fs::path problem;
  std::string policy = "exact";
  SolveOptions options;
};

int run_solve(const SolveArgs& a) {
  const ProblemInstance p = read_problem(a.problem);
  const PolicySpec spec = parse_policy(a.policy);
  const auto results = solve_batch_serial(spec, {p}, a.options);
  const SolveResult& r = results.front();
  std::cout << "problem: " << p.id << '\n'
            << "policy: " << spec.name() << '\n'
            << "total_shuffles: " << r.total_shuffles << '\n'
            << "optimal: " << (r.optimal ? "true" : "false") << '\n'
            << "nodes_explored: " << r.nodes_explored << '\n'
            << "elapsed_s: " << r.elapsed.count() << '\n'
            << "plan:";
  for (ContainerRef c : r.plan) std::cout << ' ' << to_string(c);
  std::cout << '\n';
  return kOk;
}

struct TrainArgs {
  fs::path problems;
  fs::path config;
  fs::path out = "run";
  std::optional<std::string> setting;
  std::vector<std::uint64_t> seeds;
  std::optional<int> episodes, iterations, window, top_k;
  std::optional<double> gamma, lr;
};

int run_train(const TrainArgs& a) {
  TrainConfig base;
  if (!a.config.empty()) {
    auto kv = read_key_values(a.config);
    apply(kv, base);
    report_unknown(kv);
  }
  if (a.setting) base.setting = parse_setting(*a.setting);
  if (a.episodes) base.episodes_per_problem = *a.episodes;
  if (a.iterations) base.iterations = *a.iterations;
  if (a.window) base.threshold_window = *a.window;
  if (a.top_k) base.top_k = *a.top_k;
  if (a.gamma) base.gamma = *a.gamma;
  if (a.lr) base.lr = *a.lr;

  const auto problems = read_problem_dir(a.problems);
  if (problems.empty()) throw FormatError("no problem files in " + a.problems.string());

  std::vector<std::uint64_t> seeds = a.seeds;
  if (seeds.empty()) seeds.push_back(base.seed);
  fs::create_directories(a.out);
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = base;
    cfg.seed = seed;
    const std::string tag = to_string(cfg.setting) + "_seed" + std::to_string(seed);
    TrainResult result = train(problems, cfg);
    const fs::path metrics_path = a.out / (tag + "_metrics.csv");
    const fs::path ckpt_path = a.out / (tag + ".ckpt");
    write_metrics_csv(result.metrics, metrics_path);
    result.net.save(ckpt_path);

    std::cout << tag << ": metrics " << metrics_path.string() << ", checkpoint "
              << ckpt_path.string() << '\n';
    std::cout << "  problem            theta0    theta  best\n";
    for (const auto& s : result.metrics.problems) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-16s %8.2f %8.2f %5d\n", s.problem_id.c_str(),
                    s.theta0, s.theta, s.best_shuffles);
      std::cout << line;
    }
  }
  return kOk;
}

struct EvalArgs {
  fs::path problems;
  std::vector<std::string> policies{"random", "lookahead:0", "lookahead:1", "exact"};
  fs::path csv;
  SolveOptions options;
};

int run_eval(const EvalArgs& a) {
  const auto problems = read_problem_dir(a.problems);
  if (problems.empty()) throw FormatError("no problem files in " + a.problems.string());
  std::vector<PolicySpec> specs;
  for (const auto& p : a.policies) specs.push_back(parse_policy(p));
  const EvalReport rep = evaluate(specs, problems, a.options);
  std::cout << format_table(rep);
  std::cout << "optimal-match counts:";
  for (const auto& r : rep.rows) std::cout << ' ' << r.policy_name << '=' << r.eq_optimal;
  std::cout << '\n';
  if (!a.csv.empty()) write_text(a.csv, table_csv(rep));
  return kOk;
}

struct PlotArgs {
  fs::path metrics;
  fs::path problems;
  fs::path out = "plots";
  int random_runs = 10;
  SolveOptions options;
};

int run_plots(const PlotArgs& a) {
  const TrainMetrics metrics = read_metrics_csv(a.metrics);
  std::vector<ProblemInstance> problems;
  if (!a.problems.empty()) problems = read_problem_dir(a.problems);
  const auto bars = policy_bars(problems, &metrics, a.random_runs, a.options);
  for (const auto& path : emit_plots(metrics, bars, a.out)) std::cout << path.string() << '\n';
  return kOk;
}

void add_solve_options(CLI::App* app, SolveOptions& o) {
  app->add_option("--seed", o.seed, "Seed for random policy and environment propositions");
  app->add_option("--node-budget", o.node_budget, "Exact solver node budget")
      ->check(CLI::PositiveNumber);
  app->add_option("--episodes", o.eval_episodes, "Argmax rollouts per instance for checkpoints")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-mask-id", o.max_mask_id, "Mask-id normalization for checkpoints");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Container loading sequencing: baselines, RL training and evaluation"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate synthetic problem files");
  g->add_option("--count", gen.count, "Number of instances")->check(CLI::PositiveNumber);
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--config", gen.config, "key = value file with generator fields")
      ->check(CLI::ExistingFile);
  g->add_option("--seed", gen.seed, "Seed of the first instance");
  g->add_option("--n-slots", gen.n_slots);
  g->add_option("--n-fill", gen.n_fill);
  g->add_option("--n-stacks", gen.n_stacks);
  g->add_option("--stack-height", gen.stack_height);
  g->add_option("--n-mask-ids", gen.n_mask_ids);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve one problem file with a policy");
  s->add_option("problem", solve.problem, "Problem file")->required()->check(CLI::ExistingFile);
  s->add_option("--policy", solve.policy,
                "random | lookahead:<k> | exact | checkpoint:<path> | <checkpoint path>");
  add_solve_options(s, solve.options);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train the policy on a directory of problems");
  t->add_option("--problems", tr.problems, "Problem directory")->required()->check(CLI::ExistingDirectory);
  t->add_option("--config", tr.config, "key = value training config")->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "Output directory for metrics and checkpoints");
  t->add_option("--setting", tr.setting, "DRWP | DRP | IRWP | IRP");
  t->add_option("--seeds", tr.seeds, "One run per seed")->delimiter(',');
  t->add_option("--episodes", tr.episodes, "Episodes per problem per iteration");
  t->add_option("--iterations", tr.iterations);
  t->add_option("--threshold-window", tr.window);
  t->add_option("--top-k", tr.top_k);
  t->add_option("--gamma", tr.gamma);
  t->add_option("--lr", tr.lr);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Tabulate policies against 0-step, 1-step and optimal");
  e->add_option("--problems", ev.problems, "Problem directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--policies", ev.policies, "Comma separated policies")->delimiter(',');
  e->add_option("--csv", ev.csv, "Also write the table as CSV");
  add_solve_options(e, ev.options);

  PlotArgs pl;
  auto* p = app.add_subcommand("plots", "Write threshold and minimum-shuffle plot tables");
  p->add_option("--metrics", pl.metrics, "Training metrics CSV")->required()->check(CLI::ExistingFile);
  p->add_option("--problems", pl.problems, "Problem directory for the policy bars")
      ->check(CLI::ExistingDirectory);
  p->add_option("--out", pl.out, "Output directory");
  p->add_option("--random-runs", pl.random_runs, "Random draws per problem (minimum is kept)");
  add_solve_options(p, pl.options);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return run_gen(gen);
    if (*s) return run_solve(solve);
    if (*t) return run_train(tr);
    if (*e) return run_eval(ev);
    if (*p) return run_plots(pl);
  } catch (const InfeasibleProblem& err) {
    std::cerr << "error[infeasible]: " << err.what() << '\n';
    return kInfeasible;
  } catch (const CheckpointError& err) {
    std::cerr << "error[checkpoint]: " << err.what() << '\n';
    return kCheckpoint;
  } catch (const FormatError& err) {
    std::cerr << "error[format]: " << err.what() << '\n';
    return kFormat;
  } catch (const DimensionError& err) {
    std::cerr << "error[dimension]: " << err.what() << '\n';
    return kDimension;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
