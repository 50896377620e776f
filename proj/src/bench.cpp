#include "stowrl/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace stowrl {

void GenSpec::validate() const {
  if (n_slots < 1 || n_fill < 0 || n_stacks < 1 || stack_height < 1 || n_mask_ids < 1)
    throw Error("generator spec fields must be positive");
  if (n_fill > n_slots) throw Error("n_fill must be <= n_slots");
  if (n_stacks * stack_height < n_fill) throw Error("yard too small for n_fill containers");
}

ProblemInstance generate(const GenSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_int_distribution<int> mask_dist(1, spec.n_mask_ids);

  ProblemInstance p;
  p.id = "gen-" + std::to_string(spec.seed);
  p.ship.slots.assign(spec.n_slots, kEmpty);
  std::vector<int> positions(spec.n_slots);
  std::iota(positions.begin(), positions.end(), 0);
  std::shuffle(positions.begin(), positions.end(), rng);
  positions.resize(spec.n_fill);
  std::sort(positions.begin(), positions.end());
  for (int pos : positions) p.ship.slots[pos] = MaskId{mask_dist(rng)};

  p.yard.max_stack_height = spec.stack_height;
  p.yard.stacks.assign(spec.n_stacks, Stack{});
  for (auto& st : p.yard.stacks)
    for (int t = 0; t < spec.stack_height; ++t) st.push_back(MaskId{mask_dist(rng)});

  // Repair: overwrite containers of surplus masks until supply >= demand.
  std::vector<int> demand(spec.n_mask_ids + 1, 0), supply(spec.n_mask_ids + 1, 0);
  for (MaskId m : p.ship.slots)
    if (!m.empty()) ++demand[m.value];
  for (const auto& st : p.yard.stacks)
    for (MaskId m : st) ++supply[m.value];
  for (int m = 1; m <= spec.n_mask_ids; ++m) {
    while (supply[m] < demand[m]) {
      std::vector<ContainerRef> surplus;
      for (int s = 0; s < spec.n_stacks; ++s)
        for (int t = 0; t < spec.stack_height; ++t) {
          const int have = p.yard.stacks[s][t].value;
          if (supply[have] > demand[have]) surplus.push_back({s, t});
        }
      std::uniform_int_distribution<std::size_t> pick(0, surplus.size() - 1);
      const ContainerRef c = surplus[pick(rng)];
      --supply[p.yard.stacks[c.stack][c.tier].value];
      p.yard.stacks[c.stack][c.tier] = MaskId{m};
      ++supply[m];
    }
  }
  return p;
}

std::vector<ProblemInstance> generate_batch(const GenSpec& spec, std::size_t count) {
  spec.validate();
  std::vector<ProblemInstance> out(count);
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    GenSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    out[i] = generate(s);
  }
  return out;
}

std::vector<ProblemInstance> generate_batch_serial(const GenSpec& spec, std::size_t count) {
  std::vector<ProblemInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    GenSpec s = spec;
    s.seed = spec.seed + i;
    out.push_back(generate(s));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string PolicySpec::name() const {
  switch (kind) {
    case PolicyKind::random: return "random";
    case PolicyKind::lookahead: return std::to_string(k) + "-step";
    case PolicyKind::exact: return "optimal";
    case PolicyKind::checkpoint: return "rl:" + checkpoint.filename().string();
  }
  return "?";
}

PolicySpec parse_policy(const std::string& text) {
  PolicySpec p;
  if (text == "random") {
    p.kind = PolicyKind::random;
  } else if (text == "exact" || text == "optimal") {
    p.kind = PolicyKind::exact;
  } else if (text.rfind("lookahead:", 0) == 0) {
    p.kind = PolicyKind::lookahead;
    try {
      std::size_t used = 0;
      const std::string digits = text.substr(10);
      p.k = std::stoi(digits, &used);
      if (used != digits.size() || p.k < 0) throw std::invalid_argument("k");
    } catch (const std::logic_error&) {
      throw Error("bad lookahead depth in '" + text + "'");
    }
  } else if (text.rfind("checkpoint:", 0) == 0) {
    p.kind = PolicyKind::checkpoint;
    p.checkpoint = text.substr(11);
  } else if (!text.empty() && std::filesystem::exists(text)) {
    p.kind = PolicyKind::checkpoint;
    p.checkpoint = text;
  } else {
    throw Error("unknown policy '" + text +
                "' (expected random, lookahead:<k>, exact or a checkpoint path)");
  }
  return p;
}

SolveResult solve_with(const PolicySpec& policy, const ProblemInstance& problem,
                       std::size_t index, const SolveOptions& options, const PolicyNet* net) {
  switch (policy.kind) {
    case PolicyKind::random: {
      Rng rng(mix_seed(options.seed, index));
      return random_policy(problem, rng);
    }
    case PolicyKind::lookahead:
      return lookahead(problem, policy.k);
    case PolicyKind::exact:
      return exact_solve(problem, options.node_budget);
    case PolicyKind::checkpoint: {
      if (!net) throw Error("checkpoint policy needs a loaded network");
      std::vector<std::uint64_t> seeds;
      for (int e = 0; e < std::max(1, options.eval_episodes); ++e)
        seeds.push_back(mix_seed(mix_seed(options.seed, index), static_cast<std::uint64_t>(e)));
      EpisodeResult ep = evaluate_policy(*net, problem, seeds, options.max_mask_id);
      SolveResult r;
      r.plan = std::move(ep.picks);
      r.total_shuffles = ep.total_shuffles;
      r.nodes_explored = seeds.size();
      return r;
    }
  }
  throw Error("unhandled policy kind");
}

namespace {

std::optional<PolicyNet> load_for(const PolicySpec& policy) {
  if (policy.kind != PolicyKind::checkpoint) return std::nullopt;
  return PolicyNet::load(policy.checkpoint);
}

}  // namespace

std::vector<SolveResult> solve_batch(const PolicySpec& policy,
                                     const std::vector<ProblemInstance>& problems,
                                     const SolveOptions& options) {
  const auto net = load_for(policy);
  const PolicyNet* net_ptr = net ? &*net : nullptr;
  std::vector<SolveResult> out(problems.size());
  std::exception_ptr failure;
  std::mutex failure_mu;
  const long n = static_cast<long>(problems.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = solve_with(policy, problems[i], static_cast<std::size_t>(i), options, net_ptr);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<SolveResult> solve_batch_serial(const PolicySpec& policy,
                                            const std::vector<ProblemInstance>& problems,
                                            const SolveOptions& options) {
  const auto net = load_for(policy);
  const PolicyNet* net_ptr = net ? &*net : nullptr;
  std::vector<SolveResult> out;
  out.reserve(problems.size());
  for (std::size_t i = 0; i < problems.size(); ++i)
    out.push_back(solve_with(policy, problems[i], i, options, net_ptr));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> totals_of(const std::vector<SolveResult>& rs) {
  std::vector<int> t;
  t.reserve(rs.size());
  for (const auto& r : rs) t.push_back(r.total_shuffles);
  return t;
}

double pct(int num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * num / static_cast<double>(den);
}

}  // namespace

EvalRow tabulate(const std::string& name, const std::vector<int>& totals,
                 const std::vector<int>& zero_step, const std::vector<int>& one_step,
                 const std::vector<int>& oracle, const std::vector<bool>& oracle_optimal) {
  const std::size_t n = totals.size();
  if (zero_step.size() != n || one_step.size() != n || oracle.size() != n ||
      oracle_optimal.size() != n)
    throw Error("tabulate: per-instance vectors differ in length");
  EvalRow row;
  row.policy_name = name;
  row.totals = totals;
  std::size_t proven = 0;
  for (std::size_t i = 0; i < n; ++i) {
    row.lt_0step += totals[i] < zero_step[i];
    row.le_0step += totals[i] <= zero_step[i];
    row.lt_1step += totals[i] < one_step[i];
    row.le_1step += totals[i] <= one_step[i];
    if (!oracle_optimal[i]) continue;
    ++proven;
    if (totals[i] < oracle[i])
      throw Error("policy '" + name + "' beat the proven optimum on instance " +
                  std::to_string(i));
    row.gt_optimal += totals[i] > oracle[i];
    row.eq_optimal += totals[i] == oracle[i];
  }
  row.pct_lt_0step = pct(row.lt_0step, n);
  row.pct_le_0step = pct(row.le_0step, n);
  row.pct_lt_1step = pct(row.lt_1step, n);
  row.pct_le_1step = pct(row.le_1step, n);
  row.pct_gt_optimal = pct(row.gt_optimal, proven);
  row.pct_eq_optimal = pct(row.eq_optimal, proven);
  return row;
}

EvalReport evaluate(const std::vector<PolicySpec>& policies,
                    const std::vector<ProblemInstance>& testset, const SolveOptions& options) {
  EvalReport rep;
  rep.zero_step = totals_of(solve_batch(PolicySpec{PolicyKind::lookahead, 0, {}}, testset, options));
  rep.one_step = totals_of(solve_batch(PolicySpec{PolicyKind::lookahead, 1, {}}, testset, options));
  const auto oracle = solve_batch(PolicySpec{PolicyKind::exact, 0, {}}, testset, options);
  rep.oracle = totals_of(oracle);
  for (const auto& r : oracle) {
    rep.oracle_optimal.push_back(r.optimal);
    rep.excluded += !r.optimal;
  }
  for (const auto& p : policies) {
    std::vector<int> totals;
    if (p.kind == PolicyKind::exact)
      totals = rep.oracle;
    else if (p.kind == PolicyKind::lookahead && p.k == 0)
      totals = rep.zero_step;
    else if (p.kind == PolicyKind::lookahead && p.k == 1)
      totals = rep.one_step;
    else
      totals = totals_of(solve_batch(p, testset, options));
    rep.rows.push_back(
        tabulate(p.name(), totals, rep.zero_step, rep.one_step, rep.oracle, rep.oracle_optimal));
  }
  return rep;
}

namespace {

std::string fixed1(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", x);
  return buf;
}

}  // namespace

std::string format_table(const EvalReport& report) {
  const std::vector<std::string> head{"Policy",   "<0 step", "<=0 step", "<1 step",
                                      "<=1 step", ">Optimal", "=Optimal"};
  std::vector<std::vector<std::string>> cells{head};
  for (const auto& r : report.rows)
    cells.push_back({r.policy_name, fixed1(r.pct_lt_0step), fixed1(r.pct_le_0step),
                     fixed1(r.pct_lt_1step), fixed1(r.pct_le_1step), fixed1(r.pct_gt_optimal),
                     fixed1(r.pct_eq_optimal)});
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream os;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0)
        os << row[c] << std::string(width[c] - row[c].size(), ' ');
      else
        os << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
    }
    os << '\n';
  }
  os << "instances: " << report.oracle.size() << ", oracle not proven optimal (excluded): "
     << report.excluded << '\n';
  return os.str();
}

std::string table_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "policy,pct_lt_0step,pct_le_0step,pct_lt_1step,pct_le_1step,pct_gt_optimal,"
        "pct_eq_optimal,eq_optimal_count\n";
  for (const auto& r : report.rows)
    os << r.policy_name << ',' << fixed1(r.pct_lt_0step) << ',' << fixed1(r.pct_le_0step) << ','
       << fixed1(r.pct_lt_1step) << ',' << fixed1(r.pct_le_1step) << ','
       << fixed1(r.pct_gt_optimal) << ',' << fixed1(r.pct_eq_optimal) << ',' << r.eq_optimal
       << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

std::vector<PolicyBars> policy_bars(const std::vector<ProblemInstance>& problems,
                                    const TrainMetrics* metrics, int random_runs,
                                    const SolveOptions& options) {
  const auto zero = solve_batch(PolicySpec{PolicyKind::lookahead, 0, {}}, problems, options);
  const auto one = solve_batch(PolicySpec{PolicyKind::lookahead, 1, {}}, problems, options);
  const auto opt = solve_batch(PolicySpec{PolicyKind::exact, 0, {}}, problems, options);

  std::map<std::string, int> rl;
  if (metrics)
    for (const auto& s : metrics->problems) rl[s.problem_id] = s.best_shuffles;

  std::vector<PolicyBars> bars;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    PolicyBars b;
    b.problem_id = problems[i].id;
    b.random = std::numeric_limits<int>::max();
    for (int run = 0; run < std::max(1, random_runs); ++run) {
      Rng rng(mix_seed(mix_seed(options.seed, i), static_cast<std::uint64_t>(run)));
      b.random = std::min(b.random, random_policy(problems[i], rng).total_shuffles);
    }
    b.zero_step = zero[i].total_shuffles;
    b.one_step = one[i].total_shuffles;
    b.optimal = opt[i].total_shuffles;
    if (auto it = rl.find(b.problem_id); it != rl.end()) b.rl = it->second;
    bars.push_back(b);
  }
  return bars;
}

namespace {

std::string safe_name(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const TrainMetrics& metrics,
                                              const std::vector<PolicyBars>& bars,
                                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create plot directory " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  std::map<std::string, std::vector<const EpisodeRecord*>> per_problem;
  std::vector<std::string> order;
  for (const auto& r : metrics.episodes) {
    auto [it, inserted] = per_problem.try_emplace(r.problem_id);
    if (inserted) order.push_back(r.problem_id);
    it->second.push_back(&r);
  }
  char buf[64];
  for (const auto& id : order) {
    const auto path = out_dir / ("threshold_" + safe_name(id) + ".csv");
    auto out = open_out(path);
    out << "episode,theta,total_shuffles,best_so_far\n";
    int ep = 0;
    for (const EpisodeRecord* r : per_problem[id]) {
      auto [end, e] = std::to_chars(buf, buf + sizeof buf, r->theta);
      out << ep++ << ',' << std::string_view(buf, end - buf) << ',' << r->total_shuffles << ','
          << r->best_so_far << '\n';
    }
    written.push_back(path);
  }

  const auto bars_path = out_dir / "min_shuffles.csv";
  auto out = open_out(bars_path);
  out << "problem_id,random,zero_step,one_step,optimal,rl\n";
  for (const auto& b : bars) {
    out << b.problem_id << ',' << b.random << ',' << b.zero_step << ',' << b.one_step << ','
        << b.optimal << ',';
    if (b.rl) out << *b.rl;
    out << '\n';
  }
  written.push_back(bars_path);
  return written;
}

}  // namespace stowrl
