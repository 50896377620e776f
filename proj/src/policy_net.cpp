#include "stowrl/policy_net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace stowrl {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "relu";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw Error("unknown activation '" + s + "'");
}

PolicyNet::PolicyNet(NetSpec spec, AdamConfig adam) : spec_(std::move(spec)), adam_(adam) {
  const auto& w = spec_.layer_sizes;
  if (w.size() < 2) throw DimensionError("policy net needs at least an input and output width");
  for (int x : w)
    if (x <= 0) throw DimensionError("policy net widths must be positive");
  if (w.back() != 2) throw DimensionError("policy net output width must be 2");
  build_layout();

  Rng rng(spec_.seed);
  for (const auto& L : layers_) {
    const double limit = std::sqrt(6.0 / (L.in + L.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (int i = 0; i < L.in * L.out; ++i) params_[L.w + i] = dist(rng);
  }
}

void PolicyNet::build_layout() {
  layers_.clear();
  std::size_t off = 0;
  const auto& w = spec_.layer_sizes;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    LayerView L{w[l], w[l + 1], off, off + static_cast<std::size_t>(w[l]) * w[l + 1]};
    off = L.b + L.out;
    layers_.push_back(L);
  }
  params_.assign(off, 0.0);
  m_.assign(off, 0.0);
  v_.assign(off, 0.0);
}

double PolicyNet::activate(double x) const noexcept {
  return spec_.hidden_activation == Activation::relu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

double PolicyNet::activate_grad(double pre, double post) const noexcept {
  if (spec_.hidden_activation == Activation::relu) return pre > 0.0 ? 1.0 : 0.0;
  return 1.0 - post * post;
}

std::array<double, 2> PolicyNet::logits(std::span<const double> observation) const {
  if (static_cast<int>(observation.size()) != input_width())
    throw DimensionError("observation width " + std::to_string(observation.size()) +
                         " does not match network input width " +
                         std::to_string(input_width()));
  std::vector<double> cur(observation.begin(), observation.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    const bool hidden = l + 1 < layers_.size();
    next.assign(L.out, 0.0);
    for (int o = 0; o < L.out; ++o) {
      const double* row = &params_[L.w + static_cast<std::size_t>(o) * L.in];
      double acc = params_[L.b + o];
      for (int i = 0; i < L.in; ++i) acc += row[i] * cur[i];
      next[o] = hidden ? activate(acc) : acc;
    }
    cur.swap(next);
  }
  return {cur[0], cur[1]};
}

namespace {

std::array<double, 2> softmax2(std::array<double, 2> z) {
  const double hi = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - hi);
  const double e1 = std::exp(z[1] - hi);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

double log_softmax2(std::array<double, 2> z, int k) {
  const double hi = std::max(z[0], z[1]);
  return z[k] - hi - std::log(std::exp(z[0] - hi) + std::exp(z[1] - hi));
}

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::array<double, 2> PolicyNet::forward(std::span<const double> observation) const {
  return softmax2(logits(observation));
}

void PolicyNet::validate(const TrainBatch& batch) const {
  if (batch.empty()) throw Error("train batch is empty");
  for (const auto& ex : batch) {
    if (static_cast<int>(ex.observation.size()) != input_width())
      throw DimensionError("train batch observation width " +
                           std::to_string(ex.observation.size()) + " != " +
                           std::to_string(input_width()));
    if (!std::isfinite(ex.advantage) || !all_finite(ex.observation))
      throw Error("train batch contains non-finite values");
  }
}

double PolicyNet::loss(const TrainBatch& batch) const {
  double total = 0.0;
  for (const auto& ex : batch)
    total -= ex.advantage * log_softmax2(logits(ex.observation), static_cast<int>(ex.action));
  return total;
}

std::vector<double> PolicyNet::gradient(const TrainBatch& batch, double* loss_out) const {
  validate(batch);
  std::vector<double> grad(params_.size(), 0.0);
  double total = 0.0;

  // acts[l] is the input of layer l; pres[l] its pre-activation output.
  std::vector<std::vector<double>> acts(layers_.size() + 1);
  std::vector<std::vector<double>> pres(layers_.size());
  std::vector<double> delta, prev_delta;

  for (const auto& ex : batch) {
    acts[0] = ex.observation;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& L = layers_[l];
      const bool hidden = l + 1 < layers_.size();
      pres[l].assign(L.out, 0.0);
      acts[l + 1].assign(L.out, 0.0);
      for (int o = 0; o < L.out; ++o) {
        const double* row = &params_[L.w + static_cast<std::size_t>(o) * L.in];
        double acc = params_[L.b + o];
        for (int i = 0; i < L.in; ++i) acc += row[i] * acts[l][i];
        pres[l][o] = acc;
        acts[l + 1][o] = hidden ? activate(acc) : acc;
      }
    }
    const std::array<double, 2> z{acts.back()[0], acts.back()[1]};
    const int a = static_cast<int>(ex.action);
    total -= ex.advantage * log_softmax2(z, a);
    if (ex.advantage == 0.0) continue;

    // d(-A log p_a)/dz = A (p - onehot(a))
    const auto p = softmax2(z);
    delta = {ex.advantage * (p[0] - (a == 0 ? 1.0 : 0.0)),
             ex.advantage * (p[1] - (a == 1 ? 1.0 : 0.0))};

    for (std::size_t l = layers_.size(); l-- > 0;) {
      const auto& L = layers_[l];
      const auto& in = acts[l];
      for (int o = 0; o < L.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        double* grow = &grad[L.w + static_cast<std::size_t>(o) * L.in];
        for (int i = 0; i < L.in; ++i) grow[i] += d * in[i];
        grad[L.b + o] += d;
      }
      if (l == 0) break;
      prev_delta.assign(L.in, 0.0);
      for (int o = 0; o < L.out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* row = &params_[L.w + static_cast<std::size_t>(o) * L.in];
        for (int i = 0; i < L.in; ++i) prev_delta[i] += row[i] * d;
      }
      for (int i = 0; i < L.in; ++i)
        prev_delta[i] *= activate_grad(pres[l - 1][i], acts[l][i]);
      delta.swap(prev_delta);
    }
  }
  if (loss_out) *loss_out = total;
  return grad;
}

double PolicyNet::train_batch(const TrainBatch& batch, double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error("learning rate must be positive");
  double pre_loss = 0.0;
  const auto grad = gradient(batch, &pre_loss);
  if (!all_finite(grad) || !std::isfinite(pre_loss))
    throw Error("non-finite gradient; update rejected");
  if (std::all_of(grad.begin(), grad.end(), [](double g) { return g == 0.0; })) return pre_loss;

  const std::uint64_t t = update_count_ + 1;
  const double c1 = 1.0 - std::pow(adam_.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(adam_.beta2, static_cast<double>(t));
  std::vector<double> p = params_, m = m_, v = v_;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = adam_.beta1 * m[i] + (1.0 - adam_.beta1) * grad[i];
    v[i] = adam_.beta2 * v[i] + (1.0 - adam_.beta2) * grad[i] * grad[i];
    p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + adam_.epsilon);
  }
  if (!all_finite(p)) throw Error("update produced non-finite parameters; rejected");
  params_.swap(p);
  m_.swap(m);
  v_.swap(v);
  update_count_ = t;
  return pre_loss;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kMagic = "stowrl-policy-net";

void put_doubles(std::ostringstream& os, const char* tag, const std::vector<double>& xs) {
  os << tag << ' ' << xs.size() << '\n';
  char buf[64];
  for (double x : xs) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    os.write(buf, end - buf);
    os << '\n';
  }
}

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string line(const char* what) {
    std::string s;
    if (!std::getline(in_, s))
      throw CheckpointTruncated(std::string("checkpoint truncated before ") + what);
    return s;
  }

  // "<tag> <rest>" -> rest
  std::string field(const char* tag) {
    const std::string s = line(tag);
    const std::string prefix = std::string(tag) + ' ';
    if (s.rfind(prefix, 0) != 0)
      throw CheckpointError(std::string("checkpoint: expected '") + tag + "', got '" + s + "'");
    return s.substr(prefix.size());
  }

  std::vector<double> doubles(const char* tag, std::size_t expected) {
    const std::string n_text = field(tag);
    const std::size_t n = std::stoull(n_text);
    if (n != expected)
      throw CheckpointWidthMismatch(std::string("checkpoint: ") + tag + " holds " + n_text +
                                    " values, layout needs " + std::to_string(expected));
    std::vector<double> out(n);
    for (auto& x : out) {
      const std::string s = line(tag);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw CheckpointError("checkpoint: bad number '" + s + "'");
    }
    return out;
  }

 private:
  std::istringstream in_;
};

}  // namespace

std::string PolicyNet::serialize() const {
  std::ostringstream os;
  os << kMagic << ' ' << kCheckpointVersion << '\n';
  os << "layers";
  for (int w : spec_.layer_sizes) os << ' ' << w;
  os << '\n';
  os << "activation " << to_string(spec_.hidden_activation) << '\n';
  os << "seed " << spec_.seed << '\n';
  os << "update_count " << update_count_ << '\n';
  put_doubles(os, "params", params_);
  put_doubles(os, "adam_m", m_);
  put_doubles(os, "adam_v", v_);
  os << "end\n";
  return os.str();
}

PolicyNet PolicyNet::deserialize(const std::string& text) {
  Reader r(text);
  {
    std::string header;
    try {
      header = r.line("header");
    } catch (const CheckpointTruncated&) {
      throw CheckpointVersionError("checkpoint: missing header");
    }
    std::istringstream hs(header);
    std::string magic;
    int version = -1;
    if (!(hs >> magic >> version) || magic != kMagic)
      throw CheckpointVersionError("checkpoint: unrecognized header '" + header + "'");
    if (version != kCheckpointVersion)
      throw CheckpointVersionError("checkpoint: unsupported version " + std::to_string(version));
  }
  try {
    NetSpec spec;
    spec.layer_sizes.clear();
    {
      std::istringstream ls(r.field("layers"));
      int w;
      while (ls >> w) spec.layer_sizes.push_back(w);
    }
    spec.hidden_activation = parse_activation(r.field("activation"));
    spec.seed = std::stoull(r.field("seed"));
    const std::uint64_t updates = std::stoull(r.field("update_count"));

    PolicyNet net(spec);
    net.params_ = r.doubles("params", net.params_.size());
    net.m_ = r.doubles("adam_m", net.m_.size());
    net.v_ = r.doubles("adam_v", net.v_.size());
    if (r.line("end marker") != "end") throw CheckpointError("checkpoint: missing end marker");
    net.update_count_ = updates;
    return net;
  } catch (const DimensionError& e) {
    throw CheckpointWidthMismatch(std::string("checkpoint: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw CheckpointError("checkpoint: malformed integer field");
  } catch (const std::out_of_range&) {
    throw CheckpointError("checkpoint: integer field out of range");
  }
}

void PolicyNet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << serialize();
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

PolicyNet PolicyNet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

PolicyNet PolicyNet::load(const std::filesystem::path& path, const std::vector<int>& expected) {
  PolicyNet net = load(path);
  if (net.spec_.layer_sizes != expected) {
    std::string got, want;
    for (int w : net.spec_.layer_sizes) got += ' ' + std::to_string(w);
    for (int w : expected) want += ' ' + std::to_string(w);
    throw CheckpointWidthMismatch("checkpoint widths [" + got + " ] do not match [" + want +
                                  " ]");
  }
  return net;
}

}  // namespace stowrl
