#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stowrl/core_model.hpp"
#include "stowrl/environment.hpp"

namespace stowrl {

enum class Activation { relu, tanh };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

struct NetSpec {
  std::vector<int> layer_sizes{144, 128, 64, 32, 2};
  Activation hidden_activation = Activation::relu;
  std::uint64_t seed = 0;

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One training example: observation, the action taken and its advantage.
struct TrainExample {
  std::vector<double> observation;
  Action action = Action::agree;
  double advantage = 0.0;
};

using TrainBatch = std::vector<TrainExample>;

class CheckpointError : public Error {
 public:
  using Error::Error;
};
class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointTruncated : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CheckpointWidthMismatch : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

inline constexpr int kCheckpointVersion = 1;

/// Fully connected policy: affine + activation per hidden layer, softmax over
/// {agree, disagree} at the output. Parameters live in one flat vector,
/// layer by layer, weights (row-major, out x in) before biases.
class PolicyNet {
 public:
  /// Scaled-uniform weights, zero biases. Throws DimensionError on a bad spec.
  explicit PolicyNet(NetSpec spec, AdamConfig adam = {});

  const NetSpec& spec() const noexcept { return spec_; }
  int input_width() const noexcept { return spec_.layer_sizes.front(); }
  std::uint64_t update_count() const noexcept { return update_count_; }

  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> mutable_parameters() noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  /// [p(agree), p(disagree)].
  std::array<double, 2> forward(std::span<const double> observation) const;
  std::array<double, 2> logits(std::span<const double> observation) const;

  /// -sum_i A_i log p(a_i | s_i).
  double loss(const TrainBatch& batch) const;
  /// Exact gradient of loss() with respect to parameters().
  std::vector<double> gradient(const TrainBatch& batch, double* loss_out = nullptr) const;

  /// One Adam step on the batch loss. Returns the pre-update loss. Rejects
  /// non-finite inputs with the net left unchanged. An all-zero gradient
  /// leaves the parameters and optimizer state untouched.
  double train_batch(const TrainBatch& batch, double lr);

  void save(const std::filesystem::path& path) const;
  std::string serialize() const;
  static PolicyNet load(const std::filesystem::path& path);
  /// Throws CheckpointWidthMismatch unless the stored widths equal `expected`.
  static PolicyNet load(const std::filesystem::path& path, const std::vector<int>& expected);
  static PolicyNet deserialize(const std::string& text);

 private:
  struct LayerView {
    int in;
    int out;
    std::size_t w;  // offset of weights
    std::size_t b;  // offset of biases
  };

  void build_layout();
  void validate(const TrainBatch& batch) const;
  double activate(double x) const noexcept;
  double activate_grad(double pre, double post) const noexcept;

  NetSpec spec_;
  AdamConfig adam_;
  std::vector<LayerView> layers_;
  std::vector<double> params_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t update_count_ = 0;
};

}  // namespace stowrl
