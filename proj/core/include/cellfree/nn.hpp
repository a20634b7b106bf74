#pragma once

#include <string>
#include <vector>

#include "cellfree/mat.hpp"
#include "cellfree/rng.hpp"

namespace cellfree {

enum class OutputActivation {
  kLinear,
  kSigmoid,
  kColumnSoftmax,  // softmax over each UE's column of the flattened action
  kFlatSoftmax,    // softmax over the whole output vector
};

struct MlpConfig {
  std::vector<int> sizes;  // [in, hidden..., out]
  OutputActivation out_act = OutputActivation::kLinear;
  // Grouping for kColumnSoftmax: the output is a row-major rows x cols
  // matrix and each column forms one softmax group.
  int softmax_rows = 0;
  int softmax_cols = 0;
  // Output layer init bound; 0 keeps the fan-in rule. Small values pin the
  // initial outputs near the output bias.
  double final_init_bound = 0.0;

  void validate() const;
};

/// Fully connected net with rectifier hidden layers and manual
/// reverse-mode gradients. All math is 64-bit; batches are row-major
/// (one sample per row).
struct Mlp {
  MlpConfig cfg;
  std::vector<Mat> W;               // layer l: sizes[l+1] x sizes[l]
  std::vector<std::vector<double>> b;

  static Mlp create(MlpConfig cfg, Rng& rng);  // U(+-1/sqrt(fan_in)) init

  int input_size() const { return cfg.sizes.front(); }
  int output_size() const { return cfg.sizes.back(); }
  int num_layers() const { return static_cast<int>(W.size()); }

  struct Cache {
    Mat x;
    std::vector<Mat> h;  // post-activation per layer; h.back() is the output
  };

  /// Batched forward pass; fills cache when given one.
  Mat forward(const Mat& X, Cache* cache = nullptr) const;
  std::vector<double> forward1(const std::vector<double>& x) const;

  struct Grads {
    std::vector<Mat> dW;
    std::vector<std::vector<double>> db;
    Mat dX;
  };

  /// Exact gradients for upstream dL/dY (taken w.r.t. the post-activation
  /// output). Requires the cache of the matching forward call.
  Grads backward(const Cache& cache, const Mat& dY) const;

  std::vector<double> flatten_params() const;
  void assign_params(const std::vector<double>& flat);
  size_t param_count() const;
};

/// The output-layer activation as a standalone map (the C2 box constraint
/// is enforced here: softmax and sigmoid outputs always land in [0, 1]).
std::vector<double> action_activation(const std::vector<double>& z, OutputActivation act,
                                      int rows, int cols);

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool plain_sgd = false;  // skip the adaptive scaling, take lr * grad steps
  long step = 0;
  std::vector<Mat> mW, vW;
  std::vector<std::vector<double>> mb, vb;

  static AdamState create(const Mlp& net, double lr);
};

/// Bias-corrected Adam update in place; set maximize for gradient ascent.
void adam_step(Mlp& net, const Mlp::Grads& grads, AdamState& state, bool maximize = false);

/// target <- tau * source + (1 - tau) * target, element-wise.
void polyak_update(Mlp& target, const Mlp& source, double tau);

/// Binary checkpoint with a layer-size header; round-trips bit-exactly.
void save_checkpoint(const Mlp& net, const std::string& path);
Mlp load_checkpoint(const std::string& path);

}  // namespace cellfree
