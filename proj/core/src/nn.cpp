#include "cellfree/nn.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "cellfree/errors.hpp"

namespace cellfree {

void MlpConfig::validate() const {
  if (sizes.size() < 2) throw ConfigError("mlp needs at least input and output sizes");
  for (int s : sizes) {
    if (s < 1) throw ConfigError("mlp layer sizes must be >= 1");
  }
  if (out_act == OutputActivation::kColumnSoftmax) {
    if (softmax_rows < 1 || softmax_cols < 1 || softmax_rows * softmax_cols != sizes.back()) {
      throw ConfigError("column softmax grouping does not match the output size");
    }
  }
}

Mlp Mlp::create(MlpConfig cfg, Rng& rng) {
  cfg.validate();
  Mlp net;
  net.cfg = std::move(cfg);
  const auto& sizes = net.cfg.sizes;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const bool last = (l + 2 == sizes.size());
    const double bound = (last && net.cfg.final_init_bound > 0.0)
                             ? net.cfg.final_init_bound
                             : 1.0 / std::sqrt(static_cast<double>(fan_in));
    Mat w(fan_out, fan_in);
    for (double& v : w.a) v = rng.uniform(-bound, bound);
    net.W.push_back(std::move(w));
    std::vector<double> bias(fan_out);
    for (double& v : bias) v = rng.uniform(-bound, bound);
    net.b.push_back(std::move(bias));
  }
  return net;
}

namespace {

void add_bias(Mat& Y, const std::vector<double>& bias) {
  for (int r = 0; r < Y.rows; ++r) {
    double* row = Y.row(r);
    for (int c = 0; c < Y.cols; ++c) row[c] += bias[c];
  }
}

void relu_inplace(Mat& Y) {
  for (double& v : Y.a) v = v > 0.0 ? v : 0.0;
}

void softmax_group(double* v, int n, int stride) {
  double peak = v[0];
  for (int i = 1; i < n; ++i) peak = std::max(peak, v[i * stride]);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = std::exp(v[i * stride] - peak);
    v[i * stride] = e;
    total += e;
  }
  for (int i = 0; i < n; ++i) v[i * stride] /= total;
}

void apply_out_activation(Mat& Y, const MlpConfig& cfg) {
  switch (cfg.out_act) {
    case OutputActivation::kLinear:
      return;
    case OutputActivation::kSigmoid:
      for (double& v : Y.a) v = 1.0 / (1.0 + std::exp(-v));
      return;
    case OutputActivation::kFlatSoftmax:
      for (int r = 0; r < Y.rows; ++r) softmax_group(Y.row(r), Y.cols, 1);
      return;
    case OutputActivation::kColumnSoftmax:
      for (int r = 0; r < Y.rows; ++r) {
        double* row = Y.row(r);
        for (int k = 0; k < cfg.softmax_cols; ++k) {
          softmax_group(row + k, cfg.softmax_rows, cfg.softmax_cols);
        }
      }
      return;
  }
}

// dZ = J_act^T dY for one softmax group: p .* (dY - <dY, p>).
void softmax_group_grad(const double* p, const double* dy, double* dz, int n, int stride) {
  double dot = 0.0;
  for (int i = 0; i < n; ++i) dot += dy[i * stride] * p[i * stride];
  for (int i = 0; i < n; ++i) dz[i * stride] = p[i * stride] * (dy[i * stride] - dot);
}

}  // namespace

Mat Mlp::forward(const Mat& X, Cache* cache) const {
  if (X.cols != input_size()) throw DimensionError("mlp forward: input width mismatch");
  if (cache != nullptr) {
    cache->x = X;
    cache->h.clear();
  }
  Mat cur = X;
  for (int l = 0; l < num_layers(); ++l) {
    Mat next;
    matmul_nt(cur, W[l], next);
    add_bias(next, b[l]);
    if (l + 1 < num_layers()) {
      relu_inplace(next);
    } else {
      apply_out_activation(next, cfg);
    }
    if (cache != nullptr) cache->h.push_back(next);
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> Mlp::forward1(const std::vector<double>& x) const {
  Mat X(1, static_cast<int>(x.size()));
  X.a = x;
  Mat Y = forward(X);
  return Y.a;
}

Mlp::Grads Mlp::backward(const Cache& cache, const Mat& dY) const {
  if (cache.h.size() != static_cast<size_t>(num_layers())) {
    throw ContractError("mlp backward: missing forward cache");
  }
  const Mat& y = cache.h.back();
  if (!dY.same_shape(y)) throw DimensionError("mlp backward: dY shape mismatch");

  Grads g;
  g.dW.resize(num_layers());
  g.db.resize(num_layers());

  // Output activation Jacobian.
  Mat dZ;
  switch (cfg.out_act) {
    case OutputActivation::kLinear:
      dZ = dY;
      break;
    case OutputActivation::kSigmoid:
      dZ = dY;
      for (size_t i = 0; i < dZ.size(); ++i) dZ.a[i] *= y.a[i] * (1.0 - y.a[i]);
      break;
    case OutputActivation::kFlatSoftmax:
      dZ = Mat(dY.rows, dY.cols);
      for (int r = 0; r < dY.rows; ++r) {
        softmax_group_grad(y.row(r), dY.row(r), dZ.row(r), dY.cols, 1);
      }
      break;
    case OutputActivation::kColumnSoftmax:
      dZ = Mat(dY.rows, dY.cols);
      for (int r = 0; r < dY.rows; ++r) {
        for (int k = 0; k < cfg.softmax_cols; ++k) {
          softmax_group_grad(y.row(r) + k, dY.row(r) + k, dZ.row(r) + k, cfg.softmax_rows,
                             cfg.softmax_cols);
        }
      }
      break;
  }

  for (int l = num_layers() - 1; l >= 0; --l) {
    const Mat& input = (l == 0) ? cache.x : cache.h[l - 1];
    matmul_tn(dZ, input, g.dW[l]);
    g.db[l].assign(W[l].rows, 0.0);
    for (int r = 0; r < dZ.rows; ++r) {
      const double* row = dZ.row(r);
      for (int c = 0; c < dZ.cols; ++c) g.db[l][c] += row[c];
    }
    Mat dH;
    matmul_nn(dZ, W[l], dH);
    if (l > 0) {
      // Rectifier gradient: the cached post-activation is positive exactly
      // where the pre-activation was.
      const Mat& hprev = cache.h[l - 1];
      for (size_t i = 0; i < dH.size(); ++i) {
        if (hprev.a[i] <= 0.0) dH.a[i] = 0.0;
      }
    }
    dZ = std::move(dH);
  }
  g.dX = std::move(dZ);
  return g;
}

std::vector<double> Mlp::flatten_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (int l = 0; l < num_layers(); ++l) {
    flat.insert(flat.end(), W[l].a.begin(), W[l].a.end());
    flat.insert(flat.end(), b[l].begin(), b[l].end());
  }
  return flat;
}

void Mlp::assign_params(const std::vector<double>& flat) {
  if (flat.size() != param_count()) throw DimensionError("assign_params: size mismatch");
  size_t at = 0;
  for (int l = 0; l < num_layers(); ++l) {
    std::copy_n(flat.begin() + at, W[l].size(), W[l].a.begin());
    at += W[l].size();
    std::copy_n(flat.begin() + at, b[l].size(), b[l].begin());
    at += b[l].size();
  }
}

size_t Mlp::param_count() const {
  size_t n = 0;
  for (int l = 0; l < num_layers(); ++l) n += W[l].size() + b[l].size();
  return n;
}

std::vector<double> action_activation(const std::vector<double>& z, OutputActivation act,
                                      int rows, int cols) {
  Mat Y(1, static_cast<int>(z.size()));
  Y.a = z;
  MlpConfig cfg;
  cfg.sizes = {1, static_cast<int>(z.size())};
  cfg.out_act = act;
  cfg.softmax_rows = rows;
  cfg.softmax_cols = cols;
  apply_out_activation(Y, cfg);
  return Y.a;
}

AdamState AdamState::create(const Mlp& net, double lr) {
  AdamState s;
  s.lr = lr;
  for (int l = 0; l < net.num_layers(); ++l) {
    s.mW.emplace_back(net.W[l].rows, net.W[l].cols);
    s.vW.emplace_back(net.W[l].rows, net.W[l].cols);
    s.mb.emplace_back(net.b[l].size(), 0.0);
    s.vb.emplace_back(net.b[l].size(), 0.0);
  }
  return s;
}

namespace {

void adam_apply(double* p, const double* g, double* m, double* v, size_t n, double sign,
                const AdamState& s, double bc1, double bc2) {
  for (size_t i = 0; i < n; ++i) {
    const double grad = sign * g[i];
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * grad;
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * grad * grad;
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
  }
}

}  // namespace

void adam_step(Mlp& net, const Mlp::Grads& grads, AdamState& state, bool maximize) {
  ++state.step;
  const double sign = maximize ? -1.0 : 1.0;
  if (state.plain_sgd) {
    for (int l = 0; l < net.num_layers(); ++l) {
      for (size_t i = 0; i < net.W[l].size(); ++i) {
        net.W[l].a[i] -= state.lr * sign * grads.dW[l].a[i];
      }
      for (size_t i = 0; i < net.b[l].size(); ++i) {
        net.b[l][i] -= state.lr * sign * grads.db[l][i];
      }
    }
    return;
  }
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  for (int l = 0; l < net.num_layers(); ++l) {
    adam_apply(net.W[l].a.data(), grads.dW[l].a.data(), state.mW[l].a.data(),
               state.vW[l].a.data(), net.W[l].size(), sign, state, bc1, bc2);
    adam_apply(net.b[l].data(), grads.db[l].data(), state.mb[l].data(), state.vb[l].data(),
               net.b[l].size(), sign, state, bc1, bc2);
  }
}

void polyak_update(Mlp& target, const Mlp& source, double tau) {
  if (tau < 0.0 || tau > 1.0) throw ConfigError("polyak tau must be in [0, 1]");
  for (int l = 0; l < target.num_layers(); ++l) {
    for (size_t i = 0; i < target.W[l].size(); ++i) {
      target.W[l].a[i] = tau * source.W[l].a[i] + (1.0 - tau) * target.W[l].a[i];
    }
    for (size_t i = 0; i < target.b[l].size(); ++i) {
      target.b[l][i] = tau * source.b[l][i] + (1.0 - tau) * target.b[l][i];
    }
  }
}

namespace {
constexpr std::uint32_t kCheckpointMagic = 0x43464e4e;  // "CFNN"
}

void save_checkpoint(const Mlp& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  auto put_u32 = [&out](std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  put_u32(kCheckpointMagic);
  put_u32(static_cast<std::uint32_t>(net.cfg.sizes.size()));
  for (int s : net.cfg.sizes) put_u32(static_cast<std::uint32_t>(s));
  put_u32(static_cast<std::uint32_t>(net.cfg.out_act));
  put_u32(static_cast<std::uint32_t>(net.cfg.softmax_rows));
  put_u32(static_cast<std::uint32_t>(net.cfg.softmax_cols));
  const std::vector<double> flat = net.flatten_params();
  put_u32(static_cast<std::uint32_t>(flat.size()));
  out.write(reinterpret_cast<const char*>(flat.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
}

Mlp load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint: " + path);
  auto get_u32 = [&in, &path]() {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw ConfigError("truncated checkpoint: " + path);
    return v;
  };
  if (get_u32() != kCheckpointMagic) throw ConfigError("bad checkpoint magic: " + path);
  MlpConfig cfg;
  const std::uint32_t n_sizes = get_u32();
  cfg.sizes.resize(n_sizes);
  for (auto& s : cfg.sizes) s = static_cast<int>(get_u32());
  cfg.out_act = static_cast<OutputActivation>(get_u32());
  cfg.softmax_rows = static_cast<int>(get_u32());
  cfg.softmax_cols = static_cast<int>(get_u32());

  Mlp net;
  net.cfg = cfg;
  for (size_t l = 0; l + 1 < cfg.sizes.size(); ++l) {
    net.W.emplace_back(cfg.sizes[l + 1], cfg.sizes[l]);
    net.b.emplace_back(cfg.sizes[l + 1], 0.0);
  }
  std::vector<double> flat(get_u32());
  in.read(reinterpret_cast<char*>(flat.data()),
          static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated checkpoint: " + path);
  net.assign_params(flat);
  return net;
}

}  // namespace cellfree
