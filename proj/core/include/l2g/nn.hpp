#pragma once

// Minimal dense neural-network substrate: just the layers the goal generator
// needs, each with a hand-written backward pass. 64-bit floats throughout.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "l2g/rng.hpp"

namespace l2g::nn {

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  // Throws kShapeMismatch when data.size() != product(shape).
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }
  static Tensor vector(std::size_t n, double fill = 0.0) { return Tensor({n}, fill); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  // Rank-1 tensors are treated as a single row.
  std::size_t rows() const { return shape_.size() == 1 ? 1 : shape_[0]; }
  std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  void fill(double v);
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

class ParamStore {
 public:
  // Throws kInvalidArgument on duplicate names.
  std::size_t add(std::string name, Tensor value);

  Param& operator[](std::size_t i) { return params_[i]; }
  const Param& operator[](std::size_t i) const { return params_[i]; }
  // Throws kInvalidArgument for unknown names.
  Param& get(const std::string& name);
  const Param& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.contains(name); }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();

  friend bool operator==(const ParamStore& a, const ParamStore& b);

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// U(-sqrt(6 / (fan_in + fan_out)), +sqrt(6 / (fan_in + fan_out))).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// ---- dense algebra -------------------------------------------------------

// y = x * w + b, x: [B, in], w: [in, out], b: [out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
// Accumulates dw += x^T dy, db += colsum(dy); writes dx = dy w^T when non-null.
void linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dw, Tensor& db,
                     Tensor* dx);

// Column-wise concatenation of matrices with equal row counts.
Tensor concat_cols(std::initializer_list<const Tensor*> parts);
// Inverse of concat_cols for gradients: slice columns [begin, begin + width).
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t width);

// ---- activations ---------------------------------------------------------

inline constexpr double kSigmoidFloor = 1e-7;

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& y, const Tensor& dy);  // y = relu(x)
Tensor tanh(const Tensor& x);
Tensor tanh_backward(const Tensor& y, const Tensor& dy);  // y = tanh(x)
// Output clamped to [kSigmoidFloor, 1 - kSigmoidFloor]; clamped entries pass no gradient.
Tensor sigmoid(const Tensor& x);
Tensor sigmoid_backward(const Tensor& y, const Tensor& dy);

// ---- recurrent sentence encoder ------------------------------------------

// h_t = tanh(e_t Wx + h_{t-1} Wh + b), h_0 = 0; output is the final h.
struct RnnWeights {
  const Tensor& embedding;  // [V, E]
  const Tensor& wx;         // [E, H]
  const Tensor& wh;         // [H, H]
  const Tensor& b;          // [H]
};

struct RnnGrads {
  Tensor& embedding;
  Tensor& wx;
  Tensor& wh;
  Tensor& b;
};

struct RnnCache {
  std::vector<std::vector<int>> tokens;
  std::vector<Tensor> inputs;  // inputs[t]: [B, E], zero rows past a sequence's end
  std::vector<Tensor> states;  // states[t]: [B, H] after t steps, states[0] = 0
};

// Batched over sequences of differing lengths; a finished row keeps its last state.
// Throws kEmptySequence or kInvalidArgument for out-of-vocabulary indices.
Tensor rnn_forward(const std::vector<std::span<const int>>& batch, const RnnWeights& w,
                   RnnCache* cache);
void rnn_backward(const RnnCache& cache, const RnnWeights& w, const Tensor& d_out, RnnGrads g);

// Single-sentence convenience; returns an [H] vector.
Tensor rnn_encode(std::span<const int> tokens, const RnnWeights& w);

// ---- losses ----------------------------------------------------------------

inline constexpr double kLogvarMin = -10.0;
inline constexpr double kLogvarMax = 10.0;

// -mean(t log p + (1 - t) log(1 - p)) over every element. p is clamped to
// [kSigmoidFloor, 1 - kSigmoidFloor] first. Writes dL/dp when non-null.
double bce_loss(const Tensor& probs, const Tensor& targets, Tensor* dprobs);

// -1/2 sum_dims (1 + lv - mu^2 - exp(lv)), averaged over rows, with lv clamped
// to [kLogvarMin, kLogvarMax].
double kl_loss(const Tensor& mu, const Tensor& logvar, Tensor* dmu, Tensor* dlogvar);

// ---- optimizer -------------------------------------------------------------

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Zero moments for every parameter in `params`.
  void init(const ParamStore& params);
  // Throws kUninitializedState unless init() saw exactly these parameter shapes.
  void step(ParamStore& params);

  long steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  long steps_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

// ---- verification ----------------------------------------------------------

struct GradientCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool passed = false;
  std::vector<std::pair<std::string, double>> per_param;  // max rel. error per tensor
  // (tensor, scalar) positions over tolerance, capped at kMaxReportedOffenders.
  std::vector<std::pair<std::size_t, std::size_t>> offenders;
};

inline constexpr std::size_t kMaxReportedOffenders = 64;

inline constexpr double kFiniteDifferenceStep = 1e-5;

// Relative error |a - n| / max(|a|, |n|, floor); floor keeps vanishing gradients
// from dominating.
double relative_error(double analytic, double numeric, double floor = 1e-7);

// `loss` evaluates the objective at the current parameter values. `gradients`
// fills every Param::grad (it may assume grads start at zero). Every scalar of
// every parameter is perturbed by +-kFiniteDifferenceStep.
GradientCheckReport gradient_check(const std::function<double(ParamStore&)>& loss,
                                   const std::function<void(ParamStore&)>& gradients,
                                   ParamStore& params, double tolerance, double floor = 1e-7);

}  // namespace l2g::nn
