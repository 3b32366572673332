#include "l2g/nn.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "l2g/error.hpp"

namespace l2g::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ConstRowVectorMap = Eigen::Map<const Eigen::RowVectorXd>;
using RowVectorMap = Eigen::Map<Eigen::RowVectorXd>;

ConstMatrixMap as_matrix(const Tensor& t) {
  return ConstMatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                        static_cast<Eigen::Index>(t.cols()));
}

MatrixMap as_matrix(Tensor& t) {
  return MatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                   static_cast<Eigen::Index>(t.cols()));
}

[[noreturn]] void shape_error(const std::string& what, const Tensor& a, const Tensor& b) {
  throw Error(ErrorCode::kShapeMismatch,
              what + ": " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

double clamp_logvar(double lv) { return std::clamp(lv, kLogvarMin, kLogvarMax); }

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != product(shape_)) {
    throw Error(ErrorCode::kShapeMismatch, "data length " + std::to_string(data_.size()) +
                                               " for shape " + shape_string(shape_));
  }
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t ParamStore::add(std::string name, Tensor value) {
  if (index_.contains(name)) throw Error(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  Tensor grad(value.shape());
  index_.emplace(name, params_.size());
  params_.push_back({std::move(name), std::move(value), std::move(grad)});
  return params_.size() - 1;
}

Param& ParamStore::get(const std::string& name) {
  const auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::kInvalidArgument, "no parameter " + name);
  return params_[it->second];
}

const Param& ParamStore::get(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::kInvalidArgument, "no parameter " + name);
  return params_[it->second];
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

bool operator==(const ParamStore& a, const ParamStore& b) {
  if (a.params_.size() != b.params_.size()) return false;
  for (std::size_t i = 0; i < a.params_.size(); ++i) {
    if (a.params_[i].name != b.params_[i].name || !(a.params_[i].value == b.params_[i].value)) {
      return false;
    }
  }
  return true;
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::matrix(fan_in, fan_out);
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
  return t;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.cols() != w.rows()) shape_error("linear input/weights", x, w);
  if (b.size() != w.cols()) shape_error("linear weights/bias", w, b);
  Tensor y = Tensor::matrix(x.rows(), w.cols());
  auto ym = as_matrix(y);
  ym.noalias() = as_matrix(x) * as_matrix(w);
  ym.rowwise() += ConstRowVectorMap(b.data(), static_cast<Eigen::Index>(b.size()));
  return y;
}

void linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dw, Tensor& db,
                     Tensor* dx) {
  if (dy.rows() != x.rows() || dy.cols() != w.cols()) shape_error("linear backward", x, dy);
  if (!dw.same_shape(w)) shape_error("linear weight grad", dw, w);
  const auto dym = as_matrix(dy);
  as_matrix(dw).noalias() += as_matrix(x).transpose() * dym;
  RowVectorMap(db.data(), static_cast<Eigen::Index>(db.size())) += dym.colwise().sum();
  if (dx != nullptr) {
    *dx = Tensor::matrix(x.rows(), x.cols());
    as_matrix(*dx).noalias() = dym * as_matrix(w).transpose();
  }
}

Tensor concat_cols(std::initializer_list<const Tensor*> parts) {
  const std::size_t rows = (*parts.begin())->rows();
  std::size_t cols = 0;
  for (const auto* p : parts) {
    if (p->rows() != rows) shape_error("concat rows", **parts.begin(), *p);
    cols += p->cols();
  }
  Tensor out = Tensor::matrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out.data() + r * cols;
    for (const auto* p : parts) {
      dst = std::copy_n(p->data() + r * p->cols(), p->cols(), dst);
    }
  }
  return out;
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t width) {
  if (begin + width > x.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "column slice past " + shape_string(x.shape()));
  }
  Tensor out = Tensor::matrix(x.rows(), width);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::copy_n(x.data() + r * x.cols() + begin, width, out.data() + r * width);
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& y, const Tensor& dy) {
  if (!y.same_shape(dy)) shape_error("relu backward", y, dy);
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (y[i] <= 0.0) dx[i] = 0.0;
  }
  return dx;
}

Tensor tanh(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.values()) v = std::tanh(v);
  return y;
}

Tensor tanh_backward(const Tensor& y, const Tensor& dy) {
  if (!y.same_shape(dy)) shape_error("tanh backward", y, dy);
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= 1.0 - y[i] * y[i];
  return dx;
}

Tensor sigmoid(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.values()) {
    const double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    v = std::clamp(s, kSigmoidFloor, 1.0 - kSigmoidFloor);
  }
  return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& dy) {
  if (!y.same_shape(dy)) shape_error("sigmoid backward", y, dy);
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const bool clamped = y[i] <= kSigmoidFloor || y[i] >= 1.0 - kSigmoidFloor;
    dx[i] = clamped ? 0.0 : dx[i] * y[i] * (1.0 - y[i]);
  }
  return dx;
}

Tensor rnn_forward(const std::vector<std::span<const int>>& batch, const RnnWeights& w,
                   RnnCache* cache) {
  const std::size_t rows = batch.size();
  const std::size_t vocab = w.embedding.rows();
  const std::size_t embed = w.embedding.cols();
  const std::size_t hidden = w.wh.cols();
  if (w.wx.rows() != embed || w.wx.cols() != hidden) shape_error("rnn wx", w.wx, w.embedding);
  if (w.wh.rows() != hidden) shape_error("rnn wh", w.wh, w.wx);
  if (w.b.size() != hidden) shape_error("rnn bias", w.b, w.wh);

  std::size_t steps = 0;
  for (const auto& seq : batch) {
    if (seq.empty()) throw Error(ErrorCode::kEmptySequence, "recurrent encoder needs >= 1 token");
    for (int t : seq) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocab) {
        throw Error(ErrorCode::kInvalidArgument, "token index " + std::to_string(t) +
                                                     " outside vocabulary of " +
                                                     std::to_string(vocab));
      }
    }
    steps = std::max(steps, seq.size());
  }

  if (cache != nullptr) {
    cache->tokens.clear();
    for (const auto& seq : batch) cache->tokens.emplace_back(seq.begin(), seq.end());
    cache->inputs.clear();
    cache->states.clear();
  }

  Tensor h = Tensor::matrix(rows, hidden);
  if (cache != nullptr) cache->states.push_back(h);
  const auto bias = ConstRowVectorMap(w.b.data(), static_cast<Eigen::Index>(hidden));
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor x = Tensor::matrix(rows, embed);
    for (std::size_t r = 0; r < rows; ++r) {
      if (t < batch[r].size()) {
        std::copy_n(w.embedding.data() + static_cast<std::size_t>(batch[r][t]) * embed, embed,
                    x.data() + r * embed);
      }
    }
    Tensor pre = Tensor::matrix(rows, hidden);
    auto pm = as_matrix(pre);
    pm.noalias() = as_matrix(x) * as_matrix(w.wx);
    pm.noalias() += as_matrix(h) * as_matrix(w.wh);
    pm.rowwise() += bias;
    Tensor next = h;
    for (std::size_t r = 0; r < rows; ++r) {
      if (t >= batch[r].size()) continue;
      for (std::size_t k = 0; k < hidden; ++k) next.at(r, k) = std::tanh(pre.at(r, k));
    }
    h = std::move(next);
    if (cache != nullptr) {
      cache->inputs.push_back(std::move(x));
      cache->states.push_back(h);
    }
  }
  return h;
}

void rnn_backward(const RnnCache& cache, const RnnWeights& w, const Tensor& d_out, RnnGrads g) {
  const std::size_t rows = cache.tokens.size();
  const std::size_t embed = w.embedding.cols();
  const std::size_t hidden = w.wh.cols();
  if (d_out.rows() != rows || d_out.cols() != hidden) shape_error("rnn backward", d_out, w.wh);

  Tensor dh = d_out;
  for (std::size_t t = cache.inputs.size(); t-- > 0;) {
    const Tensor& h_next = cache.states[t + 1];
    const Tensor& h_prev = cache.states[t];
    Tensor dpre = Tensor::matrix(rows, hidden);
    for (std::size_t r = 0; r < rows; ++r) {
      if (t >= cache.tokens[r].size()) continue;
      for (std::size_t k = 0; k < hidden; ++k) {
        const double y = h_next.at(r, k);
        dpre.at(r, k) = dh.at(r, k) * (1.0 - y * y);
      }
    }
    const auto dpm = as_matrix(dpre);
    as_matrix(g.wx).noalias() += as_matrix(cache.inputs[t]).transpose() * dpm;
    as_matrix(g.wh).noalias() += as_matrix(h_prev).transpose() * dpm;
    RowVectorMap(g.b.data(), static_cast<Eigen::Index>(hidden)) += dpm.colwise().sum();

    RowMatrix dx = dpm * as_matrix(w.wx).transpose();
    RowMatrix dh_prev = dpm * as_matrix(w.wh).transpose();
    for (std::size_t r = 0; r < rows; ++r) {
      if (t >= cache.tokens[r].size()) {
        // Finished rows carried their state through this step unchanged.
        for (std::size_t k = 0; k < hidden; ++k) dh_prev(r, k) = dh.at(r, k);
        continue;
      }
      double* row = g.embedding.data() + static_cast<std::size_t>(cache.tokens[r][t]) * embed;
      for (std::size_t k = 0; k < embed; ++k) row[k] += dx(r, k);
    }
    std::copy_n(dh_prev.data(), rows * hidden, dh.data());
  }
}

Tensor rnn_encode(std::span<const int> tokens, const RnnWeights& w) {
  const Tensor h = rnn_forward({tokens}, w, nullptr);
  return Tensor({h.cols()}, std::vector<double>(h.values().begin(), h.values().end()));
}

double bce_loss(const Tensor& probs, const Tensor& targets, Tensor* dprobs) {
  if (!probs.same_shape(targets)) shape_error("bce", probs, targets);
  const double n = static_cast<double>(probs.size());
  double total = 0.0;
  if (dprobs != nullptr) *dprobs = Tensor(probs.shape());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kSigmoidFloor, 1.0 - kSigmoidFloor);
    const double t = targets[i];
    total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    if (dprobs != nullptr) (*dprobs)[i] = -(t / p - (1.0 - t) / (1.0 - p)) / n;
  }
  return total / n;
}

double kl_loss(const Tensor& mu, const Tensor& logvar, Tensor* dmu, Tensor* dlogvar) {
  if (!mu.same_shape(logvar)) shape_error("kl", mu, logvar);
  const double rows = static_cast<double>(mu.rows());
  if (dmu != nullptr) *dmu = Tensor(mu.shape());
  if (dlogvar != nullptr) *dlogvar = Tensor(logvar.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double lv = clamp_logvar(logvar[i]);
    const double e = std::exp(lv);
    total += -0.5 * (1.0 + lv - mu[i] * mu[i] - e);
    if (dmu != nullptr) (*dmu)[i] = mu[i] / rows;
    if (dlogvar != nullptr) {
      const bool inside = logvar[i] > kLogvarMin && logvar[i] < kLogvarMax;
      (*dlogvar)[i] = inside ? -0.5 * (1.0 - e) / rows : 0.0;
    }
  }
  return total / rows;
}

void Adam::init(const ParamStore& params) {
  m_.clear();
  v_.clear();
  for (const auto& p : params) {
    m_.emplace_back(p.value.shape());
    v_.emplace_back(p.value.shape());
  }
  steps_ = 0;
}

void Adam::step(ParamStore& params) {
  if (m_.size() != params.size()) {
    throw Error(ErrorCode::kUninitializedState,
                "Adam state covers " + std::to_string(m_.size()) + " of " +
                    std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!m_[i].same_shape(params[i].value)) {
      throw Error(ErrorCode::kUninitializedState, "Adam state shape differs for " + params[i].name);
    }
  }
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].value;
    const auto& grad = params[i].grad;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      m[k] = b1 * m[k] + (1.0 - b1) * g;
      v[k] = b2 * v[k] + (1.0 - b2) * g * g;
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      value[k] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradientCheckReport gradient_check(const std::function<double(ParamStore&)>& loss,
                                   const std::function<void(ParamStore&)>& gradients,
                                   ParamStore& params, double tolerance, double floor) {
  params.zero_grad();
  gradients(params);
  std::vector<Tensor> analytic;
  for (const auto& p : params) analytic.push_back(p.grad);

  GradientCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    double worst = 0.0;
    for (std::size_t k = 0; k < params[i].value.size(); ++k) {
      double& x = params[i].value[k];
      const double saved = x;
      x = saved + kFiniteDifferenceStep;
      const double up = loss(params);
      x = saved - kFiniteDifferenceStep;
      const double down = loss(params);
      x = saved;
      const double numeric = (up - down) / (2.0 * kFiniteDifferenceStep);
      const double err = relative_error(analytic[i][k], numeric, floor);
      ++report.checked;
      if (err > tolerance && report.offenders.size() < kMaxReportedOffenders) report.offenders.emplace_back(i, k);
      worst = std::max(worst, err);
      if (report.worst_param.empty() || err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = params[i].name;
        report.worst_index = k;
      }
    }
    report.per_param.emplace_back(params[i].name, worst);
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace l2g::nn
