#include "l2g/goalgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "l2g/error.hpp"

namespace l2g {

namespace {

using nn::Tensor;

enum ParamIndex : std::size_t {
  kEmbedding,
  kRnnWx,
  kRnnWh,
  kRnnB,
  kEncW1,
  kEncB1,
  kEncW2,
  kEncB2,
  kEncMuW,
  kEncMuB,
  kEncLogvarW,
  kEncLogvarB,
  kDecW1,
  kDecB1,
  kDecW2,
  kDecB2,
  kDecOutW,
  kDecOutB,
  kParamCount,
};

const Tensor& value(const CVAEModel& m, ParamIndex i) { return m.params()[i].value; }
Tensor& grad(CVAEModel& m, ParamIndex i) { return m.params()[i].grad; }

nn::RnnWeights rnn_weights(const CVAEModel& m) {
  return {value(m, kEmbedding), value(m, kRnnWx), value(m, kRnnWh), value(m, kRnnB)};
}

Tensor config_rows(std::span<const SemanticConfig> configs) {
  Tensor t = Tensor::matrix(configs.size(), kNumSlots);
  for (std::size_t r = 0; r < configs.size(); ++r) {
    for (int k = 0; k < kNumSlots; ++k) t.at(r, static_cast<std::size_t>(k)) = configs[r][k];
  }
  return t;
}

Tensor repeat_row(const Tensor& row, std::size_t n) {
  Tensor out = Tensor::matrix(n, row.cols());
  for (std::size_t r = 0; r < n; ++r) std::copy_n(row.data(), row.cols(), out.data() + r * row.cols());
  return out;
}

Tensor row_tensor(std::span<const double> v) {
  return Tensor({1, v.size()}, std::vector<double>(v.begin(), v.end()));
}

struct EncoderOut {
  Tensor h1, h2, mu, logvar;
};

EncoderOut encoder_forward(const CVAEModel& m, const Tensor& input) {
  EncoderOut o;
  o.h1 = nn::relu(nn::linear(input, value(m, kEncW1), value(m, kEncB1)));
  o.h2 = nn::relu(nn::linear(o.h1, value(m, kEncW2), value(m, kEncB2)));
  o.mu = nn::linear(o.h2, value(m, kEncMuW), value(m, kEncMuB));
  o.logvar = nn::linear(o.h2, value(m, kEncLogvarW), value(m, kEncLogvarB));
  return o;
}

struct DecoderOut {
  Tensor g1, g2, probs;
};

DecoderOut decoder_forward(const CVAEModel& m, const Tensor& input) {
  DecoderOut o;
  o.g1 = nn::relu(nn::linear(input, value(m, kDecW1), value(m, kDecB1)));
  o.g2 = nn::relu(nn::linear(o.g1, value(m, kDecW2), value(m, kDecB2)));
  o.probs = nn::sigmoid(nn::linear(o.g2, value(m, kDecOutW), value(m, kDecOutB)));
  return o;
}

std::vector<int> tokens_for(const CVAEModel& m, std::string_view sentence) {
  return tokenize(sentence, m.vocabulary());
}

Tensor sentence_embedding(const CVAEModel& m, std::span<const int> tokens) {
  return nn::rnn_forward({tokens}, rnn_weights(m), nullptr);
}

double clamped(double lv) { return std::clamp(lv, nn::kLogvarMin, nn::kLogvarMax); }

}  // namespace

void Hyperparams::validate() const {
  if (hidden == 0 || latent == 0 || embed == 0 || batch == 0 || epochs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "hyperparameter sizes must be positive");
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must lie in (0, 1]");
  }
  if (!(lr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lr must be positive");
}

const std::vector<std::string>& cvae_param_names() {
  static const std::vector<std::string> kNames{
      "embedding", "rnn.wx",      "rnn.wh",      "rnn.b",       "enc.l1.w",   "enc.l1.b",
      "enc.l2.w",  "enc.l2.b",    "enc.mu.w",    "enc.mu.b",    "enc.logvar.w", "enc.logvar.b",
      "dec.l1.w",  "dec.l1.b",    "dec.l2.w",    "dec.l2.b",    "dec.out.w",  "dec.out.b",
  };
  return kNames;
}

CVAEModel::CVAEModel(const Hyperparams& hp) : CVAEModel(hp, false) {}

CVAEModel CVAEModel::zeros(const Hyperparams& hp) { return CVAEModel(hp, true); }

CVAEModel::CVAEModel(const Hyperparams& hp, bool zero_init) : hp_(hp) {
  hp_.validate();
  Rng rng(hp_.seed);
  const std::size_t vocab = instruction_set().vocabulary().size();
  const std::size_t enc_in = encoder_input_width();
  const std::size_t dec_in = decoder_input_width();
  const std::vector<std::pair<std::size_t, std::size_t>> weight_shapes{
      {vocab, hp_.embed},      {hp_.embed, hp_.embed},   {hp_.embed, hp_.embed},
      {enc_in, hp_.hidden},    {hp_.hidden, hp_.hidden}, {hp_.hidden, hp_.latent},
      {hp_.hidden, hp_.latent}, {dec_in, hp_.hidden},    {hp_.hidden, hp_.hidden},
      {hp_.hidden, kNumSlots},
  };
  auto weight = [&](std::size_t k) {
    const auto [in, out] = weight_shapes[k];
    return zero_init ? Tensor::matrix(in, out) : nn::glorot_uniform(in, out, rng);
  };
  const auto& names = cvae_param_names();
  params_.add(names[kEmbedding], weight(0));
  params_.add(names[kRnnWx], weight(1));
  params_.add(names[kRnnWh], weight(2));
  params_.add(names[kRnnB], Tensor::vector(hp_.embed));
  params_.add(names[kEncW1], weight(3));
  params_.add(names[kEncB1], Tensor::vector(hp_.hidden));
  params_.add(names[kEncW2], weight(4));
  params_.add(names[kEncB2], Tensor::vector(hp_.hidden));
  params_.add(names[kEncMuW], weight(5));
  params_.add(names[kEncMuB], Tensor::vector(hp_.latent));
  params_.add(names[kEncLogvarW], weight(6));
  params_.add(names[kEncLogvarB], Tensor::vector(hp_.latent));
  params_.add(names[kDecW1], weight(7));
  params_.add(names[kDecB1], Tensor::vector(hp_.hidden));
  params_.add(names[kDecW2], weight(8));
  params_.add(names[kDecB2], Tensor::vector(hp_.hidden));
  params_.add(names[kDecOutW], weight(9));
  params_.add(names[kDecOutB], Tensor::vector(kNumSlots));
}

LatentStats encode(const CVAEModel& model, SemanticConfig cf, SemanticConfig ci,
                   std::string_view sentence) {
  const auto tokens = tokens_for(model, sentence);
  const Tensor s = sentence_embedding(model, tokens);
  const std::array<SemanticConfig, 1> cfs{cf};
  const std::array<SemanticConfig, 1> cis{ci};
  const Tensor cf_t = config_rows(cfs);
  const Tensor ci_t = config_rows(cis);
  const auto out = encoder_forward(model, nn::concat_cols({&cf_t, &ci_t, &s}));
  return {{out.mu.values().begin(), out.mu.values().end()},
          {out.logvar.values().begin(), out.logvar.values().end()}};
}

std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> logvar,
                                   Rng& rng) {
  if (mu.size() != logvar.size()) {
    throw Error(ErrorCode::kShapeMismatch, "mu and logvar differ in length");
  }
  std::vector<double> z(mu.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = mu[k] + std::exp(clamped(logvar[k]) / 2.0) * rng.normal();
  }
  return z;
}

std::vector<double> decode(const CVAEModel& model, std::span<const double> z, SemanticConfig ci,
                           std::string_view sentence) {
  if (z.size() != model.hyperparams().latent) {
    throw Error(ErrorCode::kShapeMismatch, "latent code of length " + std::to_string(z.size()));
  }
  const auto tokens = tokens_for(model, sentence);
  const Tensor s = sentence_embedding(model, tokens);
  const std::array<SemanticConfig, 1> cis{ci};
  const Tensor ci_t = config_rows(cis);
  const Tensor z_t = row_tensor(z);
  const auto out = decoder_forward(model, nn::concat_cols({&z_t, &ci_t, &s}));
  return {out.probs.values().begin(), out.probs.values().end()};
}

LossParts cvae_loss(CVAEModel& model, std::span<const Example> batch, const Tensor& eps,
                    bool with_grad) {
  const auto& hp = model.hyperparams();
  const std::size_t rows = batch.size();
  if (rows == 0) throw Error(ErrorCode::kInvalidArgument, "empty minibatch");
  if (eps.rows() != rows || eps.cols() != hp.latent) {
    throw Error(ErrorCode::kShapeMismatch, "noise shape " + nn::shape_string(eps.shape()));
  }

  std::vector<std::span<const int>> token_batch;
  std::vector<SemanticConfig> cis, cfs;
  for (const auto& ex : batch) {
    token_batch.push_back(ex.tokens);
    cis.push_back(ex.ci);
    cfs.push_back(ex.cf);
  }
  const Tensor ci_t = config_rows(cis);
  const Tensor cf_t = config_rows(cfs);

  nn::RnnCache rnn_cache;
  const Tensor s = nn::rnn_forward(token_batch, rnn_weights(model), with_grad ? &rnn_cache : nullptr);

  const Tensor enc_in = nn::concat_cols({&cf_t, &ci_t, &s});
  const auto enc = encoder_forward(model, enc_in);

  Tensor std_dev = enc.logvar;
  for (auto& v : std_dev.values()) v = std::exp(clamped(v) / 2.0);
  Tensor z = enc.mu;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += std_dev[i] * eps[i];

  const Tensor dec_in = nn::concat_cols({&z, &ci_t, &s});
  const auto dec = decoder_forward(model, dec_in);

  Tensor d_probs, d_mu_kl, d_logvar_kl;
  LossParts loss;
  loss.bce = nn::bce_loss(dec.probs, cf_t, with_grad ? &d_probs : nullptr);
  if (hp.reconstruction == Reconstruction::kSum) {
    const double scale = static_cast<double>(kNumSlots);
    loss.bce *= scale;
    for (auto& g : d_probs.values()) g *= scale;
  }
  loss.kl = nn::kl_loss(enc.mu, enc.logvar, with_grad ? &d_mu_kl : nullptr,
                        with_grad ? &d_logvar_kl : nullptr);
  loss.total = loss.bce + hp.beta * loss.kl;
  if (!with_grad) return loss;

  // Decoder.
  Tensor d_logits = nn::sigmoid_backward(dec.probs, d_probs);
  Tensor d_g2, d_g1, d_dec_in;
  nn::linear_backward(dec.g2, value(model, kDecOutW), d_logits, grad(model, kDecOutW),
                      grad(model, kDecOutB), &d_g2);
  d_g2 = nn::relu_backward(dec.g2, d_g2);
  nn::linear_backward(dec.g1, value(model, kDecW2), d_g2, grad(model, kDecW2), grad(model, kDecB2),
                      &d_g1);
  d_g1 = nn::relu_backward(dec.g1, d_g1);
  nn::linear_backward(dec_in, value(model, kDecW1), d_g1, grad(model, kDecW1), grad(model, kDecB1),
                      &d_dec_in);

  // Reparameterization and KL.
  const Tensor d_z = nn::slice_cols(d_dec_in, 0, hp.latent);
  Tensor d_mu = d_z;
  Tensor d_logvar = Tensor(enc.logvar.shape());
  for (std::size_t i = 0; i < d_mu.size(); ++i) {
    d_mu[i] += hp.beta * d_mu_kl[i];
    const double lv = enc.logvar[i];
    const bool inside = lv > nn::kLogvarMin && lv < nn::kLogvarMax;
    d_logvar[i] = (inside ? d_z[i] * eps[i] * std_dev[i] * 0.5 : 0.0) + hp.beta * d_logvar_kl[i];
  }

  // Encoder.
  Tensor d_h2_mu, d_h2_lv, d_h1, d_enc_in;
  nn::linear_backward(enc.h2, value(model, kEncMuW), d_mu, grad(model, kEncMuW),
                      grad(model, kEncMuB), &d_h2_mu);
  nn::linear_backward(enc.h2, value(model, kEncLogvarW), d_logvar, grad(model, kEncLogvarW),
                      grad(model, kEncLogvarB), &d_h2_lv);
  for (std::size_t i = 0; i < d_h2_mu.size(); ++i) d_h2_mu[i] += d_h2_lv[i];
  Tensor d_h2 = nn::relu_backward(enc.h2, d_h2_mu);
  nn::linear_backward(enc.h1, value(model, kEncW2), d_h2, grad(model, kEncW2), grad(model, kEncB2),
                      &d_h1);
  d_h1 = nn::relu_backward(enc.h1, d_h1);
  nn::linear_backward(enc_in, value(model, kEncW1), d_h1, grad(model, kEncW1), grad(model, kEncB1),
                      &d_enc_in);

  // Sentence embedding feeds both networks.
  Tensor d_s = nn::slice_cols(d_enc_in, 2 * kNumSlots, hp.embed);
  const Tensor d_s_dec = nn::slice_cols(d_dec_in, hp.latent + kNumSlots, hp.embed);
  for (std::size_t i = 0; i < d_s.size(); ++i) d_s[i] += d_s_dec[i];
  nn::rnn_backward(rnn_cache, rnn_weights(model), d_s,
                   {grad(model, kEmbedding), grad(model, kRnnWx), grad(model, kRnnWh),
                    grad(model, kRnnB)});
  return loss;
}

TrainResult train(const std::vector<Triplet>& data, const Hyperparams& hp,
                  const EpochCallback& on_epoch) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");
  TrainResult result{CVAEModel(hp), {}};
  CVAEModel& model = result.model;
  Rng rng = Rng(hp.seed).derive(1);

  std::vector<Example> examples;
  examples.reserve(data.size());
  for (const auto& t : data) examples.push_back({t.ci, t.cf, t.sentence->tokens});

  nn::Adam adam({.lr = hp.lr});
  adam.init(model.params());

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Example> batch;
  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double sum_bce = 0.0, sum_kl = 0.0, sum_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch) {
      const std::size_t end = std::min(order.size(), start + hp.batch);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(examples[order[i]]);
      Tensor eps = Tensor::matrix(batch.size(), hp.latent);
      for (auto& v : eps.values()) v = rng.normal();
      model.params().zero_grad();
      const auto loss = cvae_loss(model, batch, eps, true);
      adam.step(model.params());
      const auto w = static_cast<double>(batch.size());
      sum_bce += loss.bce * w;
      sum_kl += loss.kl * w;
      sum_total += loss.total * w;
    }
    const auto n = static_cast<double>(order.size());
    result.log.push_back({epoch, sum_bce / n, sum_kl / n, sum_total / n});
    if (on_epoch) on_epoch(result.log.back());
  }
  return result;
}

std::string training_log_jsonl(const std::vector<EpochLog>& log) {
  std::string out;
  for (const auto& e : log) {
    nlohmann::ordered_json j = {{"epoch", e.epoch},
                                {"mean_bce", e.mean_bce},
                                {"mean_kl", e.mean_kl},
                                {"mean_total", e.mean_total}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<SemanticConfig> sample_goals(const CVAEModel& model, SemanticConfig ci,
                                         std::span<const int> tokens, std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  const auto& hp = model.hyperparams();
  const Tensor s = repeat_row(sentence_embedding(model, tokens), n);
  const std::array<SemanticConfig, 1> cis{ci};
  const Tensor ci_t = repeat_row(config_rows(cis), n);
  Tensor z = Tensor::matrix(n, hp.latent);
  for (auto& v : z.values()) v = rng.normal();
  const auto dec = decoder_forward(model, nn::concat_cols({&z, &ci_t, &s}));
  std::vector<SemanticConfig> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    SemanticConfig c;
    for (int k = 0; k < kNumSlots; ++k) c = c.with(k, dec.probs.at(r, static_cast<std::size_t>(k)) > 0.5);
    out.push_back(c);
  }
  return out;
}

std::vector<SemanticConfig> sample_goals(const CVAEModel& model, SemanticConfig ci,
                                         std::string_view sentence, std::size_t n, Rng& rng) {
  const auto tokens = tokens_for(model, sentence);
  return sample_goals(model, ci, std::span<const int>(tokens), n, rng);
}

}  // namespace l2g
