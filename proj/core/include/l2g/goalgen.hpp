#pragma once

// Language-conditioned goal generator: a conditional VAE over 9-bit goal
// configurations, conditioned on the initial configuration and a sentence
// embedding produced by a jointly trained recurrent encoder.
//
//   encoder: [cf(9), ci(9), s(E)] -> H -> H -> (mu, logvar) in R^latent
//   decoder: [z(latent), ci(9), s(E)] -> H -> H -> 9 sigmoid probabilities
//   loss   : BCE(decoded, cf) + beta * KL(q(z | cf, ci, s) || N(0, I))
//
// KL is summed over latent dims. The reconstruction term is summed over the 9
// outputs by default; averaging it instead multiplies the effective beta by 9,
// which makes ignoring z optimal (see Reconstruction::kMean).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2g/corpus.hpp"
#include "l2g/instructions.hpp"
#include "l2g/nn.hpp"
#include "l2g/rng.hpp"
#include "l2g/semantics.hpp"

namespace l2g {

// Per-sample reduction of the reconstruction BCE over the 9 outputs. kMean is
// nn::bce_loss as is; it collapses the posterior at beta = 0.6.
enum class Reconstruction : std::uint8_t { kSum = 0, kMean = 1 };

struct Hyperparams {
  std::size_t hidden = 128;
  std::size_t latent = 27;
  std::size_t embed = 100;
  double beta = 0.6;
  double lr = 5e-4;
  std::size_t batch = 128;
  std::size_t epochs = 150;
  std::uint64_t seed = 0;
  Reconstruction reconstruction = Reconstruction::kSum;

  // Throws kInvalidArgument unless all sizes are positive and beta in (0, 1].
  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

class CVAEModel {
 public:
  // Glorot-uniform weights, zero biases, drawn from a generator seeded with hp.seed.
  explicit CVAEModel(const Hyperparams& hp);
  // Every parameter zero; used for shape tests and by the loader.
  static CVAEModel zeros(const Hyperparams& hp);

  const Hyperparams& hyperparams() const { return hp_; }
  const Vocabulary& vocabulary() const { return instruction_set().vocabulary(); }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  std::size_t encoder_input_width() const { return 2 * kNumSlots + hp_.embed; }
  std::size_t decoder_input_width() const { return hp_.latent + kNumSlots + hp_.embed; }

  friend bool operator==(const CVAEModel& a, const CVAEModel& b) {
    return a.hp_ == b.hp_ && a.params_ == b.params_;
  }

 private:
  CVAEModel(const Hyperparams& hp, bool zero_init);

  Hyperparams hp_;
  nn::ParamStore params_;
};

// Parameter names, in storage order.
const std::vector<std::string>& cvae_param_names();

struct LatentStats {
  std::vector<double> mu;
  std::vector<double> logvar;
};

// Throws kUnknownToken for out-of-vocabulary words.
LatentStats encode(const CVAEModel& model, SemanticConfig cf, SemanticConfig ci,
                   std::string_view sentence);

// z = mu + exp(logvar / 2) * eps, eps ~ N(0, I); logvar clamped as in the KL term.
std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> logvar,
                                   Rng& rng);

std::vector<double> decode(const CVAEModel& model, std::span<const double> z, SemanticConfig ci,
                           std::string_view sentence);

// One training example with its sentence already tokenized.
struct Example {
  SemanticConfig ci;
  SemanticConfig cf;
  std::span<const int> tokens;
};

struct LossParts {
  double bce = 0.0;  // reconstruction term as it enters the loss
  double kl = 0.0;
  double total = 0.0;
};

// Composite minibatch loss with externally supplied reparameterization noise
// (eps: [batch, latent]). Accumulates into params().grad when with_grad is set.
LossParts cvae_loss(CVAEModel& model, std::span<const Example> batch, const nn::Tensor& eps,
                    bool with_grad);

struct EpochLog {
  std::size_t epoch;  // 1-based
  double mean_bce;
  double mean_kl;
  double mean_total;
};

struct TrainResult {
  CVAEModel model;
  std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// epochs x ceil(|data| / batch) Adam steps over minibatches shuffled by the
// seeded generator; the short final batch is kept.
TrainResult train(const std::vector<Triplet>& data, const Hyperparams& hp,
                  const EpochCallback& on_epoch = {});

// JSONL: {"epoch": 1, "mean_bce": ..., "mean_kl": ..., "mean_total": ...}
std::string training_log_jsonl(const std::vector<EpochLog>& log);

// Draws z ~ N(0, I), decodes, thresholds each probability at 0.5. Results may
// repeat and may be invalid configurations.
std::vector<SemanticConfig> sample_goals(const CVAEModel& model, SemanticConfig ci,
                                         std::string_view sentence, std::size_t n, Rng& rng);
std::vector<SemanticConfig> sample_goals(const CVAEModel& model, SemanticConfig ci,
                                         std::span<const int> tokens, std::size_t n, Rng& rng);

// ---- persistence -----------------------------------------------------------
//
// Little-endian layout:
//   "CVAE" | u8 version | u32 crc32(payload) | payload
//   payload = u32 section count, then per section:
//     u32 name length | name bytes | u8 dtype (1 = f64, 2 = u64) |
//     u8 rank | u64 dims[rank] | values
// Sections: "hparams.int" (u64: hidden, latent, embed, batch, epochs, seed,
// vocabulary size, reconstruction), "hparams.real" (f64: beta, lr), then every parameter.

inline constexpr std::uint8_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize(const CVAEModel& model);
// Throws kBadFormat, kFormatVersionMismatch or kChecksumMismatch.
CVAEModel deserialize(std::span<const std::uint8_t> bytes);

// Throws kIo on filesystem errors.
void save(const CVAEModel& model, const std::filesystem::path& path);
CVAEModel load(const std::filesystem::path& path);

}  // namespace l2g
