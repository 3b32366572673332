#pragma once

// Simulated grounding: goals from a generator are handed to a symbolic
// executor that either reaches them or fails. Implements the transition,
// expression and sequence protocols with try-again resampling.

#include <cstdint>
#include <string>

#include "l2g/evalmod.hpp"
#include "l2g/expression.hpp"

namespace l2g {

struct ExecutorConfig {
  enum class Mode : std::uint8_t { kOracleSuccess, kStochastic };

  Mode mode = Mode::kOracleSuccess;
  double p_fail = 0.0;  // ignored in kOracleSuccess

  static ExecutorConfig oracle() { return {}; }
  static ExecutorConfig stochastic(double p) { return {Mode::kStochastic, p}; }
  double failure_probability() const { return mode == Mode::kOracleSuccess ? 0.0 : p_fail; }
};

struct ExecutionResult {
  bool reached;
  SemanticConfig achieved;
};

// Teleports to `goal` with probability 1 - p_fail. Invalid goals always fail.
// A failure leaves the scene at `current`.
ExecutionResult execute(SemanticConfig current, SemanticConfig goal, const ExecutorConfig& cfg,
                        Rng& rng);

inline constexpr std::size_t kDefaultMaxAttempts = 5;
// Redraws spent looking for a goal not yet attempted in the episode.
inline constexpr std::size_t kNoveltyRedraws = 50;

struct AttemptOutcome {
  bool success = false;
  std::size_t attempts_used = 0;
  SemanticConfig achieved;
  std::vector<SemanticConfig> attempted;  // goals in attempt order
};

// Each attempt samples a goal for (ci, sentence), skipping goals already tried
// in this episode, and executes it from the current scene without reset.
// Success means the achieved scene realizes the sentence's shift relative to ci.
AttemptOutcome attempt_instruction(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                   SemanticConfig ci, const Sentence& sentence,
                                   std::size_t max_attempts, Rng& rng);

// Expression variant: candidates come from a uniformly chosen leaf and are
// filtered by satisfaction of the whole expression.
AttemptOutcome attempt_expression(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                  SemanticConfig ci, const LogicalExpr& expr,
                                  std::size_t max_attempts, Rng& rng);

struct ProtocolReport {
  std::string protocol;
  double sr1 = 0.0;
  double sr5 = 0.0;
  double n_s = 0.0;  // sequence protocol only
  std::size_t episodes = 0;
  double p_fail = 0.0;
  std::uint64_t seed = 0;
};

// Every instruction `episodes_per_sentence` times, each from a fresh initial
// configuration drawn uniformly among those where its shift applies.
ProtocolReport transition_protocol(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                   std::uint64_t seed, std::size_t episodes_per_sentence = 5);

// n_expr expressions with a 1:2:2 mix of kinds 1, 2, 3. An expression whose
// compatible set is empty at the drawn ci is redrawn.
ProtocolReport expression_protocol(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                   std::uint64_t seed, std::size_t n_expr = 500);

inline constexpr std::size_t kSequenceCap = 50;

// Mean number of consecutive successes before the first failure over n_seq
// sequences, each capped at kSequenceCap.
ProtocolReport sequence_protocol(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                 std::uint64_t seed, std::size_t n_seq = 20);

std::string to_json(const ProtocolReport& report);

}  // namespace l2g
