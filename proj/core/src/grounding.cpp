#include "l2g/grounding.hpp"

#include <algorithm>

#include "json.hpp"
#include "l2g/error.hpp"
#include "l2g/oracle.hpp"

namespace l2g {

namespace {

bool tried(const std::vector<SemanticConfig>& attempted, SemanticConfig c) {
  return std::find(attempted.begin(), attempted.end(), c) != attempted.end();
}

SemanticConfig uniform_valid(Rng& rng) {
  const auto& valid = enumerate_valid();
  return valid[rng.index(valid.size())];
}

// Picks the first acceptable candidate, else the first untried one, else the first.
SemanticConfig choose(const std::vector<SemanticConfig>& candidates,
                      const std::vector<SemanticConfig>& attempted,
                      const std::function<bool(SemanticConfig)>& acceptable) {
  for (auto c : candidates) {
    if (!tried(attempted, c) && acceptable(c)) return c;
  }
  for (auto c : candidates) {
    if (!tried(attempted, c)) return c;
  }
  return candidates.front();
}

template <typename NextGoal, typename Succeeded>
AttemptOutcome run_attempts(const ExecutorConfig& cfg, SemanticConfig ci, std::size_t max_attempts,
                            Rng& rng, NextGoal next_goal, Succeeded succeeded) {
  if (max_attempts == 0) throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
  AttemptOutcome out;
  out.achieved = ci;
  for (std::size_t a = 1; a <= max_attempts; ++a) {
    const SemanticConfig goal = next_goal(out.attempted);
    out.attempted.push_back(goal);
    out.attempts_used = a;
    out.achieved = execute(out.achieved, goal, cfg, rng).achieved;
    if (succeeded(out.achieved)) {
      out.success = true;
      return out;
    }
  }
  return out;
}

struct Tally {
  std::size_t episodes = 0;
  std::size_t first = 0;
  std::size_t any = 0;

  void add(const AttemptOutcome& o) {
    ++episodes;
    if (o.success && o.attempts_used == 1) ++first;
    if (o.success) ++any;
  }
  double sr1() const { return episodes ? static_cast<double>(first) / static_cast<double>(episodes) : 0.0; }
  double sr5() const { return episodes ? static_cast<double>(any) / static_cast<double>(episodes) : 0.0; }
};

}  // namespace

ExecutionResult execute(SemanticConfig current, SemanticConfig goal, const ExecutorConfig& cfg,
                        Rng& rng) {
  if (!is_valid(goal)) return {false, current};
  if (cfg.mode == ExecutorConfig::Mode::kStochastic && rng.bernoulli(cfg.p_fail)) {
    return {false, current};
  }
  return {true, goal};
}

AttemptOutcome attempt_instruction(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                   SemanticConfig ci, const Sentence& sentence,
                                   std::size_t max_attempts, Rng& rng) {
  return run_attempts(
      cfg, ci, max_attempts, rng,
      [&](const std::vector<SemanticConfig>& attempted) {
        const auto draws = sampler(ci, sentence, kNoveltyRedraws + 1, rng);
        return choose(draws, attempted, [](SemanticConfig) { return true; });
      },
      [&](SemanticConfig achieved) { return sentence.meaning.achieved(ci, achieved); });
}

AttemptOutcome attempt_expression(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                  SemanticConfig ci, const LogicalExpr& expr,
                                  std::size_t max_attempts, Rng& rng) {
  std::vector<const Sentence*> leaves;
  expr.collect_leaves(leaves);
  return run_attempts(
      cfg, ci, max_attempts, rng,
      [&](const std::vector<SemanticConfig>& attempted) {
        // Leaf per candidate slot, then one batched draw per leaf.
        std::vector<std::size_t> leaf_of(kNoveltyRedraws + 1);
        std::vector<std::size_t> per_leaf(leaves.size(), 0);
        for (auto& l : leaf_of) {
          l = rng.index(leaves.size());
          ++per_leaf[l];
        }
        std::vector<std::vector<SemanticConfig>> pools(leaves.size());
        for (std::size_t l = 0; l < leaves.size(); ++l) {
          if (per_leaf[l] == 0) continue;
          const auto& s = instruction_set().resolve(leaves[l]->text, ci);
          pools[l] = sampler(ci, s, per_leaf[l], rng);
        }
        std::vector<SemanticConfig> candidates;
        std::vector<std::size_t> used(leaves.size(), 0);
        for (auto l : leaf_of) candidates.push_back(pools[l][used[l]++]);
        return choose(candidates, attempted,
                      [&](SemanticConfig c) { return satisfied(ci, c, expr); });
      },
      [&](SemanticConfig achieved) { return satisfied(ci, achieved, expr); });
}

ProtocolReport transition_protocol(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                   std::uint64_t seed, std::size_t episodes_per_sentence) {
  Rng rng(seed);
  Tally tally;
  for (const auto& s : instruction_set().sentences()) {
    std::vector<SemanticConfig> starts;
    for (auto c : enumerate_valid()) {
      if (s.meaning.applicable(c)) starts.push_back(c);
    }
    for (std::size_t e = 0; e < episodes_per_sentence; ++e) {
      const auto ci = starts[rng.index(starts.size())];
      tally.add(attempt_instruction(sampler, cfg, ci, s, kDefaultMaxAttempts, rng));
    }
  }
  return {"transition", tally.sr1(), tally.sr5(), 0.0, tally.episodes, cfg.failure_probability(), seed};
}

ProtocolReport expression_protocol(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                   std::uint64_t seed, std::size_t n_expr) {
  Rng rng(seed);
  Tally tally;
  const std::size_t n_kind1 = n_expr / 5;
  const std::size_t n_kind2 = (n_expr - n_kind1) / 2;
  for (std::size_t i = 0; i < n_expr; ++i) {
    const int kind = i < n_kind1 ? 1 : (i < n_kind1 + n_kind2 ? 2 : 3);
    SemanticConfig ci = uniform_valid(rng);
    LogicalExpr expr = sample_expression(kind, rng);
    for (std::size_t tries = 1; compatible_set_expr(ci, expr).empty(); ++tries) {
      if (tries % 1000 == 0) ci = uniform_valid(rng);
      expr = sample_expression(kind, rng);
    }
    tally.add(attempt_expression(sampler, cfg, ci, expr, kDefaultMaxAttempts, rng));
  }
  return {"expression", tally.sr1(), tally.sr5(), 0.0, tally.episodes, cfg.failure_probability(), seed};
}

ProtocolReport sequence_protocol(const GoalSampler& sampler, const ExecutorConfig& cfg,
                                 std::uint64_t seed, std::size_t n_seq) {
  Rng rng(seed);
  const auto& sentences = instruction_set().sentences();
  std::size_t total = 0;
  for (std::size_t q = 0; q < n_seq; ++q) {
    SemanticConfig current = uniform_valid(rng);
    std::size_t successes = 0;
    while (successes < kSequenceCap) {
      std::vector<const Sentence*> applicable;
      for (const auto& s : sentences) {
        if (s.meaning.applicable(current)) applicable.push_back(&s);
      }
      const Sentence& s = *applicable[rng.index(applicable.size())];
      const auto outcome = attempt_instruction(sampler, cfg, current, s, kDefaultMaxAttempts, rng);
      if (!outcome.success) break;
      ++successes;
      current = outcome.achieved;
    }
    total += successes;
  }
  ProtocolReport r{"sequence", 0.0, 0.0, 0.0, n_seq, cfg.failure_probability(), seed};
  r.n_s = n_seq ? static_cast<double>(total) / static_cast<double>(n_seq) : 0.0;
  return r;
}

std::string to_json(const ProtocolReport& report) {
  nlohmann::ordered_json out = {{"protocol", report.protocol}};
  if (report.protocol == "sequence") {
    out["n_s"] = report.n_s;
  } else {
    out["sr1"] = report.sr1;
    out["sr5"] = report.sr5;
  }
  out["episodes"] = report.episodes;
  out["p_fail"] = report.p_fail;
  out["seed"] = report.seed;
  return out.dump(1);
}

}  // namespace l2g
