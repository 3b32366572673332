#pragma once

// Compatibility Probability and Coverage of a goal generator over the five
// generalization test sets.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "l2g/corpus.hpp"
#include "l2g/goalgen.hpp"
#include "l2g/oracle.hpp"

namespace l2g {

// Any goal source with the sample_goals contract.
using GoalSampler = std::function<std::vector<SemanticConfig>(SemanticConfig ci, const Sentence& s,
                                                              std::size_t n, Rng& rng)>;

// The model must outlive the returned sampler.
GoalSampler model_sampler(const CVAEModel& model);

// Fraction of samples inside entry.cf_set. Invalid samples count as misses.
double compatibility_probability(std::span<const SemanticConfig> samples, const OracleEntry& entry);
// |distinct samples ∩ cf_set| / |cf_set|.
double coverage(std::span<const SemanticConfig> samples, const OracleEntry& entry);

double compatibility_probability(const GoalSampler& sampler, const OracleEntry& entry,
                                 std::size_t n, Rng& rng);
double coverage(const GoalSampler& sampler, const OracleEntry& entry, std::size_t n, Rng& rng);

struct TestRow {
  int test_id;
  double cp_mean;
  double cov_mean;
  std::size_t n_entries;
};

struct EvalReport {
  std::uint64_t seed;
  std::size_t n_samples;
  std::vector<TestRow> rows;  // test ids 1..5
};

// Each entry draws n goals once from an independent stream (seed, entry index)
// and scores CP and Cov on the same draws. `workers` > 1 fans entries out over
// threads; the report does not depend on the worker count.
// Throws kMissingOracleEntry when a test pair has no oracle entry.
EvalReport evaluate_testsets(const GoalSampler& sampler, const Oracle& oracle,
                             const SplitSpec& splits, std::size_t n, std::uint64_t seed,
                             std::size_t workers = 1);

// {"seed": .., "n": .., "tests": [{"test_id", "cp_mean", "cov_mean", "n_entries"}, ...]}
std::string to_json(const EvalReport& report);

}  // namespace l2g
