#pragma once

// Synthetic social-partner data collection and the five train/test splits.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "l2g/instructions.hpp"
#include "l2g/rng.hpp"
#include "l2g/semantics.hpp"

namespace l2g {

struct Triplet {
  SemanticConfig ci;
  SemanticConfig cf;
  const Sentence* sentence;

  friend bool operator==(const Triplet& a, const Triplet& b) {
    return a.ci == b.ci && a.cf == b.cf && a.sentence->id == b.sentence->id;
  }
};

// An input pair (ci, s) of a test set.
struct TestPair {
  SemanticConfig ci;
  const Sentence* sentence;

  friend bool operator==(const TestPair& a, const TestPair& b) {
    return a.ci == b.ci && a.sentence->text == b.sentence->text;
  }
};

inline constexpr int kNumTestSets = 5;

struct SplitSpec {
  std::vector<Triplet> train;
  std::array<std::vector<TestPair>, kNumTestSets> tests;  // tests[k] is test set k + 1
};

// Describes one realized change: a uniformly chosen differing slot, then a
// uniformly chosen sentence among that shift's templates. Throws kNoChange.
const Sentence& social_partner_describe(SemanticConfig ci, SemanticConfig cf, Rng& rng);

// ci uniform over the valid set, cf uniform over valid configs != ci.
std::vector<Triplet> generate_dataset(std::size_t n, Rng& rng);

// Held-out definitions used by build_splits.
struct HoldoutRules {
  std::vector<std::pair<std::string, std::string>> recombination_pairs{
      {"010000000", "put blue close_to green"},
      {"001000000", "put green below red"},
  };
  std::string unseen_ci = "110000000";
  std::vector<std::string> unseen_sentences{"put green on_top_of red", "put blue far_from red"};
};

// Test 1: distinct (ci, text) keys left in train. Test 2: the recombination
// pairs. Tests 3-5: every applicable (ci, sentence) pair matching the unseen
// initial config, the unseen sentences, or both; set 5 is excluded from 3 and 4.
// Every triplet matching a held-out key is dropped from train.
SplitSpec build_splits(const std::vector<Triplet>& data, const HoldoutRules& rules = {});

// True when the sentence's shift is one of the realized changes of (ci, cf).
bool consistent(const Triplet& t);

// JSONL, one object per line: {"ci": "...", "cf": "...", "s": "..."}.
void write_dataset(std::ostream& out, const std::vector<Triplet>& data);
// Throws kBadFormat (with line number) on malformed or inconsistent lines.
std::vector<Triplet> read_dataset(std::istream& in);

// {"train_size": n, "tests": [{"test_id": 1, "pairs": [{"ci": "...", "s": "..."}]}, ...]}
std::string split_manifest_json(const SplitSpec& splits);

}  // namespace l2g
