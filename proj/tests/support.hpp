#pragma once

// Shared fixtures: reference goal sources and a small model configuration.

#include <algorithm>

#include "l2g/evalmod.hpp"
#include "l2g/oracle.hpp"

namespace l2g::testing {

inline SemanticConfig cfg(const char* bits) { return SemanticConfig::from_string(bits); }

// Draws uniformly from the true compatible set; the ideal generator.
inline GoalSampler perfect_sampler() {
  return [](SemanticConfig ci, const Sentence& s, std::size_t n, Rng& rng) {
    // Nothing to do for a shift that cannot apply (e.g. a leaf under a negation).
    if (!s.meaning.applicable(ci)) return std::vector<SemanticConfig>(n, ci);
    const auto set = compatible_set(ci, s.meaning);
    std::vector<SemanticConfig> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(set[rng.index(set.size())]);
    return out;
  };
}

// Always returns the same configuration.
inline GoalSampler constant_sampler(SemanticConfig c) {
  return [c](SemanticConfig, const Sentence&, std::size_t n, Rng&) {
    return std::vector<SemanticConfig>(n, c);
  };
}

inline Hyperparams tiny_hyperparams(std::uint64_t seed = 1) {
  Hyperparams hp;
  hp.hidden = 6;
  hp.latent = 3;
  hp.embed = 5;
  hp.batch = 4;
  hp.epochs = 2;
  hp.seed = seed;
  return hp;
}

}  // namespace l2g::testing
