#pragma once

// Brute-force ground truth over the 35 valid configurations.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2g/expression.hpp"
#include "l2g/instructions.hpp"
#include "l2g/semantics.hpp"

namespace l2g {

// Subset of the valid configurations, bit k <-> enumerate_valid()[k].
class ConfigSet {
 public:
  ConfigSet() = default;
  static ConfigSet all();
  static ConfigSet from(const std::vector<SemanticConfig>& configs);

  bool contains(SemanticConfig c) const;
  void insert(SemanticConfig c);
  std::size_t size() const;
  bool empty() const { return mask_ == 0; }
  std::vector<SemanticConfig> members() const;  // ascending

  ConfigSet operator&(ConfigSet o) const { return ConfigSet(mask_ & o.mask_); }
  ConfigSet operator|(ConfigSet o) const { return ConfigSet(mask_ | o.mask_); }
  ConfigSet complement() const { return ConfigSet(~mask_ & all().mask_); }
  friend bool operator==(const ConfigSet&, const ConfigSet&) = default;

 private:
  explicit ConfigSet(std::uint64_t mask) : mask_(mask) {}
  std::uint64_t mask_ = 0;
};

// Position of `c` in enumerate_valid(), or -1.
int valid_index(SemanticConfig c);

struct OracleEntry {
  SemanticConfig ci;
  const Sentence* sentence;
  std::vector<SemanticConfig> cf_set;  // ascending
};

// Valid configs whose shifted slot holds the target value; other slots are free.
// Throws kInvalidConfig for invalid ci, kInapplicableShift when ci[slot] != source.
std::vector<SemanticConfig> compatible_set(SemanticConfig ci, const ShiftMeaning& meaning);

// One entry per (valid ci, sentence) with an applicable shift; ci-major, then sentence order.
const std::vector<OracleEntry>& build_oracle();

// Lookup keyed by (ci, sentence text). Multi-meaning texts resolve to the
// meaning applicable at ci, so keys are unique.
class Oracle {
 public:
  Oracle();
  const std::vector<OracleEntry>& entries() const { return *entries_; }
  const OracleEntry* find(SemanticConfig ci, std::string_view text) const;
  double mean_set_size() const;

 private:
  const std::vector<OracleEntry>* entries_;
  std::map<std::pair<std::uint16_t, std::string>, std::size_t> index_;
};

// Leaf: some meaning of the leaf text is applicable at ci and achieved at cf.
bool satisfied(SemanticConfig ci, SemanticConfig cf, const LogicalExpr& expr);

// Set algebra within the valid universe: and -> intersection, or -> union,
// not -> complement. Inapplicable leaves contribute the empty set.
ConfigSet compatible_set_expr(SemanticConfig ci, const LogicalExpr& expr);

// [{"ci": "...", "s": "...", "cf": ["...", ...]}, ...]
std::string oracle_to_json(const std::vector<OracleEntry>& entries);

}  // namespace l2g
