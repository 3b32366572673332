#include "l2g/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <utility>

#include "json.hpp"
#include "l2g/error.hpp"
#include "l2g/oracle.hpp"

namespace l2g {

namespace {

using Key = std::pair<std::uint16_t, std::string>;

Key key_of(SemanticConfig ci, const Sentence& s) { return {ci.code(), s.text}; }

const std::vector<std::vector<const Sentence*>>& sentences_by_meaning() {
  // Index: slot * 2 + direction.
  static const auto kTable = [] {
    std::vector<std::vector<const Sentence*>> t(kNumSlots * 2);
    for (const auto& s : instruction_set().sentences()) {
      t[static_cast<std::size_t>(s.meaning.slot * 2 + static_cast<int>(s.meaning.direction))]
          .push_back(&s);
    }
    return t;
  }();
  return kTable;
}

}  // namespace

const Sentence& social_partner_describe(SemanticConfig ci, SemanticConfig cf, Rng& rng) {
  const auto changes = diff(ci, cf);
  if (changes.empty()) throw Error(ErrorCode::kNoChange, "ci == cf == " + ci.to_string());
  const auto& change = changes[rng.index(changes.size())];
  const auto& pool = sentences_by_meaning()[static_cast<std::size_t>(
      change.slot * 2 + static_cast<int>(change.direction))];
  return *pool[rng.index(pool.size())];
}

std::vector<Triplet> generate_dataset(std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "dataset size must be >= 1");
  const auto& valid = enumerate_valid();
  std::vector<Triplet> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = valid[rng.index(valid.size())];
    // Uniform over the other 34 configs.
    auto k = rng.index(valid.size() - 1);
    if (valid[k] >= ci) ++k;
    const auto cf = valid[k];
    out.push_back({ci, cf, &social_partner_describe(ci, cf, rng)});
  }
  return out;
}

bool consistent(const Triplet& t) {
  return is_valid(t.ci) && is_valid(t.cf) && t.sentence->meaning.achieved(t.ci, t.cf);
}

SplitSpec build_splits(const std::vector<Triplet>& data, const HoldoutRules& rules) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot split an empty dataset");
  const auto& set = instruction_set();
  SplitSpec out;

  std::set<Key> held_out;
  for (const auto& [ci_text, text] : rules.recombination_pairs) {
    const auto ci = SemanticConfig::from_string(ci_text);
    const auto& s = set.resolve(text, ci);
    out.tests[1].push_back({ci, &s});
    held_out.insert(key_of(ci, s));
  }

  const auto unseen_ci = SemanticConfig::from_string(rules.unseen_ci);
  std::set<std::string> unseen_texts;
  for (const auto& t : rules.unseen_sentences) {
    set.unique(t);  // must name a single instruction
    unseen_texts.insert(lowercase(t));
  }

  for (const auto& e : build_oracle()) {
    const bool ci_match = e.ci == unseen_ci;
    const bool s_match = unseen_texts.contains(e.sentence->text);
    if (!ci_match && !s_match) continue;
    const int test = ci_match && s_match ? 4 : (ci_match ? 2 : 3);
    out.tests[static_cast<std::size_t>(test)].push_back({e.ci, e.sentence});
    held_out.insert(key_of(e.ci, *e.sentence));
  }

  std::set<Key> seen;
  for (const auto& t : data) {
    const auto key = key_of(t.ci, *t.sentence);
    if (held_out.contains(key)) continue;
    out.train.push_back(t);
    if (seen.insert(key).second) out.tests[0].push_back({t.ci, t.sentence});
  }
  return out;
}

void write_dataset(std::ostream& out, const std::vector<Triplet>& data) {
  for (const auto& t : data) {
    nlohmann::ordered_json line = {
        {"ci", t.ci.to_string()}, {"cf", t.cf.to_string()}, {"s", t.sentence->text}};
    out << line.dump() << '\n';
  }
}

std::vector<Triplet> read_dataset(std::istream& in) {
  std::vector<Triplet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      const auto ci = SemanticConfig::from_string(j.at("ci").get<std::string>());
      const auto cf = SemanticConfig::from_string(j.at("cf").get<std::string>());
      const auto& s = instruction_set().resolve(j.at("s").get<std::string>(), ci);
      Triplet t{ci, cf, &s};
      if (!consistent(t)) {
        throw Error(ErrorCode::kBadFormat, where + ": sentence does not describe the transition");
      }
      out.push_back(t);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kBadFormat, where + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBadFormat) throw;
      throw Error(ErrorCode::kBadFormat, where + ": " + e.what());
    }
  }
  return out;
}

std::string split_manifest_json(const SplitSpec& splits) {
  nlohmann::ordered_json tests = nlohmann::ordered_json::array();
  for (int k = 0; k < kNumTestSets; ++k) {
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& p : splits.tests[static_cast<std::size_t>(k)]) {
      pairs.push_back({{"ci", p.ci.to_string()}, {"s", p.sentence->text}});
    }
    tests.push_back({{"test_id", k + 1}, {"pairs", std::move(pairs)}});
  }
  nlohmann::ordered_json out = {{"train_size", splits.train.size()}, {"tests", std::move(tests)}};
  return out.dump(1);
}

}  // namespace l2g
