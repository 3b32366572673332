#include "l2g/instructions.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "l2g/error.hpp"

namespace l2g {

namespace {

// Templates use A and B as placeholders for the two color words.
constexpr std::array<std::string_view, 8> kCloseRise{
    "put A close_to B",
    "bring B and A together",
    "put B close_to A",
    "bring A and B together",
    "get B and A close_from each_other",
    "get A close_to B",
    "get A and B close_from each_other",
    "get B close_to A",
};

constexpr std::array<std::string_view, 8> kCloseFall{
    "put A far_from B",
    "get A far_from B",
    "put B far_from A",
    "get B far_from A",
    "get A and B far_from each_other",
    "bring A and B apart",
    "get B and A far_from each_other",
    "bring B and A apart",
};

constexpr std::array<std::string_view, 4> kAboveRise{
    "put A above B",
    "put A on_top_of B",
    "put B under A",
    "put B below A",
};

constexpr std::array<std::string_view, 5> kAboveFall{
    "remove A from_above B",
    "remove A from B",
    "remove B from_below A",
    "put B and A on_the_same_plane",
    "put A and B on_the_same_plane",
};

std::string fill(std::string_view tmpl, ObjectId a, ObjectId b) {
  std::string out;
  for (char ch : tmpl) {
    if (ch == 'A') {
      out += color_name(a);
    } else if (ch == 'B') {
      out += color_name(b);
    } else {
      out += ch;
    }
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(' ', start);
    words.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return words;
}

}  // namespace

std::string to_string(const ShiftMeaning& m) {
  return slot_name(m.slot) + " " + std::string(direction_name(m.direction));
}

Vocabulary::Vocabulary(const std::vector<std::string>& words_in_order) {
  for (const auto& w : words_in_order) {
    if (index_.contains(w)) continue;
    index_.emplace(w, static_cast<int>(words_.size()));
    words_.push_back(w);
  }
}

std::optional<int> Vocabulary::index_of(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

InstructionSet::InstructionSet() {
  auto add = [&](std::string text, ShiftMeaning meaning, InstructionBlock block) {
    const int id = static_cast<int>(sentences_.size());
    sentences_.push_back({id, std::move(text), {}, meaning, block});
  };

  for (int k = 0; k < kNumCloseSlots; ++k) {
    const auto s = slot_at(k);
    for (auto t : kCloseRise) {
      add(fill(t, s.first, s.second), {k, Direction::kRise}, InstructionBlock::kCloseRise);
    }
  }
  for (int k = 0; k < kNumCloseSlots; ++k) {
    const auto s = slot_at(k);
    for (auto t : kCloseFall) {
      add(fill(t, s.first, s.second), {k, Direction::kFall}, InstructionBlock::kCloseFall);
    }
  }
  for (int k = kNumCloseSlots; k < kNumSlots; ++k) {
    const auto s = slot_at(k);
    for (auto t : kAboveRise) {
      add(fill(t, s.first, s.second), {k, Direction::kRise}, InstructionBlock::kAboveRise);
    }
  }
  for (int k = kNumCloseSlots; k < kNumSlots; ++k) {
    const auto s = slot_at(k);
    for (auto t : kAboveFall) {
      add(fill(t, s.first, s.second), {k, Direction::kFall}, InstructionBlock::kAboveFall);
    }
  }

  std::vector<std::string> words;
  for (const auto& s : sentences_) {
    for (auto& w : split_words(s.text)) words.push_back(std::move(w));
  }
  vocabulary_ = Vocabulary(words);
  for (auto& s : sentences_) {
    s.tokens = tokenize(s.text, vocabulary_);
    by_text_[s.text].push_back(s.id);
  }
}

std::vector<const Sentence*> InstructionSet::lookup(std::string_view text) const {
  std::vector<const Sentence*> out;
  const auto it = by_text_.find(lowercase(text));
  if (it == by_text_.end()) return out;
  for (int id : it->second) out.push_back(&sentences_[static_cast<std::size_t>(id)]);
  return out;
}

namespace {

// Out-of-vocabulary words are reported before grammar mismatches.
[[noreturn]] void reject(std::string_view text) {
  tokenize(text);
  throw Error(ErrorCode::kNotAnInstruction, "'" + std::string(text) + "'");
}

}  // namespace

const Sentence& InstructionSet::resolve(std::string_view text, SemanticConfig ci) const {
  const auto candidates = lookup(text);
  if (candidates.empty()) reject(text);
  for (const auto* s : candidates) {
    if (s->meaning.applicable(ci)) return *s;
  }
  return *candidates.front();
}

const Sentence& InstructionSet::unique(std::string_view text) const {
  const auto candidates = lookup(text);
  if (candidates.empty()) reject(text);
  if (candidates.size() > 1) {
    throw Error(ErrorCode::kAmbiguousInstruction,
                "'" + std::string(text) + "' has " + std::to_string(candidates.size()) +
                    " meanings; resolve against an initial configuration");
  }
  return *candidates.front();
}

std::vector<const Sentence*> InstructionSet::in_block(InstructionBlock block) const {
  std::vector<const Sentence*> out;
  for (const auto& s : sentences_) {
    if (s.block == block) out.push_back(&s);
  }
  return out;
}

const InstructionSet& instruction_set() {
  static const InstructionSet kSet;
  return kSet;
}

const std::vector<Sentence>& build_instruction_set() { return instruction_set().sentences(); }

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::vector<int> tokenize(std::string_view text, const Vocabulary& vocabulary) {
  std::vector<int> out;
  for (const auto& word : split_words(lowercase(text))) {
    const auto idx = vocabulary.index_of(word);
    if (!idx) throw Error(ErrorCode::kUnknownToken, "'" + word + "'");
    out.push_back(*idx);
  }
  return out;
}

std::vector<int> tokenize(std::string_view text) {
  return tokenize(text, instruction_set().vocabulary());
}

ShiftMeaning parse_instruction(std::string_view text) {
  return instruction_set().unique(text).meaning;
}

ShiftMeaning parse_instruction(std::string_view text, SemanticConfig ci) {
  return instruction_set().resolve(text, ci).meaning;
}

}  // namespace l2g
