#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "l2g/semantics.hpp"

namespace l2g {

struct ShiftMeaning {
  int slot;
  Direction direction;

  bool applicable(SemanticConfig c) const { return c[slot] == source_value(direction); }
  bool achieved(SemanticConfig from, SemanticConfig to) const {
    return applicable(from) && to[slot] == target_value(direction);
  }
  friend bool operator==(const ShiftMeaning&, const ShiftMeaning&) = default;
};

std::string to_string(const ShiftMeaning& m);  // "a(red,green) 0->1"

// The four template groups of the social partner's emission table.
enum class InstructionBlock : std::uint8_t { kCloseRise, kCloseFall, kAboveRise, kAboveFall };

struct Sentence {
  int id;  // position in the instruction set
  std::string text;
  std::vector<int> tokens;
  ShiftMeaning meaning;
  InstructionBlock block;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& words_in_order);

  std::optional<int> index_of(std::string_view word) const;
  const std::string& word(int index) const { return words_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

class InstructionSet {
 public:
  InstructionSet();

  const std::vector<Sentence>& sentences() const { return sentences_; }
  const Sentence& at(int id) const { return sentences_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return sentences_.size(); }
  const Vocabulary& vocabulary() const { return vocabulary_; }

  // Sentences whose text equals the lowercased `text`. Usually one; two for the
  // "on_the_same_plane" texts, which the emission table assigns to both orders.
  std::vector<const Sentence*> lookup(std::string_view text) const;

  // Resolves a text against an initial configuration: the unique sentence whose
  // shift applies at `ci`, or the first candidate when none applies.
  // Throws kNotAnInstruction.
  const Sentence& resolve(std::string_view text, SemanticConfig ci) const;

  // Throws kNotAnInstruction, or kAmbiguousInstruction for multi-meaning texts.
  const Sentence& unique(std::string_view text) const;

  std::vector<const Sentence*> in_block(InstructionBlock block) const;

 private:
  std::vector<Sentence> sentences_;
  Vocabulary vocabulary_;
  std::unordered_map<std::string, std::vector<int>> by_text_;
};

// Process-wide immutable instance.
const InstructionSet& instruction_set();

// All 102 sentences in emission-table order.
const std::vector<Sentence>& build_instruction_set();

std::string lowercase(std::string_view text);

// Lowercases, splits on single spaces, resolves each word. Throws kUnknownToken.
std::vector<int> tokenize(std::string_view text);
std::vector<int> tokenize(std::string_view text, const Vocabulary& vocabulary);

ShiftMeaning parse_instruction(std::string_view text);
ShiftMeaning parse_instruction(std::string_view text, SemanticConfig ci);

}  // namespace l2g
