#pragma once

// Logical combinations of instructions.
//
// Surface grammar (lowest to highest precedence):
//   expr   := term ('or' term)*
//   term   := factor ('and' factor)*
//   factor := 'not' factor | '(' expr ')' | '{' instruction '}'
// Binary operators associate to the left.

#include <string>
#include <string_view>
#include <vector>

#include "l2g/instructions.hpp"
#include "l2g/rng.hpp"

namespace l2g {

class LogicalExpr {
 public:
  enum class Kind : std::uint8_t { kLeaf, kNot, kAnd, kOr };

  // Binds to the first sentence sharing `sentence.text`.
  static LogicalExpr leaf(const Sentence& sentence);
  static LogicalExpr negate(LogicalExpr inner);
  static LogicalExpr conj(LogicalExpr lhs, LogicalExpr rhs);
  static LogicalExpr disj(LogicalExpr lhs, LogicalExpr rhs);

  Kind kind() const { return kind_; }
  // Leaf only.
  const Sentence& sentence() const;
  // Not: child(0). And/Or: child(0), child(1).
  const LogicalExpr& child(std::size_t i) const { return children_.at(i); }

  std::size_t leaf_count() const;
  void collect_leaves(std::vector<const Sentence*>& out) const;

  friend bool operator==(const LogicalExpr& a, const LogicalExpr& b);

 private:
  LogicalExpr(Kind kind, int sentence_id, std::vector<LogicalExpr> children)
      : kind_(kind), sentence_id_(sentence_id), children_(std::move(children)) {}

  Kind kind_;
  int sentence_id_;
  std::vector<LogicalExpr> children_;
};

// Throws kSyntax (with character offset) or kNotAnInstruction from a leaf.
// Multi-meaning leaf texts bind to their first sentence; evaluation in the
// oracle considers every meaning of the text.
LogicalExpr parse_expression(std::string_view text);

// Canonical printer; parse_expression(to_string(e)) == e.
std::string to_string(const LogicalExpr& expr);

// Expression families used for grounding evaluation:
//   1: A and B, two above 0->1 leaves on distinct slots
//   2: A and B, above and close leaves, B negated with probability 0.5
//   3: (A and B) or (C and D), A,C above and B,D close, each leaf negated w.p. 0.5
LogicalExpr sample_expression(int kind, Rng& rng);

}  // namespace l2g
