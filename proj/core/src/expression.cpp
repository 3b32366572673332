#include "l2g/expression.hpp"

#include <cctype>

#include "l2g/error.hpp"

namespace l2g {

// Leaves are identified by text: multi-meaning texts bind to their first sentence.
LogicalExpr LogicalExpr::leaf(const Sentence& sentence) {
  return LogicalExpr(Kind::kLeaf, instruction_set().lookup(sentence.text).front()->id, {});
}

LogicalExpr LogicalExpr::negate(LogicalExpr inner) {
  std::vector<LogicalExpr> c;
  c.push_back(std::move(inner));
  return LogicalExpr(Kind::kNot, -1, std::move(c));
}

LogicalExpr LogicalExpr::conj(LogicalExpr lhs, LogicalExpr rhs) {
  std::vector<LogicalExpr> c;
  c.push_back(std::move(lhs));
  c.push_back(std::move(rhs));
  return LogicalExpr(Kind::kAnd, -1, std::move(c));
}

LogicalExpr LogicalExpr::disj(LogicalExpr lhs, LogicalExpr rhs) {
  std::vector<LogicalExpr> c;
  c.push_back(std::move(lhs));
  c.push_back(std::move(rhs));
  return LogicalExpr(Kind::kOr, -1, std::move(c));
}

const Sentence& LogicalExpr::sentence() const {
  if (kind_ != Kind::kLeaf) throw Error(ErrorCode::kInvalidArgument, "sentence() on non-leaf");
  return instruction_set().at(sentence_id_);
}

std::size_t LogicalExpr::leaf_count() const {
  if (kind_ == Kind::kLeaf) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

void LogicalExpr::collect_leaves(std::vector<const Sentence*>& out) const {
  if (kind_ == Kind::kLeaf) {
    out.push_back(&sentence());
    return;
  }
  for (const auto& c : children_) c.collect_leaves(out);
}

bool operator==(const LogicalExpr& a, const LogicalExpr& b) {
  return a.kind_ == b.kind_ && a.sentence_id_ == b.sentence_id_ && a.children_ == b.children_;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  LogicalExpr parse() {
    auto e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  LogicalExpr expr() {
    auto lhs = term();
    while (keyword("or")) lhs = LogicalExpr::disj(std::move(lhs), term());
    return lhs;
  }

  LogicalExpr term() {
    auto lhs = factor();
    while (keyword("and")) lhs = LogicalExpr::conj(std::move(lhs), factor());
    return lhs;
  }

  LogicalExpr factor() {
    skip_space();
    if (keyword("not")) return LogicalExpr::negate(factor());
    if (consume('(')) {
      auto inner = expr();
      skip_space();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (consume('{')) {
      const auto close = text_.find('}', pos_);
      if (close == std::string_view::npos) fail("unterminated '{'");
      const auto body = trim(text_.substr(pos_, close - pos_));
      const auto candidates = instruction_set().lookup(body);
      if (candidates.empty()) {
        tokenize(body);
        throw Error(ErrorCode::kNotAnInstruction,
                    "'" + std::string(body) + "' at offset " + std::to_string(pos_));
      }
      pos_ = close + 1;
      return LogicalExpr::leaf(*candidates.front());
    }
    fail(pos_ == text_.size() ? "unexpected end of input" : "expected 'not', '(' or '{'");
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char ch) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  // Case-insensitive keyword followed by a non-identifier character.
  bool keyword(std::string_view word) {
    skip_space();
    if (text_.size() - pos_ < word.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(text_[pos_ + i])) != word[i]) return false;
    }
    const auto end = pos_ + word.size();
    if (end < text_.size()) {
      const auto next = static_cast<unsigned char>(text_[end]);
      if (std::isalnum(next) || next == '_') return false;
    }
    pos_ = end;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kSyntax, what + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(LogicalExpr::Kind k) {
  switch (k) {
    case LogicalExpr::Kind::kOr: return 1;
    case LogicalExpr::Kind::kAnd: return 2;
    case LogicalExpr::Kind::kNot: return 3;
    case LogicalExpr::Kind::kLeaf: return 4;
  }
  return 0;
}

void print(const LogicalExpr& e, std::string& out);

void print_child(const LogicalExpr& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const LogicalExpr& e, std::string& out) {
  using K = LogicalExpr::Kind;
  const int p = precedence(e.kind());
  switch (e.kind()) {
    case K::kLeaf:
      out += '{';
      out += e.sentence().text;
      out += '}';
      break;
    case K::kNot:
      out += "not ";
      print_child(e.child(0), precedence(e.child(0).kind()) < p, out);
      break;
    case K::kAnd:
    case K::kOr:
      // Left-associative: the right operand needs parentheses at equal precedence.
      print_child(e.child(0), precedence(e.child(0).kind()) < p, out);
      out += e.kind() == K::kAnd ? " and " : " or ";
      print_child(e.child(1), precedence(e.child(1).kind()) <= p, out);
      break;
  }
}

const Sentence& pick(const std::vector<const Sentence*>& pool, Rng& rng) {
  return *pool[rng.index(pool.size())];
}

LogicalExpr maybe_negated(const Sentence& s, Rng& rng) {
  auto leaf = LogicalExpr::leaf(s);
  return rng.bernoulli(0.5) ? LogicalExpr::negate(std::move(leaf)) : leaf;
}

}  // namespace

LogicalExpr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const LogicalExpr& expr) {
  std::string out;
  print(expr, out);
  return out;
}

LogicalExpr sample_expression(int kind, Rng& rng) {
  const auto& set = instruction_set();
  static const auto above_rise = set.in_block(InstructionBlock::kAboveRise);
  static const auto above_any = [&] {
    auto v = set.in_block(InstructionBlock::kAboveRise);
    const auto fall = set.in_block(InstructionBlock::kAboveFall);
    v.insert(v.end(), fall.begin(), fall.end());
    return v;
  }();
  static const auto close_any = [&] {
    auto v = set.in_block(InstructionBlock::kCloseRise);
    const auto fall = set.in_block(InstructionBlock::kCloseFall);
    v.insert(v.end(), fall.begin(), fall.end());
    return v;
  }();

  switch (kind) {
    case 1: {
      const Sentence& a = pick(above_rise, rng);
      const Sentence* b = &pick(above_rise, rng);
      while (b->meaning.slot == a.meaning.slot) b = &pick(above_rise, rng);
      return LogicalExpr::conj(LogicalExpr::leaf(a), LogicalExpr::leaf(*b));
    }
    case 2: {
      const Sentence& a = pick(above_any, rng);
      const Sentence& b = pick(close_any, rng);
      return LogicalExpr::conj(LogicalExpr::leaf(a), maybe_negated(b, rng));
    }
    case 3: {
      auto left_a = maybe_negated(pick(above_any, rng), rng);
      auto left_b = maybe_negated(pick(close_any, rng), rng);
      auto right_a = maybe_negated(pick(above_any, rng), rng);
      auto right_b = maybe_negated(pick(close_any, rng), rng);
      return LogicalExpr::disj(LogicalExpr::conj(std::move(left_a), std::move(left_b)),
                               LogicalExpr::conj(std::move(right_a), std::move(right_b)));
    }
    default:
      throw Error(ErrorCode::kInvalidArgument, "expression kind " + std::to_string(kind));
  }
}

}  // namespace l2g
