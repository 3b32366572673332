#include "l2g/semantics.hpp"

#include <algorithm>
#include <bit>

#include "l2g/error.hpp"

namespace l2g {

namespace {

int id(ObjectId o) { return static_cast<int>(o); }

constexpr std::array<std::pair<int, int>, 3> kClosePairs{{{0, 1}, {0, 2}, {1, 2}}};
constexpr std::array<std::pair<int, int>, 6> kAbovePairs{
    {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}};

ObjectId third_of(ObjectId a, ObjectId b) { return static_cast<ObjectId>(3 - id(a) - id(b)); }

SemanticConfig set(SemanticConfig c, PredicateKind kind, ObjectId a, ObjectId b) {
  return c.with(slot_of(kind, a, b).index, true);
}

std::vector<StructureClass> build_structures() {
  std::vector<StructureClass> out;
  for (int pattern = 0; pattern < 8; ++pattern) {
    out.emplace_back(Flat{{(pattern & 4) != 0, (pattern & 2) != 0, (pattern & 1) != 0}});
  }
  for (auto top : kAllObjects) {
    for (auto bottom : kAllObjects) {
      if (top == bottom) continue;
      for (auto third : {ThirdPattern::kIsolated, ThirdPattern::kNearBottom, ThirdPattern::kNearBoth}) {
        out.emplace_back(Stack2{top, bottom, third});
      }
    }
  }
  for (auto top : kAllObjects) {
    for (auto mid : kAllObjects) {
      if (mid == top) continue;
      out.emplace_back(Stack3{top, mid, third_of(top, mid)});
    }
  }
  for (auto top : kAllObjects) out.emplace_back(Pyramid{top});
  return out;
}

}  // namespace

std::string_view color_name(ObjectId o) {
  switch (o) {
    case ObjectId::kRed: return "red";
    case ObjectId::kGreen: return "green";
    case ObjectId::kBlue: return "blue";
  }
  return "?";
}

std::optional<ObjectId> object_from_color(std::string_view word) {
  for (auto o : kAllObjects) {
    if (color_name(o) == word) return o;
  }
  return std::nullopt;
}

PredicateSlot slot_of(PredicateKind kind, ObjectId a, ObjectId b) {
  if (a == b) {
    throw Error(ErrorCode::kInvalidPair,
                "predicate over identical objects (" + std::string(color_name(a)) + ")");
  }
  if (kind == PredicateKind::kClose) {
    const auto lo = std::min(id(a), id(b));
    const auto hi = std::max(id(a), id(b));
    for (int k = 0; k < 3; ++k) {
      if (kClosePairs[k] == std::pair{lo, hi}) return {k, kind, a, b};
    }
  } else {
    for (int k = 0; k < 6; ++k) {
      if (kAbovePairs[k] == std::pair{id(a), id(b)}) return {kNumCloseSlots + k, kind, a, b};
    }
  }
  throw Error(ErrorCode::kInvalidPair, "unreachable object pair");
}

PredicateSlot slot_at(int index) {
  if (index < 0 || index >= kNumSlots) {
    throw Error(ErrorCode::kInvalidArgument, "slot index " + std::to_string(index));
  }
  if (index < kNumCloseSlots) {
    const auto [a, b] = kClosePairs[index];
    return {index, PredicateKind::kClose, static_cast<ObjectId>(a), static_cast<ObjectId>(b)};
  }
  const auto [a, b] = kAbovePairs[index - kNumCloseSlots];
  return {index, PredicateKind::kAbove, static_cast<ObjectId>(a), static_cast<ObjectId>(b)};
}

std::string slot_name(int index) {
  const auto s = slot_at(index);
  std::string out = s.kind == PredicateKind::kClose ? "c(" : "a(";
  out += color_name(s.first);
  out += ',';
  out += color_name(s.second);
  out += ')';
  return out;
}

std::string_view direction_name(Direction d) { return d == Direction::kRise ? "0->1" : "1->0"; }

SemanticConfig SemanticConfig::from_string(std::string_view text) {
  if (text.size() != kNumSlots) {
    throw Error(ErrorCode::kInvalidConfig,
                "expected 9 characters, got " + std::to_string(text.size()) + " in '" +
                    std::string(text) + "'");
  }
  std::uint16_t code = 0;
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw Error(ErrorCode::kInvalidConfig, "non-binary character in '" + std::string(text) + "'");
    }
    code = static_cast<std::uint16_t>((code << 1) | (ch == '1' ? 1 : 0));
  }
  return from_code(code);
}

std::string SemanticConfig::to_string() const {
  std::string s(kNumSlots, '0');
  for (int i = 0; i < kNumSlots; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

int SemanticConfig::popcount() const { return std::popcount(static_cast<unsigned>(code_)); }

bool well_formed(const StructureClass& structure) {
  return std::visit(
      [](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Stack2>) return s.top != s.bottom;
        if constexpr (std::is_same_v<T, Stack3>) {
          return s.top != s.mid && s.mid != s.bottom && s.top != s.bottom;
        }
        return true;
      },
      structure);
}

SemanticConfig realize(const StructureClass& structure) {
  using K = PredicateKind;
  return std::visit(
      [](const auto& s) -> SemanticConfig {
        using T = std::decay_t<decltype(s)>;
        SemanticConfig c;
        if constexpr (std::is_same_v<T, Flat>) {
          for (int k = 0; k < 3; ++k) c = c.with(k, s.close_pattern[k]);
        } else if constexpr (std::is_same_v<T, Stack2>) {
          c = set(c, K::kAbove, s.top, s.bottom);
          c = set(c, K::kClose, s.top, s.bottom);
          const auto other = third_of(s.top, s.bottom);
          if (s.third != ThirdPattern::kIsolated) c = set(c, K::kClose, other, s.bottom);
          if (s.third == ThirdPattern::kNearBoth) c = set(c, K::kClose, other, s.top);
        } else if constexpr (std::is_same_v<T, Stack3>) {
          c = set(c, K::kAbove, s.top, s.mid);
          c = set(c, K::kAbove, s.mid, s.bottom);
          c = set(c, K::kClose, s.top, s.mid);
          c = set(c, K::kClose, s.mid, s.bottom);
        } else {
          for (auto o : kAllObjects) {
            if (o == s.top) continue;
            c = set(c, K::kAbove, s.top, o);
          }
          for (int k = 0; k < 3; ++k) c = c.with(k, true);
        }
        return c;
      },
      structure);
}

std::string describe(const StructureClass& structure) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat>) {
          std::string p;
          for (bool b : s.close_pattern) p += b ? '1' : '0';
          return "flat(" + p + ")";
        } else if constexpr (std::is_same_v<T, Stack2>) {
          static constexpr std::array<const char*, 3> kThird{"isolated", "near-bottom", "near-both"};
          return "stack2(" + std::string(color_name(s.top)) + "/" + std::string(color_name(s.bottom)) +
                 "," + kThird[static_cast<int>(s.third)] + ")";
        } else if constexpr (std::is_same_v<T, Stack3>) {
          return "stack3(" + std::string(color_name(s.top)) + "/" + std::string(color_name(s.mid)) +
                 "/" + std::string(color_name(s.bottom)) + ")";
        } else {
          return "pyramid(" + std::string(color_name(s.top)) + ")";
        }
      },
      structure);
}

const std::vector<StructureClass>& all_structures() {
  static const std::vector<StructureClass> kStructures = build_structures();
  return kStructures;
}

const std::vector<SemanticConfig>& enumerate_valid() {
  static const std::vector<SemanticConfig> kValid = [] {
    std::vector<SemanticConfig> out;
    for (const auto& s : all_structures()) out.push_back(realize(s));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }();
  return kValid;
}

bool is_valid(SemanticConfig c) {
  const auto& valid = enumerate_valid();
  return std::binary_search(valid.begin(), valid.end(), c);
}

std::optional<StructureClass> structure_of(SemanticConfig c) {
  for (const auto& s : all_structures()) {
    if (realize(s) == c) return s;
  }
  return std::nullopt;
}

std::vector<SlotChange> diff(SemanticConfig from, SemanticConfig to) {
  std::vector<SlotChange> out;
  for (int i = 0; i < kNumSlots; ++i) {
    if (from[i] != to[i]) out.push_back({i, to[i] ? Direction::kRise : Direction::kFall});
  }
  return out;
}

}  // namespace l2g
