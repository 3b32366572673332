#pragma once

// Semantic configurations over three blocks: three symmetric `close` slots
// followed by six ordered `above` slots.
//
//   slot  0 c(r,g)  1 c(r,b)  2 c(g,b)
//         3 a(r,g)  4 a(g,r)  5 a(r,b)  6 a(b,r)  7 a(g,b)  8 a(b,g)

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace l2g {

enum class ObjectId : std::uint8_t { kRed = 0, kGreen = 1, kBlue = 2 };

inline constexpr int kNumObjects = 3;
inline constexpr int kNumSlots = 9;
inline constexpr int kNumCloseSlots = 3;

inline constexpr std::array<ObjectId, 3> kAllObjects{ObjectId::kRed, ObjectId::kGreen,
                                                     ObjectId::kBlue};

std::string_view color_name(ObjectId id);
std::optional<ObjectId> object_from_color(std::string_view word);

enum class PredicateKind : std::uint8_t { kClose, kAbove };

struct PredicateSlot {
  int index;
  PredicateKind kind;
  ObjectId first;
  ObjectId second;

  friend bool operator==(const PredicateSlot&, const PredicateSlot&) = default;
};

// Throws kInvalidPair when a == b.
PredicateSlot slot_of(PredicateKind kind, ObjectId a, ObjectId b);
// Throws kInvalidArgument outside [0, 8].
PredicateSlot slot_at(int index);
std::string slot_name(int index);  // e.g. "c(red,green)", "a(blue,green)"

enum class Direction : std::uint8_t { kRise, kFall };  // 0->1, 1->0

constexpr bool source_value(Direction d) { return d == Direction::kFall; }
constexpr bool target_value(Direction d) { return d == Direction::kRise; }
constexpr Direction flipped(Direction d) {
  return d == Direction::kRise ? Direction::kFall : Direction::kRise;
}
std::string_view direction_name(Direction d);  // "0->1" / "1->0"

class SemanticConfig {
 public:
  constexpr SemanticConfig() = default;

  // Throws kInvalidConfig unless `text` is exactly 9 characters of '0'/'1'.
  static SemanticConfig from_string(std::string_view text);
  // Bit for slot i sits at position (8 - i), so integer order is lexicographic bit order.
  static constexpr SemanticConfig from_code(std::uint16_t code) {
    SemanticConfig c;
    c.code_ = static_cast<std::uint16_t>(code & 0x1FF);
    return c;
  }

  constexpr bool operator[](int slot) const { return (code_ >> (kNumSlots - 1 - slot)) & 1U; }
  constexpr SemanticConfig with(int slot, bool value) const {
    const auto mask = static_cast<std::uint16_t>(1U << (kNumSlots - 1 - slot));
    return from_code(value ? (code_ | mask) : (code_ & ~mask));
  }

  constexpr std::uint16_t code() const { return code_; }
  std::string to_string() const;
  int popcount() const;

  friend constexpr auto operator<=>(const SemanticConfig&, const SemanticConfig&) = default;

 private:
  std::uint16_t code_ = 0;
};

enum class ThirdPattern : std::uint8_t { kIsolated, kNearBottom, kNearBoth };

struct Flat {
  // close_pattern[k] is the value of close slot k.
  std::array<bool, 3> close_pattern{};
  friend bool operator==(const Flat&, const Flat&) = default;
};
struct Stack2 {
  ObjectId top;
  ObjectId bottom;
  ThirdPattern third;
  friend bool operator==(const Stack2&, const Stack2&) = default;
};
struct Stack3 {
  ObjectId top;
  ObjectId mid;
  ObjectId bottom;
  friend bool operator==(const Stack3&, const Stack3&) = default;
};
struct Pyramid {
  ObjectId top;
  friend bool operator==(const Pyramid&, const Pyramid&) = default;
};

using StructureClass = std::variant<Flat, Stack2, Stack3, Pyramid>;

bool well_formed(const StructureClass& structure);
SemanticConfig realize(const StructureClass& structure);
std::string describe(const StructureClass& structure);

// All 35 well-formed structures: 8 flat, 18 two-stacks, 6 three-stacks, 3 pyramids.
const std::vector<StructureClass>& all_structures();

// The 35 valid configurations in ascending lexicographic order.
const std::vector<SemanticConfig>& enumerate_valid();
bool is_valid(SemanticConfig c);
// Structure realizing `c`, if valid.
std::optional<StructureClass> structure_of(SemanticConfig c);

struct SlotChange {
  int slot;
  Direction direction;
  friend bool operator==(const SlotChange&, const SlotChange&) = default;
};

// One entry per differing bit, in slot order.
std::vector<SlotChange> diff(SemanticConfig from, SemanticConfig to);

}  // namespace l2g
