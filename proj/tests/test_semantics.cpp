#include <set>

#include "doctest.h"
#include "l2g/error.hpp"
#include "l2g/rng.hpp"
#include "l2g/semantics.hpp"
#include "support.hpp"

using namespace l2g;
using l2g::testing::cfg;

namespace {

constexpr ObjectId R = ObjectId::kRed, G = ObjectId::kGreen, B = ObjectId::kBlue;

bool close_bit(SemanticConfig c, ObjectId a, ObjectId b) {
  return c[slot_of(PredicateKind::kClose, a, b).index];
}
bool above_bit(SemanticConfig c, ObjectId a, ObjectId b) {
  return c[slot_of(PredicateKind::kAbove, a, b).index];
}

// Independent statement of the validity rule, written over raw bits.
bool valid_by_rule(SemanticConfig c) {
  std::vector<std::pair<ObjectId, ObjectId>> above;
  for (auto a : kAllObjects) {
    for (auto b : kAllObjects) {
      if (a != b && above_bit(c, a, b)) above.emplace_back(a, b);
    }
  }
  auto third = [](ObjectId a, ObjectId b) {
    return static_cast<ObjectId>(3 - static_cast<int>(a) - static_cast<int>(b));
  };
  if (above.empty()) return true;
  if (above.size() == 1) {
    const auto [t, b] = above[0];
    const auto x = third(t, b);
    return close_bit(c, t, b) && !(close_bit(c, t, x) && !close_bit(c, b, x));
  }
  if (above.size() == 2) {
    const auto [t1, b1] = above[0];
    const auto [t2, b2] = above[1];
    if (t1 == b2 && b1 == t2) return false;  // mutual
    if (t1 == t2) {  // pyramid
      return close_bit(c, R, G) && close_bit(c, R, B) && close_bit(c, G, B);
    }
    ObjectId top, mid, bottom;
    if (b1 == t2) {
      top = t1, mid = b1, bottom = b2;
    } else if (b2 == t1) {
      top = t2, mid = b2, bottom = b1;
    } else {
      return false;
    }
    return close_bit(c, top, mid) && close_bit(c, mid, bottom) && !close_bit(c, top, bottom);
  }
  return false;
}

}  // namespace

TEST_SUITE("semantics") {
  TEST_CASE("slot layout") {
    CHECK(slot_of(PredicateKind::kClose, R, G).index == 0);
    CHECK(slot_of(PredicateKind::kClose, G, R).index == 0);
    CHECK(slot_of(PredicateKind::kClose, R, B).index == 1);
    CHECK(slot_of(PredicateKind::kClose, B, G).index == 2);
    CHECK(slot_of(PredicateKind::kAbove, R, G).index == 3);
    CHECK(slot_of(PredicateKind::kAbove, G, R).index == 4);
    CHECK(slot_of(PredicateKind::kAbove, R, B).index == 5);
    CHECK(slot_of(PredicateKind::kAbove, B, R).index == 6);
    CHECK(slot_of(PredicateKind::kAbove, G, B).index == 7);
    CHECK(slot_of(PredicateKind::kAbove, B, G).index == 8);
    CHECK(slot_name(8) == "a(blue,green)");
    for (int i = 0; i < kNumSlots; ++i) CHECK(slot_at(i).index == i);
    CHECK_THROWS_AS(slot_of(PredicateKind::kAbove, R, R), Error);
    CHECK_THROWS_AS(slot_at(9), Error);
  }

  TEST_CASE("config text and code") {
    const auto c = cfg("100100000");
    CHECK(c[0]);
    CHECK(c[3]);
    CHECK_FALSE(c[1]);
    CHECK(c.to_string() == "100100000");
    CHECK(c.popcount() == 2);
    CHECK(SemanticConfig::from_code(c.code()) == c);
    CHECK(cfg("000000001") < cfg("000000010"));
    CHECK(c.with(3, false) == cfg("100000000"));
    for (const char* bad : {"", "10010000", "1001000000", "10010000x"}) {
      CAPTURE(bad);
      try {
        SemanticConfig::from_string(bad);
        FAIL("accepted");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kInvalidConfig);
      }
    }
  }

  TEST_CASE("realize examples") {
    CHECK(realize(Flat{{false, false, false}}) == SemanticConfig{});
    CHECK(realize(Stack2{R, G, ThirdPattern::kIsolated}) == cfg("100100000"));
    // Pyramid(blue): all close, a(b,r), a(b,g).
    CHECK(realize(Pyramid{B}) == cfg("111000101"));
    CHECK(realize(Stack3{R, G, B}) == cfg("101100010"));
  }

  TEST_CASE("valid set: size, order, counts") {
    const auto& valid = enumerate_valid();
    REQUIRE(valid.size() == 35);
    CHECK(std::set<SemanticConfig>(valid.begin(), valid.end()).size() == 35);
    CHECK(std::is_sorted(valid.begin(), valid.end()));
    CHECK(valid.front() == SemanticConfig{});
    auto count = [&](auto pred) { return std::count_if(valid.begin(), valid.end(), pred); };
    // 4 flat + 12 two-stack + 4 three-stack + 3 pyramid. Summing close bits
    // over the set gives 69 = 3 * 23.
    CHECK(count([](SemanticConfig c) { return c[0]; }) == 23);
    CHECK(count([](SemanticConfig c) { return !c[0]; }) == 12);
    CHECK(count([](SemanticConfig c) { return c[3]; }) == 6);

    std::size_t flat = 0, stack2 = 0, stack3 = 0, pyramid = 0;
    for (const auto& s : all_structures()) {
      CHECK(well_formed(s));
      if (std::holds_alternative<Flat>(s)) ++flat;
      if (std::holds_alternative<Stack2>(s)) ++stack2;
      if (std::holds_alternative<Stack3>(s)) ++stack3;
      if (std::holds_alternative<Pyramid>(s)) ++pyramid;
    }
    CHECK(flat == 8);
    CHECK(stack2 == 18);
    CHECK(stack3 == 6);
    CHECK(pyramid == 3);
  }

  TEST_CASE("valid set equals an independent rule over all 512 bit vectors") {
    std::size_t n = 0;
    for (std::uint16_t code = 0; code < 512; ++code) {
      const auto c = SemanticConfig::from_code(code);
      CAPTURE(c.to_string());
      CHECK(is_valid(c) == valid_by_rule(c));
      n += valid_by_rule(c) ? 1 : 0;
    }
    CHECK(n == 35);
  }

  TEST_CASE("is_valid examples") {
    CHECK(is_valid(SemanticConfig{}));
    CHECK_FALSE(is_valid(cfg("100110000")));  // a(r,g) and a(g,r)
    CHECK_FALSE(is_valid(cfg("000100000")));  // above without close
  }

  TEST_CASE("valid-set invariants") {
    for (auto c : enumerate_valid()) {
      CAPTURE(c.to_string());
      int above = 0;
      for (auto a : kAllObjects) {
        for (auto b : kAllObjects) {
          if (a == b || !above_bit(c, a, b)) continue;
          ++above;
          CHECK(close_bit(c, a, b));
          CHECK_FALSE(above_bit(c, b, a));
        }
      }
      CHECK(above <= 2);
      const auto s = structure_of(c);
      REQUIRE(s.has_value());
      CHECK(realize(*s) == c);
    }
  }

  TEST_CASE("realize is injective") {
    std::set<SemanticConfig> seen;
    for (const auto& s : all_structures()) CHECK(seen.insert(realize(s)).second);
  }

  TEST_CASE("diff examples and antisymmetry") {
    const auto c = cfg("100100000");
    CHECK(diff(c, c).empty());
    CHECK(diff(SemanticConfig{}, cfg("100000000")) ==
          std::vector<SlotChange>{{0, Direction::kRise}});
    CHECK(diff(c, SemanticConfig{}) ==
          std::vector<SlotChange>{{0, Direction::kFall}, {3, Direction::kFall}});

    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
      const auto a = SemanticConfig::from_code(static_cast<std::uint16_t>(rng.index(512)));
      const auto b = SemanticConfig::from_code(static_cast<std::uint16_t>(rng.index(512)));
      auto forward = diff(a, b);
      const auto backward = diff(b, a);
      REQUIRE(forward.size() == backward.size());
      for (std::size_t i = 0; i < forward.size(); ++i) {
        CHECK(forward[i].slot == backward[i].slot);
        CHECK(forward[i].direction == flipped(backward[i].direction));
      }
    }
  }
}

TEST_SUITE("rng") {
  TEST_CASE("reproducible and derived streams independent of draw position") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42);
    const auto d1 = c.derive(5).next_u64();
    c.next_u64();
    CHECK(c.derive(5).next_u64() == d1);
    CHECK(Rng(42).derive(6).next_u64() != d1);
  }

  TEST_CASE("uniform, index and normal moments") {
    Rng rng(9);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      const double z = rng.normal();
      sum += z;
      sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
    std::array<int, 7> hist{};
    for (int i = 0; i < 7000; ++i) ++hist[rng.index(7)];
    for (int h : hist) CHECK((h > 850 && h < 1150));
  }
}
