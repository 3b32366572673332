#include <set>

#include "doctest.h"
#include "l2g/error.hpp"
#include "l2g/oracle.hpp"
#include "support.hpp"

using namespace l2g;
using l2g::testing::cfg;

namespace {

// Brute force straight from the definition, over plain vectors.
std::vector<SemanticConfig> brute_compatible(SemanticConfig ci, const ShiftMeaning& m) {
  std::vector<SemanticConfig> out;
  if (ci[m.slot] != source_value(m.direction)) return out;
  for (std::uint16_t code = 0; code < 512; ++code) {
    const auto c = SemanticConfig::from_code(code);
    if (is_valid(c) && c[m.slot] == target_value(m.direction)) out.push_back(c);
  }
  return out;
}

ConfigSet brute_expr(SemanticConfig ci, const LogicalExpr& e) {
  ConfigSet out;
  for (auto cf : enumerate_valid()) {
    if (satisfied(ci, cf, e)) out.insert(cf);
  }
  return out;
}

bool all_leaves_applicable(SemanticConfig ci, const LogicalExpr& e) {
  std::vector<const Sentence*> leaves;
  e.collect_leaves(leaves);
  for (const auto* s : leaves) {
    bool any = false;
    for (const auto* m : instruction_set().lookup(s->text)) any = any || m->meaning.applicable(ci);
    if (!any) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("compatible_set examples") {
    const auto rise = compatible_set(SemanticConfig{}, {0, Direction::kRise});
    CHECK(rise.size() == 23);
    for (auto c : rise) CHECK(c[0]);
    try {
      compatible_set(SemanticConfig{}, {0, Direction::kFall});
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInapplicableShift);
    }
    try {
      compatible_set(cfg("000100000"), {0, Direction::kRise});
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidConfig);
    }
    const auto c2 = compatible_set(cfg("110000000"), {2, Direction::kRise});
    CHECK(c2 == brute_compatible(cfg("110000000"), {2, Direction::kRise}));
  }

  TEST_CASE("oracle matches brute force entry by entry") {
    const auto& entries = build_oracle();
    std::size_t expected = 0;
    for (const auto& s : build_instruction_set()) {
      for (auto ci : enumerate_valid()) expected += s.meaning.applicable(ci) ? 1 : 0;
    }
    // Entries are keyed by (ci, text): a same_plane text applicable under both
    // meanings at one ci would collapse, but no valid ci has both a(A,B) and a(B,A).
    CHECK(entries.size() == expected);
    double total = 0.0;
    for (const auto& e : entries) {
      CHECK(is_valid(e.ci));
      CHECK_FALSE(e.cf_set.empty());
      CHECK(e.cf_set == brute_compatible(e.ci, e.sentence->meaning));
      for (auto c : e.cf_set) CHECK(c[e.sentence->meaning.slot] != source_value(e.sentence->meaning.direction));
      total += static_cast<double>(e.cf_set.size());
    }
    const Oracle oracle;
    CHECK(oracle.mean_set_size() == doctest::Approx(total / static_cast<double>(entries.size())));
    MESSAGE("oracle entries: " << entries.size() << ", mean |C_f|: " << oracle.mean_set_size());
  }

  TEST_CASE("pinned oracle baselines") {
    // Regression values of this artifact's brute force (reference figure elsewhere: 16.7).
    const Oracle oracle;
    CHECK(oracle.entries().size() == 1716);
    CHECK(oracle.mean_set_size() == doctest::Approx(13.1958).epsilon(1e-5));
  }

  TEST_CASE("lookup by text resolves the applicable meaning") {
    const Oracle oracle;
    const auto ci = realize(Stack2{ObjectId::kGreen, ObjectId::kRed, ThirdPattern::kIsolated});
    const auto* e = oracle.find(ci, "put red and green on_the_same_plane");
    REQUIRE(e != nullptr);
    CHECK(e->sentence->meaning == ShiftMeaning{4, Direction::kFall});
    CHECK(oracle.find(SemanticConfig{}, "put red and green on_the_same_plane") == nullptr);
    CHECK(oracle.find(SemanticConfig{}, "PUT RED CLOSE_TO GREEN") != nullptr);
  }

  TEST_CASE("ConfigSet algebra") {
    CHECK(ConfigSet::all().size() == 35);
    CHECK(ConfigSet{}.complement() == ConfigSet::all());
    const auto a = ConfigSet::from(compatible_set(SemanticConfig{}, {0, Direction::kRise}));
    CHECK(a.size() == 23);
    CHECK((a | a.complement()) == ConfigSet::all());
    CHECK((a & a.complement()).empty());
    CHECK(a.members() == compatible_set(SemanticConfig{}, {0, Direction::kRise}));
    CHECK(valid_index(cfg("000100000")) == -1);
    CHECK(valid_index(SemanticConfig{}) == 0);
  }

  TEST_CASE("satisfied: leaf, not, and") {
    const auto& s = *instruction_set().lookup("put red close_to green")[0];
    const auto leaf = LogicalExpr::leaf(s);
    const auto ci = SemanticConfig{};
    const auto cf = cfg("100000000");
    CHECK(satisfied(ci, cf, leaf));
    CHECK_FALSE(satisfied(ci, cf, LogicalExpr::negate(leaf)));
    const auto& t = *instruction_set().lookup("put red above green")[0];
    const auto both = LogicalExpr::conj(leaf, LogicalExpr::leaf(t));
    for (auto a : enumerate_valid()) {
      for (auto b : enumerate_valid()) {
        CHECK(satisfied(a, b, both) ==
              (satisfied(a, b, leaf) && satisfied(a, b, LogicalExpr::leaf(t))));
      }
    }
  }

  TEST_CASE("expression set algebra equals brute force; laws hold") {
    Rng rng(31);
    const auto& all = build_instruction_set();
    std::size_t checked = 0;
    for (int k = 0; k < 1000; ++k) {
      const auto ci = enumerate_valid()[rng.index(35)];
      const auto e = sample_expression(1 + static_cast<int>(rng.index(3)), rng);
      const auto set = compatible_set_expr(ci, e);
      if (all_leaves_applicable(ci, e)) {
        CHECK(set == brute_expr(ci, e));
        ++checked;
      }
      const auto f = LogicalExpr::leaf(all[rng.index(all.size())]);
      const auto fs = compatible_set_expr(ci, f);
      CHECK(compatible_set_expr(ci, LogicalExpr::negate(LogicalExpr::conj(e, f))) ==
            (set.complement() | fs.complement()));
      CHECK(compatible_set_expr(ci, LogicalExpr::negate(LogicalExpr::disj(e, f))) ==
            (set.complement() & fs.complement()));
      CHECK((compatible_set_expr(ci, LogicalExpr::negate(e)) | set) == ConfigSet::all());
      CHECK(compatible_set_expr(ci, LogicalExpr::conj(e, LogicalExpr::negate(e))).empty());
      CHECK(compatible_set_expr(ci, LogicalExpr::negate(LogicalExpr::negate(e))) == set);
    }
    CHECK(checked > 100);
  }

  TEST_CASE("type-1 intersections are three-stacks or pyramids") {
    Rng rng(2);
    int nonempty = 0;
    for (int k = 0; k < 500; ++k) {
      const auto e = sample_expression(1, rng);
      const auto ci = enumerate_valid()[rng.index(35)];
      for (auto c : compatible_set_expr(ci, e).members()) {
        ++nonempty;
        const auto s = structure_of(c);
        REQUIRE(s.has_value());
        CHECK((std::holds_alternative<Stack3>(*s) || std::holds_alternative<Pyramid>(*s)));
      }
    }
    CHECK(nonempty > 0);
  }

  TEST_CASE("inapplicable leaf contributes the empty set") {
    const auto leaf = LogicalExpr::leaf(*instruction_set().lookup("get red far_from green")[0]);
    CHECK(compatible_set_expr(SemanticConfig{}, leaf).empty());
    CHECK(compatible_set_expr(SemanticConfig{}, LogicalExpr::negate(leaf)) == ConfigSet::all());
  }
}
