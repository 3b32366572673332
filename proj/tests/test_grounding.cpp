#include <set>

#include "doctest.h"
#include "l2g/error.hpp"
#include "l2g/evalmod.hpp"
#include "l2g/grounding.hpp"
#include "support.hpp"

using namespace l2g;
using l2g::testing::cfg;
using l2g::testing::constant_sampler;
using l2g::testing::perfect_sampler;

namespace {

// Perfect with probability q, else the all-zero configuration.
GoalSampler noisy_sampler(double q) {
  auto perfect = perfect_sampler();
  return [perfect, q](SemanticConfig ci, const Sentence& s, std::size_t n, Rng& rng) {
    auto out = perfect(ci, s, n, rng);
    for (auto& c : out) {
      if (!rng.bernoulli(q)) c = SemanticConfig{};
    }
    return out;
  };
}

const OracleEntry& entry_for(SemanticConfig ci, const char* text) {
  static const Oracle oracle;
  const auto* e = oracle.find(ci, text);
  REQUIRE(e != nullptr);
  return *e;
}

}  // namespace

TEST_SUITE("evalmod") {
  TEST_CASE("CP and coverage examples") {
    const auto& e = entry_for(SemanticConfig{}, "put red close_to green");
    Rng rng(1);
    CHECK(compatibility_probability(constant_sampler(e.cf_set[0]), e, 100, rng) == 1.0);
    CHECK(compatibility_probability(constant_sampler(SemanticConfig{}), e, 100, rng) == 0.0);
    CHECK(compatibility_probability(constant_sampler(cfg("100110000")), e, 100, rng) == 0.0);
    CHECK(coverage(e.cf_set, e) == 1.0);
    CHECK(coverage(constant_sampler(e.cf_set[0]), e, 100, rng) ==
          doctest::Approx(1.0 / static_cast<double>(e.cf_set.size())));

    // |C_f| = 1 is hit by any sampler emitting it once.
    const Oracle oracle;
    for (const auto& x : oracle.entries()) {
      if (x.cf_set.size() != 1) continue;
      std::vector<SemanticConfig> s(99, SemanticConfig::from_code(511));
      s.push_back(x.cf_set[0]);
      CHECK(coverage(s, x) == 1.0);
      break;
    }
  }

  TEST_CASE("coverage is monotone in n on a fixed stream prefix") {
    const auto& e = entry_for(SemanticConfig{}, "put red above green");
    Rng rng(2);
    const auto draws = noisy_sampler(0.6)(e.ci, *e.sentence, 200, rng);
    double prev = 0.0;
    for (std::size_t n = 1; n <= draws.size(); ++n) {
      const double c = coverage(std::span(draws).first(n), e);
      CHECK(c >= prev);
      prev = c;
    }
  }

  TEST_CASE("evaluate_testsets with the ideal sampler; worker invariance") {
    Rng rng(3);
    const auto splits = build_splits(generate_dataset(800, rng));
    const Oracle oracle;
    const auto r1 = evaluate_testsets(perfect_sampler(), oracle, splits, 100, 5, 1);
    const auto r3 = evaluate_testsets(perfect_sampler(), oracle, splits, 100, 5, 3);
    REQUIRE(r1.rows.size() == 5);
    CHECK(to_json(r1) == to_json(r3));
    for (const auto& row : r1.rows) {
      CHECK(row.n_entries >= 1);
      CHECK(row.cp_mean == 1.0);
      CHECK((row.cov_mean > 0.9 && row.cov_mean <= 1.0));
    }
    const auto r0 = evaluate_testsets(constant_sampler(cfg("100110000")), oracle, splits, 10, 5);
    for (const auto& row : r0.rows) {
      CHECK(row.cp_mean == 0.0);
      CHECK(row.cov_mean == 0.0);
    }
    const auto json = to_json(r1);
    CHECK(json.find("\"cp_mean\"") != std::string::npos);
    CHECK(json.find("\"test_id\": 5") != std::string::npos);
  }

  TEST_CASE("missing oracle entry") {
    SplitSpec s;
    s.tests[0].push_back({SemanticConfig{}, instruction_set().lookup("get red far_from green")[0]});
    try {
      evaluate_testsets(perfect_sampler(), Oracle{}, s, 5, 0);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMissingOracleEntry);
    }
  }
}

TEST_SUITE("grounding") {
  TEST_CASE("execute") {
    Rng rng(1);
    const auto goal = cfg("100000000");
    CHECK(execute(SemanticConfig{}, goal, ExecutorConfig::oracle(), rng).achieved == goal);
    const auto bad = execute(SemanticConfig{}, cfg("000100000"), ExecutorConfig::oracle(), rng);
    CHECK_FALSE(bad.reached);
    CHECK(bad.achieved == SemanticConfig{});
    CHECK_FALSE(execute(SemanticConfig{}, goal, ExecutorConfig::stochastic(1.0), rng).reached);
    CHECK(execute(SemanticConfig{}, goal, ExecutorConfig::stochastic(0.0), rng).reached);
    CHECK(ExecutorConfig::oracle().failure_probability() == 0.0);
  }

  TEST_CASE("attempt_instruction outcomes") {
    Rng rng(2);
    const auto& s = *instruction_set().lookup("put red above green")[0];
    const auto fail = attempt_instruction(perfect_sampler(), ExecutorConfig::stochastic(1.0),
                                          SemanticConfig{}, s, 5, rng);
    CHECK_FALSE(fail.success);
    CHECK(fail.attempts_used == 5);
    CHECK(fail.achieved == SemanticConfig{});

    const auto ok = attempt_instruction(perfect_sampler(), ExecutorConfig::oracle(), SemanticConfig{}, s, 5, rng);
    CHECK(ok.success);
    CHECK(ok.attempts_used == 1);
    CHECK(ok.achieved[3]);

    CHECK_THROWS_AS(attempt_instruction(perfect_sampler(), ExecutorConfig::oracle(), SemanticConfig{}, s, 0, rng),
                    Error);
  }

  TEST_CASE("no goal is attempted twice in an episode") {
    Rng rng(3);
    const auto& s = *instruction_set().lookup("put red close_to green")[0];
    for (int k = 0; k < 200; ++k) {
      const auto o = attempt_instruction(perfect_sampler(), ExecutorConfig::stochastic(0.9),
                                         SemanticConfig{}, s, 5, rng);
      CHECK(o.attempts_used >= 1);
      CHECK(o.attempts_used <= 5);
      CHECK(o.attempted.size() == o.attempts_used);
      CHECK(std::set<SemanticConfig>(o.attempted.begin(), o.attempted.end()).size() == o.attempted.size());
    }
  }

  TEST_CASE("transition SR1 tracks the sampler's compatibility") {
    const auto report = transition_protocol(noisy_sampler(0.7), ExecutorConfig::oracle(), 11, 5);
    CHECK(report.episodes == 510);
    // The zero config is also compatible for fall shifts that end at it, so
    // the rate is 0.7 plus that share of the remaining 0.3.
    CHECK(report.sr1 >= 0.65);
    CHECK(report.sr1 <= 0.92);
    CHECK(report.sr5 >= report.sr1);
    CHECK(report.sr5 > 0.95);

    const auto perfect = transition_protocol(perfect_sampler(), ExecutorConfig::oracle(), 11, 5);
    CHECK(perfect.sr1 == 1.0);
  }

  TEST_CASE("SR5 >= SR1 and strict gain at p_fail 0.5") {
    for (double p : {0.0, 0.2, 0.5}) {
      const auto cfg_p = ExecutorConfig::stochastic(p);
      const auto t = transition_protocol(noisy_sampler(0.8), cfg_p, 4, 5);
      const auto e = expression_protocol(noisy_sampler(0.8), cfg_p, 4, 500);
      CAPTURE(p);
      CHECK(t.sr5 >= t.sr1);
      CHECK(e.sr5 >= e.sr1);
      CHECK(e.episodes == 500);
      if (p == 0.5) CHECK(t.sr5 > t.sr1);
    }
  }

  TEST_CASE("sequence protocol bounds") {
    const auto capped = sequence_protocol(perfect_sampler(), ExecutorConfig::oracle(), 1, 10);
    CHECK(capped.n_s == static_cast<double>(kSequenceCap));
    const auto zero = sequence_protocol(perfect_sampler(), ExecutorConfig::stochastic(1.0), 1, 10);
    CHECK(zero.n_s == 0.0);
    const auto mid = sequence_protocol(noisy_sampler(0.5), ExecutorConfig::stochastic(0.2), 1, 20);
    CHECK(mid.n_s > 0.0);
    CHECK(mid.n_s <= static_cast<double>(kSequenceCap));
  }

  TEST_CASE("protocols are reproducible and report JSON") {
    const auto a = expression_protocol(noisy_sampler(0.8), ExecutorConfig::stochastic(0.2), 9, 100);
    const auto b = expression_protocol(noisy_sampler(0.8), ExecutorConfig::stochastic(0.2), 9, 100);
    CHECK(to_json(a) == to_json(b));
    CHECK(to_json(a).find("\"protocol\": \"expression\"") != std::string::npos);
    CHECK(to_json(sequence_protocol(perfect_sampler(), ExecutorConfig::oracle(), 1, 2)).find("\"n_s\"") !=
          std::string::npos);
  }
}
