#include "l2g/evalmod.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "json.hpp"
#include "l2g/error.hpp"

namespace l2g {

GoalSampler model_sampler(const CVAEModel& model) {
  return [&model](SemanticConfig ci, const Sentence& s, std::size_t n, Rng& rng) {
    return sample_goals(model, ci, std::span<const int>(s.tokens), n, rng);
  };
}

double compatibility_probability(std::span<const SemanticConfig> samples, const OracleEntry& entry) {
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto c : samples) {
    if (std::binary_search(entry.cf_set.begin(), entry.cf_set.end(), c)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double coverage(std::span<const SemanticConfig> samples, const OracleEntry& entry) {
  if (entry.cf_set.empty()) return 0.0;
  std::set<SemanticConfig> distinct(samples.begin(), samples.end());
  std::size_t hit = 0;
  for (auto c : entry.cf_set) hit += distinct.contains(c) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(entry.cf_set.size());
}

double compatibility_probability(const GoalSampler& sampler, const OracleEntry& entry,
                                 std::size_t n, Rng& rng) {
  const auto samples = sampler(entry.ci, *entry.sentence, n, rng);
  return compatibility_probability(samples, entry);
}

double coverage(const GoalSampler& sampler, const OracleEntry& entry, std::size_t n, Rng& rng) {
  const auto samples = sampler(entry.ci, *entry.sentence, n, rng);
  return coverage(samples, entry);
}

EvalReport evaluate_testsets(const GoalSampler& sampler, const Oracle& oracle,
                             const SplitSpec& splits, std::size_t n, std::uint64_t seed,
                             std::size_t workers) {
  struct Job {
    int test;
    const OracleEntry* entry;
    double cp = 0.0;
    double cov = 0.0;
  };
  std::vector<Job> jobs;
  for (int k = 0; k < kNumTestSets; ++k) {
    for (const auto& pair : splits.tests[static_cast<std::size_t>(k)]) {
      const auto* entry = oracle.find(pair.ci, pair.sentence->text);
      if (entry == nullptr) {
        throw Error(ErrorCode::kMissingOracleEntry,
                    "test " + std::to_string(k + 1) + ": (" + pair.ci.to_string() + ", '" +
                        pair.sentence->text + "')");
      }
      jobs.push_back({k + 1, entry});
    }
  }

  const Rng root(seed);
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < jobs.size(); i += stride) {
      Rng rng = root.derive(i);
      const auto samples = sampler(jobs[i].entry->ci, *jobs[i].entry->sentence, n, rng);
      jobs[i].cp = compatibility_probability(samples, *jobs[i].entry);
      jobs[i].cov = coverage(samples, *jobs[i].entry);
    }
  };
  workers = std::max<std::size_t>(1, workers);
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w, workers);
  }

  EvalReport report{seed, n, {}};
  for (int k = 1; k <= kNumTestSets; ++k) {
    TestRow row{k, 0.0, 0.0, 0};
    for (const auto& j : jobs) {
      if (j.test != k) continue;
      row.cp_mean += j.cp;
      row.cov_mean += j.cov;
      ++row.n_entries;
    }
    if (row.n_entries > 0) {
      row.cp_mean /= static_cast<double>(row.n_entries);
      row.cov_mean /= static_cast<double>(row.n_entries);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string to_json(const EvalReport& report) {
  nlohmann::ordered_json tests = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    tests.push_back({{"test_id", r.test_id},
                     {"cp_mean", r.cp_mean},
                     {"cov_mean", r.cov_mean},
                     {"n_entries", r.n_entries}});
  }
  nlohmann::ordered_json out = {
      {"seed", report.seed}, {"n", report.n_samples}, {"tests", std::move(tests)}};
  return out.dump(1);
}

}  // namespace l2g
