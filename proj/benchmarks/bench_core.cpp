#include <benchmark/benchmark.h>

#include "l2g/corpus.hpp"
#include "l2g/goalgen.hpp"
#include "l2g/oracle.hpp"

using namespace l2g;

namespace {

struct Batch {
  std::vector<std::vector<int>> tokens;
  std::vector<Example> examples;
};

Batch make_batch(std::size_t n) {
  Rng rng(1);
  const auto data = generate_dataset(n, rng);
  Batch b;
  for (const auto& t : data) b.tokens.push_back(t.sentence->tokens);
  for (std::size_t i = 0; i < data.size(); ++i) b.examples.push_back({data[i].ci, data[i].cf, b.tokens[i]});
  return b;
}

void BM_BuildOracle(benchmark::State& state) {
  for (auto _ : state) {
    Oracle oracle;
    benchmark::DoNotOptimize(oracle.entries().size());
  }
}
BENCHMARK(BM_BuildOracle)->Unit(benchmark::kMillisecond);

void BM_GenerateDataset(benchmark::State& state) {
  for (auto _ : state) {
    Rng rng(2);
    benchmark::DoNotOptimize(generate_dataset(5000, rng));
  }
}
BENCHMARK(BM_GenerateDataset)->Unit(benchmark::kMillisecond);

// Forward + backward on one default-size batch; the inner loop of training.
void BM_LossAndGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Hyperparams hp;
  CVAEModel model(hp);
  auto batch = make_batch(n);
  Rng rng(3);
  nn::Tensor eps({n, hp.latent});
  for (auto& e : eps.values()) e = rng.normal();
  for (auto _ : state) {
    model.params().zero_grad();
    benchmark::DoNotOptimize(cvae_loss(model, batch.examples, eps, true).total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LossAndGradient)->Arg(4)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_SampleGoals(benchmark::State& state) {
  const CVAEModel model{Hyperparams{}};
  Rng rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_goals(model, SemanticConfig{}, "put red close_to green", 100, rng));
  }
}
BENCHMARK(BM_SampleGoals)->Unit(benchmark::kMicrosecond);

void BM_ExpressionSet(benchmark::State& state) {
  Rng rng(5);
  std::vector<LogicalExpr> exprs;
  for (int k = 0; k < 256; ++k) exprs.push_back(sample_expression(1 + k % 3, rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compatible_set_expr(enumerate_valid()[i % 35], exprs[i % exprs.size()]));
    ++i;
  }
}
BENCHMARK(BM_ExpressionSet);

}  // namespace
BENCHMARK_MAIN();
