#include <benchmark/benchmark.h>

#include "caselink/case_link.hpp"
#include "caselink/coinjoin.hpp"
#include "caselink/entity_graph.hpp"
#include "caselink/entity_partition.hpp"
#include "caselink/ingest.hpp"
#include "caselink/synth.hpp"

using namespace caselink;

namespace {

synth::Scenario scenario(std::int64_t campaigns) {
  synth::ScenarioSpec spec;
  spec.seed = 7;
  spec.n_campaigns = static_cast<std::uint32_t>(campaigns);
  spec.cases_per_campaign = 10;
  spec.address_reuse_prob = 0.3;
  spec.collector_fanin = 4;
  spec.custodial_reuse_prob = 0.1;
  spec.coinjoin_noise_prob = 0.1;
  return synth::generate(spec);
}

void BM_Classify(benchmark::State& state) {
  const auto s = scenario(state.range(0));
  const Ledger ledger(s.transactions);
  for (auto _ : state) benchmark::DoNotOptimize(classify_all(ledger));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ledger.size()));
}

void BM_Partition(benchmark::State& state) {
  const auto s = scenario(state.range(0));
  const Ledger ledger(s.transactions);
  const auto verdicts = classify_all(ledger);
  for (auto _ : state) benchmark::DoNotOptimize(EntityPartition::build(ledger, verdicts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ledger.size()));
}

void BM_LinkCollector(benchmark::State& state) {
  const auto s = scenario(state.range(0));
  const Ledger ledger(s.transactions);
  const auto verdicts = classify_all(ledger);
  const auto partition = EntityPartition::build(ledger, verdicts);
  const auto graph = EntityGraph::build(partition, verdicts, s.tags);
  for (auto _ : state) {
    CaseLinker linker(s.cases, &partition, &graph);
    benchmark::DoNotOptimize(linker.link(LinkLevel::collector));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.cases.size()));
}

}  // namespace

BENCHMARK(BM_Classify)->Arg(10)->Arg(100);
BENCHMARK(BM_Partition)->Arg(10)->Arg(100);
BENCHMARK(BM_LinkCollector)->Arg(10)->Arg(100);

BENCHMARK_MAIN();
