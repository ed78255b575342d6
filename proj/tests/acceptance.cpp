// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "caselink/case_link.hpp"
#include "caselink/case_service.hpp"
#include "caselink/coinjoin.hpp"
#include "caselink/entity_graph.hpp"
#include "caselink/errors.hpp"
#include "caselink/ingest.hpp"
#include "caselink/pipeline.hpp"
#include "caselink/synth.hpp"
#include "support.hpp"

using namespace caselink;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Built {
  Ledger ledger;
  std::vector<CoinJoinVerdict> verdicts;
  EntityPartition partition;
  EntityGraph graph;

  Built(std::vector<Transaction> txs, const std::vector<AttributionTag>& tags, CoinJoinPolicy policy = {})
      : ledger(std::move(txs)),
        verdicts(classify_all(ledger, policy)),
        partition(EntityPartition::build(ledger, verdicts)),
        graph(EntityGraph::build(partition, verdicts, tags)) {}
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.ok && budget_s > 0 && secs > budget_s) {
    out.ok = false;
    out.detail = "over time budget of " + std::to_string(budget_s) + " s";
  }
  if (!out.ok) ++failures;
  std::printf("%s %-26s %8.3f s  %s\n", out.ok ? "PASS" : "FAIL", name, secs, out.detail.c_str());
  std::fflush(stdout);
}

testing::Partition restrict(const testing::Partition& p, const std::set<std::string>& drop) {
  testing::Partition out;
  for (const auto& group : p) {
    std::set<std::string> kept;
    for (const auto& a : group)
      if (!drop.contains(a)) kept.insert(a);
    if (!kept.empty()) out.insert(kept);
  }
  return out;
}

bool refines_partition(const testing::Partition& fine, const testing::Partition& coarse) {
  return testing::refines(fine, coarse);
}

Outcome linkage_rates() {
  const double sextortion = linkage_rate(1150, 35);
  const double fraud = linkage_rate(34, 20);
  std::ostringstream d;
  d << "sextortion " << sextortion << ", cyberfraud " << fraud;
  return {std::fabs(sextortion - 0.9696) <= 1e-4 && std::fabs(fraud - 0.4118) <= 1e-4, d.str()};
}

synth::ScenarioSpec random_spec(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  synth::ScenarioSpec spec;
  spec.seed = seed;
  spec.n_campaigns = 1 + static_cast<std::uint32_t>(rng() % 8);
  spec.cases_per_campaign = 1 + static_cast<std::uint32_t>(rng() % 5);
  spec.address_reuse_prob = unit(rng);
  spec.wallet_cospend_prob = unit(rng);
  spec.collector_fanin = 1 + static_cast<std::uint32_t>(rng() % 3);
  spec.custodial_reuse_prob = 0.3 * unit(rng);
  spec.coinjoin_noise_prob = 0.2 * unit(rng);
  spec.laundering_hops = static_cast<std::uint32_t>(rng() % 3);
  spec.payment_value_model = synth::ValueModel::mixed;
  return spec;
}

Outcome coarsening_chain() {
  std::size_t violations = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = synth::generate(random_spec(seed));
    const Built b(s.transactions, s.tags);
    const CaseLinker linker(filter_active_cases(s.cases, b.ledger).active, &b.partition, &b.graph);
    const auto addr = linker.link(LinkLevel::address);
    const auto ent = linker.link(LinkLevel::entity);
    const auto col = linker.link(LinkLevel::collector);
    if (!(addr.clusters.size() >= ent.clusters.size() && ent.clusters.size() >= col.clusters.size())) ++violations;
    if (!testing::refines(testing::grouping(addr), testing::grouping(ent))) ++violations;
    if (!testing::refines(testing::grouping(ent), testing::grouping(col))) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations over 100 scenarios"};
}

Outcome partition_oracle() {
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0;
  for (int round = 0; round < 50; ++round) {
    const auto txs = testing::random_ledger(rng, 200, 120);
    const Built b(txs, {});
    std::set<std::string> skip;
    for (const auto& v : b.verdicts)
      if (v.is_coinjoin) skip.insert(v.tx_id);
    if (testing::partition_sets(b.partition) != testing::cospend_components(txs, skip)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 50 ledgers"};
}

Outcome ground_truth() {
  std::ostringstream d;
  bool ok = true;
  const std::pair<std::uint32_t, std::uint32_t> shapes[] = {{5, 2}, {20, 5}, {40, 25}, {100, 10}, {250, 4}};
  for (const auto& [campaigns, per] : shapes) {
    synth::ScenarioSpec spec;
    spec.seed = campaigns * 31 + per;
    spec.n_campaigns = campaigns;
    spec.cases_per_campaign = per;
    spec.address_reuse_prob = 0.3;
    spec.collector_fanin = 1;
    const auto s = synth::generate(spec);
    const Built b(s.transactions, s.tags);
    const CaseLinker linker(s.cases, &b.partition, &b.graph);
    const auto clustering = linker.link(LinkLevel::entity);

    std::size_t tp = 0, predicted = 0, actual = 0;
    const auto& cases = linker.cases();
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto a = cases[i].case_id.to_string();
      for (std::size_t j = i + 1; j < cases.size(); ++j) {
        const auto bid = cases[j].case_id.to_string();
        const bool same_cluster = clustering.cluster_of(a) == clustering.cluster_of(bid);
        const bool same_campaign = s.truth.case_campaign.at(a) == s.truth.case_campaign.at(bid);
        predicted += same_cluster;
        actual += same_campaign;
        tp += same_cluster && same_campaign;
      }
    }
    const double precision = predicted ? double(tp) / double(predicted) : 1.0;
    const double recall = actual ? double(tp) / double(actual) : 1.0;
    ok = ok && precision == 1.0 && recall == 1.0 && clustering.clusters.size() == campaigns;
    d << cases.size() << " cases P=" << precision << " R=" << recall << "; ";
  }
  return {ok, d.str()};
}

Outcome coinjoin_robustness() {
  std::size_t on_mismatch = 0, off_not_coarser = 0, strictly = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    synth::ScenarioSpec spec;
    spec.seed = seed;
    spec.n_campaigns = 6;
    spec.cases_per_campaign = 4;
    spec.address_reuse_prob = 0.2;
    auto clean_spec = spec;
    spec.coinjoin_noise_prob = 0.2;
    const auto clean = synth::generate(clean_spec);
    const auto noisy = synth::generate(spec);

    const auto reference = testing::partition_sets(Built(clean.transactions, clean.tags).partition);
    const auto on = restrict(testing::partition_sets(Built(noisy.transactions, noisy.tags).partition),
                             noisy.truth.noise_addresses);
    CoinJoinPolicy off;
    off.enabled = false;
    const auto without = restrict(testing::partition_sets(Built(noisy.transactions, noisy.tags, off).partition),
                                  noisy.truth.noise_addresses);
    if (on != reference) ++on_mismatch;
    if (!refines_partition(reference, without)) ++off_not_coarser;
    if (without.size() < reference.size()) ++strictly;
  }
  std::ostringstream d;
  d << "filter on mismatches " << on_mismatch << ", filter off not coarser " << off_not_coarser
    << ", strictly coarser in " << strictly << "/20";
  return {on_mismatch == 0 && off_not_coarser == 0 && strictly >= 1, d.str()};
}

Outcome value_conservation() {
  std::vector<std::pair<std::string, Built>> fixtures;
  const auto desk = testing::load_desk();
  std::size_t checked = 0, broken = 0;
  auto check = [&](const Built& b) {
    Satoshi attributed = 0;
    for (std::size_t i = 0; i < b.ledger.size(); ++i) {
      const auto& t = b.ledger.transaction(i);
      if (!t.is_coinbase() && !b.verdicts[i].is_coinjoin) attributed += t.output_total();
    }
    Satoshi edges = 0;
    for (const auto& e : b.graph.edges()) edges += e.total_value;
    ++checked;
    if (edges != attributed) ++broken;
  };
  check(Built(desk.transactions, desk.tags));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = synth::generate(random_spec(seed));
    check(Built(s.transactions, s.tags));
  }
  return {broken == 0, std::to_string(checked - broken) + "/" + std::to_string(checked) + " fixtures exact"};
}

Outcome determinism() {
  testing::TempDir dir;
  const auto scenario_dir = dir.path() / "scenario";
  auto spec = random_spec(42);
  spec.n_campaigns = 12;
  synth::write_scenario(synth::generate(spec), spec, scenario_dir);

  std::vector<std::string> differing;
  auto compare = [&](PipelineConfig base, const std::string& label) {
    std::map<std::string, std::string> first;
    for (unsigned threads : {1u, 3u, 8u}) {
      auto c = base;
      c.threads = threads;
      c.out_dir = dir.path() / (label + std::to_string(threads));
      run_pipeline(c);
      for (const auto& entry : fs::directory_iterator(c.out_dir)) {
        const auto name = entry.path().filename().string();
        const bool dump = name == "partition.csv" || name == "graph.csv" || name.rfind("network_", 0) == 0;
        if (!dump) continue;
        const auto bytes = testing::read_file(entry.path());
        if (threads == 1) first[name] = bytes;
        else if (first[name] != bytes) differing.push_back(label + "/" + name);
      }
    }
    return first.size();
  };
  auto desk = PipelineConfig::load(testing::fixture("desk/run.conf"));
  std::size_t files = compare(desk, "desk");
  PipelineConfig synth_cfg;
  synth_cfg.transactions = scenario_dir / "transactions.jsonl";
  synth_cfg.tags = scenario_dir / "tags.csv";
  synth_cfg.rates = scenario_dir / "rates.csv";
  synth_cfg.cases = scenario_dir / "cases.csv";
  files += compare(synth_cfg, "synth");
  std::string detail = std::to_string(files) + " dumps compared";
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty() && files == 16, detail};
}

Outcome anatomy() {
  synth::ScenarioSpec spec;
  spec.seed = 6;
  for (int i = 0; i < 3; ++i) spec.campaign_profiles.push_back({4, 0.0, true});
  for (int i = 0; i < 5; ++i) spec.campaign_profiles.push_back({4, 1.0, false});
  spec.collector_fanin = 8;
  const auto s = synth::generate(spec);
  const Built b(s.transactions, s.tags);
  const CaseLinker linker(s.cases, &b.partition, &b.graph);
  const auto entity = linker.link(LinkLevel::entity);
  const auto collector = linker.link(LinkLevel::collector);
  std::ostringstream d;
  d << entity.clusters.size() << " entity-level clusters, " << collector.clusters.size()
    << " collector-level cluster(s) of size " << (collector.clusters.empty() ? 0 : collector.clusters[0].size());
  const bool ok = collector.clusters.size() == 1 && collector.clusters[0].size() == 32 && entity.clusters.size() == 8;
  return {ok, d.str()};
}

Outcome access_matrix() {
  std::size_t matched = 0, combos = 0;
  bool stubs_ok = true;
  for (bool granted : {false, true}) {
    CaseService svc(std::make_unique<SqliteCaseStore>(":memory:"));
    const auto a = svc.authenticate(svc.create_zone({"zone-a", "A", {}}));
    const auto b = svc.authenticate(svc.create_zone({"zone-b", "B", {}}));
    const std::string case_a = "BY1234-000001-22/1", case_b = "BY5678-000002-22/3";
    svc.create_case(a, case_a, "sextortion");
    svc.create_case(b, case_b, "sextortion");
    svc.annotate(a, case_a, "shared", "perpetrator");
    svc.annotate(b, case_b, "shared", "perpetrator");
    // The grant lets zone-b read zone-a, never the other way round.
    if (granted) svc.grant_read("zone-a", "zone-b");
    svc.relink();

    struct Row {
      const Caller* caller;
      const std::string* case_id;
      bool expected;
    };
    const Row rows[] = {{&a, &case_a, true}, {&a, &case_b, false}, {&b, &case_b, true}, {&b, &case_a, granted}};
    for (const auto& r : rows) {
      bool visible = true;
      try {
        svc.get_case(*r.caller, *r.case_id);
      } catch (const NotFound&) {
        visible = false;
      }
      const auto view = svc.list_case_clusters(*r.caller, LinkLevel::address);
      bool listed = false;
      std::size_t stubs = 0;
      for (const auto& card : view.clusters) {
        listed = listed || std::find(card.case_ids.begin(), card.case_ids.end(), *r.case_id) != card.case_ids.end();
        stubs += card.anonymized_stubs;
      }
      ++combos;
      if (visible == r.expected && listed == r.expected) ++matched;
      const std::size_t unreadable = (r.caller == &a) ? 1 : (granted ? 0 : 1);
      if (stubs != unreadable) stubs_ok = false;
    }
  }
  return {matched == 8 && combos == 8 && stubs_ok,
          std::to_string(matched) + "/" + std::to_string(combos) + " combinations" + (stubs_ok ? "" : ", stub mismatch")};
}

}  // namespace

int main() {
  criterion("linkage-rate arithmetic", 1, linkage_rates);
  criterion("coarsening chain", 60, coarsening_chain);
  criterion("partition oracle", 10, partition_oracle);
  criterion("ground-truth recovery", 30, ground_truth);
  criterion("coinjoin robustness", 0, coinjoin_robustness);
  criterion("value conservation", 0, value_conservation);
  criterion("determinism", 0, determinism);
  criterion("32-case anatomy", 0, anatomy);
  criterion("service access matrix", 0, access_matrix);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
